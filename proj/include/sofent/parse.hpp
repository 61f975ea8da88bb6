#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/field.hpp"
#include "sofent/group.hpp"
#include "sofent/group_ring.hpp"
#include "sofent/sofic.hpp"

namespace sofent {

// Group expressions: Z | Z^r | free:k | free(k) | finite:Z/m | Z/m |
// finite:sym:m | sym:m.  Lattice rank and free rank are capped by the
// generator letters available in the ring grammar.

inline std::shared_ptr<const GroupSpec> parse_group(const std::string& text) {
  auto fail = [&](const std::string& why) {
    throw usage_error("bad group expression '" + text + "': " + why);
  };
  std::string s = text;
  auto strip = [](std::string v) {
    std::size_t a = v.find_first_not_of(" \t");
    if (a == std::string::npos) return std::string();
    std::size_t b = v.find_last_not_of(" \t");
    return v.substr(a, b - a + 1);
  };
  s = strip(s);
  if (s.empty()) fail("empty");
  if (s.rfind("finite:", 0) == 0) s = strip(s.substr(7));

  auto parse_count = [&](const std::string& digits, std::uint64_t lo,
                         std::uint64_t hi, const char* what) {
    if (digits.empty()) fail(std::string("missing ") + what);
    for (char c : digits)
      if (!std::isdigit((unsigned char)c))
        fail(std::string("malformed ") + what);
    std::uint64_t v = 0;
    for (char c : digits) {
      v = v * 10 + (std::uint64_t)(c - '0');
      if (v > hi) fail(std::string(what) + " out of range");
    }
    if (v < lo || v > hi) fail(std::string(what) + " out of range");
    return v;
  };

  if (s == "Z") return std::make_shared<const GroupSpec>(GroupSpec::lattice(1));
  if (s.rfind("Z^", 0) == 0) {
    std::uint64_t r = parse_count(s.substr(2), 1, 6, "lattice rank");
    return std::make_shared<const GroupSpec>(GroupSpec::lattice((std::uint32_t)r));
  }
  if (s.rfind("Z/", 0) == 0) {
    std::uint64_t m = parse_count(s.substr(2), 1, 4096, "cyclic order");
    Perm cycle((std::size_t)m);
    for (std::uint32_t i = 0; i < m; ++i) cycle[i] = (i + 1) % (std::uint32_t)m;
    return std::make_shared<const GroupSpec>(
        GroupSpec::finite_perm((std::uint32_t)m, {cycle}));
  }
  if (s.rfind("free:", 0) == 0 ||
      (s.rfind("free(", 0) == 0 && s.back() == ')')) {
    std::string digits = s.rfind("free:", 0) == 0
                             ? s.substr(5)
                             : s.substr(5, s.size() - 6);
    std::uint64_t k = parse_count(digits, 1, 6, "free rank");
    return std::make_shared<const GroupSpec>(GroupSpec::free_group((std::uint32_t)k));
  }
  if (s.rfind("sym:", 0) == 0) {
    std::uint64_t m = parse_count(s.substr(4), 1, 7, "symmetric degree");
    std::uint32_t n = (std::uint32_t)m;
    std::vector<Perm> gens;
    if (n >= 2) {
      Perm swap01 = identity_perm(n);
      swap01[0] = 1;
      swap01[1] = 0;
      Perm cycle(n);
      for (std::uint32_t i = 0; i < n; ++i) cycle[i] = (i + 1) % n;
      gens = {swap01, cycle};
    } else {
      gens = {identity_perm(1)};
    }
    return std::make_shared<const GroupSpec>(GroupSpec::finite_perm(n, gens));
  }
  fail("unrecognized form");
  return nullptr;
}

// Ring expression grammar.  Terms are separated by '+'.  A term is an
// optional decimal coefficient followed by generator factors joined by
// juxtaposition.  Lattice generators: t for rank 1, u v w x y z for higher
// rank.  Free generators: a b c d e f.  Finite elements: g<k> by table
// index, with s accepted for g1.  Exponents: ^k with optional sign.

struct RingParser {
  const std::string& text;
  std::size_t pos = 0;
  const FieldSpec& field;
  std::shared_ptr<const GroupSpec> group;

  RingParser(const std::string& t, const FieldSpec& fld,
             std::shared_ptr<const GroupSpec> g)
      : text(t), field(fld), group(std::move(g)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw usage_error("ring expression error at position " +
                      std::to_string(pos) + ": " + why);
  }

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t'))
      ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  std::uint64_t read_digits(const char* what) {
    skip_ws();
    if (pos >= text.size() || !std::isdigit((unsigned char)text[pos]))
      fail(std::string("expected ") + what);
    std::uint64_t v = 0;
    while (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
      v = v * 10 + (std::uint64_t)(text[pos] - '0');
      if (v > (1u << 30)) fail(std::string(what) + " too large");
      ++pos;
    }
    return v;
  }

  std::int64_t read_exponent() {
    skip_ws();
    std::int64_t sign = 1;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      if (text[pos] == '-') sign = -1;
      ++pos;
    }
    return sign * (std::int64_t)read_digits("exponent");
  }

  int lattice_axis(char c) const {
    std::uint32_t r = group->gen_count;
    if (r == 1) return c == 't' ? 0 : -1;
    if (c < 'u' || c > 'z') return -1;
    int axis = c - 'u';
    return axis < (int)r ? axis : -1;
  }

  int free_letter(char c) const {
    if (c < 'a' || c > 'f') return -1;
    int idx = c - 'a';
    return idx < (int)group->gen_count ? idx : -1;
  }

  // one generator factor with optional exponent
  GroupElement read_factor() {
    skip_ws();
    char c = text[pos];
    GroupElement g = group->identity();
    if (group->kind == GroupKind::lattice) {
      int axis = lattice_axis(c);
      if (axis < 0) fail(std::string("unknown generator '") + c + "'");
      ++pos;
      std::int64_t e = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        e = read_exponent();
      }
      g.coords[(std::size_t)axis] = e;
      return g;
    }
    if (group->kind == GroupKind::free_group) {
      int idx = free_letter(c);
      if (idx < 0) fail(std::string("unknown generator '") + c + "'");
      ++pos;
      std::int64_t e = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        e = read_exponent();
      }
      if (e == 0) return g;
      std::int32_t letter = (std::int32_t)idx + 1;
      if (e < 0) letter = -letter;
      std::int64_t reps = e < 0 ? -e : e;
      if (reps > 64) fail("exponent too large for a word");
      for (std::int64_t i = 0; i < reps; ++i) g.word.push_back(letter);
      return g;
    }
    // finite group: g<k> table index, s as alias for g1
    std::uint64_t idx;
    if (c == 'g') {
      ++pos;
      idx = read_digits("element index");
    } else if (c == 's') {
      ++pos;
      idx = group->generator(0).index;
    } else {
      fail(std::string("unknown generator '") + c + "'");
    }
    if (idx >= group->finite_size()) fail("element index out of range");
    g.index = (std::uint32_t)idx;
    std::int64_t e = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      e = read_exponent();
    }
    GroupElement acc = group->identity();
    GroupElement base = e < 0 ? group->inv(g) : g;
    std::int64_t reps = e < 0 ? -e : e;
    if (reps > 4096) fail("exponent too large");
    for (std::int64_t i = 0; i < reps; ++i) acc = group->mul(acc, base);
    return acc;
  }

  bool factor_ahead() {
    skip_ws();
    if (pos >= text.size()) return false;
    char c = text[pos];
    return std::isalpha((unsigned char)c);
  }

  // coefficient then factors; a bare coefficient is a multiple of e
  void read_term(GroupRingElem& out) {
    skip_ws();
    std::uint32_t coef = 1;
    bool saw_any = false;
    if (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
      std::uint64_t v = read_digits("coefficient");
      coef = (std::uint32_t)(v % field.p);
      saw_any = true;
    }
    GroupElement g = group->identity();
    while (factor_ahead()) {
      g = group->mul(g, read_factor());
      saw_any = true;
    }
    if (!saw_any) fail("empty term");
    if (coef == 0) return;
    out = ring_add(out, ring_term(field, g, coef));
  }

  GroupRingElem parse() {
    GroupRingElem out = ring_zero(field);
    if (eof()) return out;
    read_term(out);
    while (!eof()) {
      skip_ws();
      if (text[pos] != '+')
        fail(std::string("expected '+' before '") + text[pos] + "'");
      ++pos;
      read_term(out);
    }
    return out;
  }
};

inline GroupRingElem parse_ring_expression(
    const std::string& text, const FieldSpec& field,
    std::shared_ptr<const GroupSpec> group) {
  RingParser p(text, field, std::move(group));
  return p.parse();
}

// Matrix syntax: rows separated by ';', entries separated by ','.
inline GroupRingMatrix parse_ring_matrix(
    const std::string& text, const FieldSpec& field,
    std::shared_ptr<const GroupSpec> group) {
  std::vector<std::vector<GroupRingElem>> rows;
  std::size_t start = 0;
  std::vector<std::string> row_texts;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ';') {
      row_texts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  std::size_t cols = 0;
  for (const std::string& row_text : row_texts) {
    std::vector<GroupRingElem> row;
    std::size_t cell_start = 0;
    for (std::size_t i = 0; i <= row_text.size(); ++i) {
      if (i == row_text.size() || row_text[i] == ',') {
        row.push_back(parse_ring_expression(
            row_text.substr(cell_start, i - cell_start), field, group));
        cell_start = i + 1;
      }
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw usage_error("matrix rows have unequal lengths");
    rows.push_back(std::move(row));
  }
  GroupRingMatrix m(field, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
  return m;
}

inline std::string serialize_element(const GroupSpec& group,
                                     const GroupElement& g) {
  if (group.kind == GroupKind::lattice) {
    std::uint32_t r = group.gen_count;
    std::string out;
    for (std::uint32_t j = 0; j < r; ++j) {
      std::int64_t e = g.coords[j];
      if (e == 0) continue;
      char letter = r == 1 ? 't' : (char)('u' + j);
      if (!out.empty()) out += ' ';
      out += letter;
      if (e != 1) out += "^" + std::to_string(e);
    }
    return out;
  }
  if (group.kind == GroupKind::free_group) {
    std::string out;
    for (std::size_t i = 0; i < g.word.size();) {
      std::int32_t letter = g.word[i];
      std::size_t j = i;
      while (j < g.word.size() && g.word[j] == letter) ++j;
      std::int64_t e = (std::int64_t)(j - i) * (letter < 0 ? -1 : 1);
      char name = (char)('a' + (letter < 0 ? -letter : letter) - 1);
      if (!out.empty()) out += ' ';
      out += name;
      if (e != 1) out += "^" + std::to_string(e);
      i = j;
    }
    return out;
  }
  return g.index == 0 ? std::string() : "g" + std::to_string(g.index);
}

inline std::string serialize_ring_element(const GroupSpec& group,
                                          const GroupRingElem& f) {
  if (f.terms.empty()) return "0";
  std::string out;
  for (const auto& [g, c] : f.terms) {
    if (!out.empty()) out += " + ";
    std::string word = serialize_element(group, g);
    if (word.empty()) {
      out += std::to_string(c);
    } else {
      if (c != 1) out += std::to_string(c) + " ";
      out += word;
    }
  }
  return out;
}

inline std::string serialize_ring_matrix(const GroupSpec& group,
                                         const GroupRingMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (i) out += "; ";
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out += ", ";
      out += serialize_ring_element(group, m.at(i, j));
    }
  }
  return out;
}

// Ladder syntax: "N=a..b" or "N=a..b:step" (lattice sides), "d=4,16,64"
// (random free-group degrees), "copies=a..b" or "copies=list" (finite).
struct LadderSpec {
  enum class Kind { lattice_sides, degrees, copies };
  Kind kind = Kind::lattice_sides;
  std::vector<std::uint64_t> values;
};

inline std::vector<std::uint64_t> parse_value_list(const std::string& text,
                                                   const std::string& what) {
  auto fail = [&](const std::string& why) {
    throw usage_error("bad ladder '" + what + "': " + why);
  };
  auto number = [&](const std::string& s) {
    if (s.empty()) fail("missing number");
    std::uint64_t v = 0;
    for (char c : s) {
      if (!std::isdigit((unsigned char)c)) fail("malformed number '" + s + "'");
      v = v * 10 + (std::uint64_t)(c - '0');
      if (v > (1ull << 40)) fail("number too large");
    }
    return v;
  };
  std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    std::uint64_t lo = number(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    std::uint64_t step = 0;  // 0 means doubling
    std::size_t colon = rest.find(':');
    if (colon != std::string::npos) {
      step = number(rest.substr(colon + 1));
      if (step == 0) fail("step must be positive");
      rest = rest.substr(0, colon);
    }
    std::uint64_t hi = number(rest);
    if (lo == 0) fail("range must start above zero");
    if (hi < lo) fail("range is empty");
    std::vector<std::uint64_t> out;
    if (step == 0) {
      for (std::uint64_t v = lo; v <= hi; v *= 2) {
        out.push_back(v);
        if (v > hi / 2 && v < hi) {
          out.push_back(hi);
          break;
        }
      }
      if (out.size() > 1 && out[out.size() - 1] == out[out.size() - 2])
        out.pop_back();
    } else {
      for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
    }
    return out;
  }
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      out.push_back(number(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (out.empty()) fail("empty list");
  return out;
}

inline LadderSpec parse_ladder_spec(const std::string& text) {
  std::size_t eq = text.find('=');
  if (eq == std::string::npos)
    throw usage_error("bad ladder '" + text + "': expected key=values");
  std::string key = text.substr(0, eq);
  std::string rest = text.substr(eq + 1);
  LadderSpec spec;
  if (key == "N")
    spec.kind = LadderSpec::Kind::lattice_sides;
  else if (key == "d")
    spec.kind = LadderSpec::Kind::degrees;
  else if (key == "copies")
    spec.kind = LadderSpec::Kind::copies;
  else
    throw usage_error("bad ladder '" + text + "': unknown key '" + key + "'");
  spec.values = parse_value_list(rest, text);
  if (spec.values.empty())
    throw usage_error("bad ladder '" + text + "': no rungs");
  return spec;
}

inline Ladder build_ladder(const LadderSpec& spec,
                           std::shared_ptr<const GroupSpec> group,
                           std::uint64_t seed,
                           std::uint64_t cap = kDefaultEntryCap) {
  switch (spec.kind) {
    case LadderSpec::Kind::lattice_sides: {
      if (group->kind != GroupKind::lattice)
        throw usage_error("ladder N=... needs a lattice group");
      std::vector<std::uint32_t> sides;
      for (std::uint64_t v : spec.values) {
        if (v == 0 || v > (1u << 20))
          throw usage_error("ladder side out of range");
        sides.push_back((std::uint32_t)v);
      }
      return make_lattice_ladder(group, sides, cap);
    }
    case LadderSpec::Kind::degrees: {
      if (group->kind != GroupKind::free_group)
        throw usage_error("ladder d=... needs a free group");
      return make_free_ladder(group, spec.values, seed);
    }
    case LadderSpec::Kind::copies: {
      if (group->kind != GroupKind::finite)
        throw usage_error("ladder copies=... needs a finite group");
      std::vector<std::uint32_t> copies;
      for (std::uint64_t v : spec.values) {
        if (v == 0 || v > (1u << 16))
          throw usage_error("ladder copies out of range");
        copies.push_back((std::uint32_t)v);
      }
      return make_finite_ladder(group, copies);
    }
  }
  throw usage_error("unreachable ladder kind");
}

// Default ladder per group kind when none is given.
inline LadderSpec default_ladder(const GroupSpec& group) {
  LadderSpec spec;
  if (group.kind == GroupKind::lattice) {
    spec.kind = LadderSpec::Kind::lattice_sides;
    spec.values = {4, 8, 16, 32};
    if (group.gen_count >= 3) spec.values = {2, 4, 8};
  } else if (group.kind == GroupKind::free_group) {
    spec.kind = LadderSpec::Kind::degrees;
    spec.values = {64, 128, 256, 512};
  } else {
    spec.kind = LadderSpec::Kind::copies;
    spec.values = {1, 2, 4, 8};
  }
  return spec;
}

// Group element lists for windows: elements separated by ','.
inline std::vector<GroupElement> parse_element_list(const std::string& text,
                                        std::shared_ptr<const GroupSpec> group,
                                        const FieldSpec& field) {
  std::vector<GroupElement> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      std::string piece = text.substr(start, i - start);
      start = i + 1;
      std::size_t a = piece.find_first_not_of(" \t");
      if (a == std::string::npos) continue;
      std::size_t b = piece.find_last_not_of(" \t");
      std::string trimmed = piece.substr(a, b - a + 1);
      bool e_is_generator =
          group->kind == GroupKind::free_group && group->gen_count >= 5;
      if (trimmed == "e" && !e_is_generator) {
        out.push_back(group->identity());
        continue;
      }
      GroupRingElem f = parse_ring_expression(trimmed, field, group);
      if (f.terms.size() != 1 || f.terms[0].second != 1)
        throw usage_error("element list entry '" + piece +
                          "' is not a single group element");
      out.push_back(f.terms[0].first);
    }
  }
  return out;
}

}  // namespace sofent
