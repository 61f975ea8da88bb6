#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/field.hpp"
#include "sofent/group_ring.hpp"
#include "sofent/sofic.hpp"

namespace sofent {

inline std::string element_brief(const GroupElement& e) {
  switch (e.kind) {
    case GroupKind::lattice: {
      std::string s = "(";
      for (std::size_t j = 0; j < e.coords.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(e.coords[j]);
      }
      return s + ")";
    }
    case GroupKind::free_group: {
      if (e.word.empty()) return "e";
      std::string s;
      for (std::int32_t l : e.word) {
        if (!s.empty()) s += " ";
        char name = (char)('a' + (l > 0 ? l : -l) - 1);
        s += name;
        if (l < 0) s += "^-1";
      }
      return s;
    }
    case GroupKind::finite:
      return "g" + std::to_string(e.index);
  }
  return "?";
}

inline FqMatrix mat_mul(const FqMatrix& a, const FqMatrix& b) {
  if (a.cols != b.rows) throw usage_error("matrix product shape mismatch");
  FqMatrix out(a.field, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      std::uint32_t aik = a.at(i, k);
      if (!aik) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) = a.field.add(out.at(i, j),
                                   a.field.mul(aik, b.at(k, j)));
    }
  return out;
}

inline bool mat_equal(const FqMatrix& a, const FqMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.a == b.a;
}

// Gauss-Jordan on [m | I]; singular input is a usage error.
inline FqMatrix mat_inverse(const FqMatrix& m) {
  if (m.rows != m.cols) throw usage_error("only square matrices invert");
  const FieldSpec F = m.field;
  const std::size_t n = m.rows;
  FqMatrix left = m;
  FqMatrix right = FqMatrix::identity(F, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pr = c;
    while (pr < n && left.at(pr, c) == 0) ++pr;
    if (pr == n) throw usage_error("matrix is singular");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(left.at(c, j), left.at(pr, j));
      std::swap(right.at(c, j), right.at(pr, j));
    }
    std::uint32_t s = F.inv(left.at(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      left.at(c, j) = F.mul(left.at(c, j), s);
      right.at(c, j) = F.mul(right.at(c, j), s);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      std::uint32_t t = left.at(r, c);
      if (!t) continue;
      for (std::size_t j = 0; j < n; ++j) {
        left.at(r, j) = F.sub(left.at(r, j), F.mul(t, left.at(c, j)));
        right.at(r, j) = F.sub(right.at(r, j), F.mul(t, right.at(c, j)));
      }
    }
  }
  return right;
}

// A finite-dimensional window of a module: explicit action matrices for the
// window elements, and generator vectors for the two tracked submodule
// spans. coverage = 0 means box translates are faithful at any size;
// otherwise boxes must stay within that side length.
struct PartialModulePatch {
  FieldSpec field;
  std::shared_ptr<const GroupSpec> group;
  std::uint64_t D = 0;
  std::vector<std::string> basis_names;  // size D, or empty
  std::vector<GroupElement> window;
  std::vector<FqMatrix> actions;  // parallel to window
  std::vector<FqVector> gens_a;
  std::vector<FqVector> gens_b;
  std::uint32_t coverage = 0;
};

inline const FqMatrix* find_action(const PartialModulePatch& p,
                                   const GroupElement& s) {
  for (std::size_t i = 0; i < p.window.size(); ++i)
    if (p.window[i] == s) return &p.actions[i];
  return nullptr;
}

inline const FqMatrix& action_of(const PartialModulePatch& p,
                                 const GroupElement& s) {
  const FqMatrix* m = find_action(p, s);
  if (!m)
    throw usage_error("no action matrix for window element " +
                      element_brief(s));
  return *m;
}

inline void validate_patch(const PartialModulePatch& p) {
  if (!p.group) throw usage_error("patch needs a group");
  if (p.D == 0) throw usage_error("patch dimension must be positive");
  if (p.window.size() != p.actions.size())
    throw usage_error("window and action lists differ in length");
  if (!p.basis_names.empty() && p.basis_names.size() != p.D)
    throw usage_error("basis name list does not match the dimension");
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    p.group->check_element(p.window[i]);
    for (std::size_t j = i + 1; j < p.window.size(); ++j)
      if (p.window[i] == p.window[j])
        throw usage_error("duplicate window element " +
                          element_brief(p.window[i]));
    const FqMatrix& m = p.actions[i];
    if (m.rows != p.D || m.cols != p.D || m.field.p != p.field.p)
      throw usage_error("action matrix shape mismatch for " +
                        element_brief(p.window[i]));
    for (std::uint32_t x : m.a)
      if (x >= p.field.p) throw usage_error("action entry out of field range");
  }
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    if (p.group->is_identity(p.window[i]) &&
        !mat_equal(p.actions[i], FqMatrix::identity(p.field, (std::size_t)p.D)))
      throw usage_error("identity must act as the identity matrix");
    const FqMatrix* inv = find_action(p, p.group->inv(p.window[i]));
    if (inv && !mat_equal(mat_mul(p.actions[i], *inv),
                          FqMatrix::identity(p.field, (std::size_t)p.D)))
      throw usage_error("inverse pair does not multiply to the identity for " +
                        element_brief(p.window[i]));
  }
  if (p.group->kind == GroupKind::lattice) {
    // module actions of a lattice commute
    for (std::size_t i = 0; i < p.window.size(); ++i)
      for (std::size_t j = i + 1; j < p.window.size(); ++j)
        if (!mat_equal(mat_mul(p.actions[i], p.actions[j]),
                       mat_mul(p.actions[j], p.actions[i])))
          throw usage_error("lattice window actions must commute");
  }
  for (const auto& v : p.gens_a)
    if (v.size() != p.D)
      throw usage_error("submodule generator length differs from dimension");
  for (const auto& v : p.gens_b)
    if (v.size() != p.D)
      throw usage_error("submodule generator length differs from dimension");
  for (const auto& v : p.gens_a)
    for (std::uint32_t x : v)
      if (x >= p.field.p) throw usage_error("generator entry out of field range");
  for (const auto& v : p.gens_b)
    for (std::uint32_t x : v)
      if (x >= p.field.p) throw usage_error("generator entry out of field range");
}

// Derive the action of a lattice element from generator actions already in
// the window, and add it. Existing entries are kept.
inline void extend_window_lattice(PartialModulePatch& p,
                                  const GroupElement& s) {
  p.group->check_element(s);
  if (p.group->kind != GroupKind::lattice)
    throw usage_error("window extension by composition needs a lattice group");
  if (find_action(p, s)) return;
  FqMatrix acc = FqMatrix::identity(p.field, (std::size_t)p.D);
  for (std::uint32_t j = 0; j < p.group->gen_count; ++j) {
    std::int64_t k = s.coords[j];
    if (k == 0) continue;
    GroupElement step = p.group->identity();
    step.coords[j] = k > 0 ? 1 : -1;
    const FqMatrix* base = find_action(p, step);
    if (!base)
      throw usage_error("no action matrix for window element " +
                        element_brief(step));
    std::int64_t reps = k > 0 ? k : -k;
    for (std::int64_t i = 0; i < reps; ++i) acc = mat_mul(acc, *base);
  }
  p.window.push_back(s);
  p.actions.push_back(std::move(acc));
}

// Keep only the listed window elements, in the given order.
inline PartialModulePatch restrict_window(
    const PartialModulePatch& p, const std::vector<GroupElement>& elems) {
  PartialModulePatch out = p;
  out.window.clear();
  out.actions.clear();
  for (const auto& s : elems) {
    const FqMatrix* m = find_action(p, s);
    if (!m)
      throw usage_error("no action matrix for window element " +
                        element_brief(s));
    out.window.push_back(s);
    out.actions.push_back(*m);
  }
  return out;
}

// The free module of rank one over F_q[Z^r], realized on the box [0,N)^r
// with wrap-around. Translates are faithful up to side length N, recorded
// as the coverage.
inline PartialModulePatch make_free_patch(FieldSpec field,
                                          std::shared_ptr<const GroupSpec> group,
                                          std::uint32_t N,
                                          std::uint64_t cap = kDefaultEntryCap) {
  if (!group || group->kind != GroupKind::lattice)
    throw usage_error("free patch construction needs a lattice group");
  if (N == 0) throw usage_error("free patch side must be positive");
  const std::uint32_t r = group->gen_count;
  std::uint64_t D = 1;
  for (std::uint32_t j = 0; j < r; ++j) {
    if (D > cap / N) throw resource_error("free patch dimension exceeds cap");
    D *= N;
  }
  check_entry_cap(D, D, cap, "free patch action");

  PartialModulePatch p;
  p.field = field;
  p.group = group;
  p.D = D;
  p.coverage = N;
  for (std::uint64_t x = 0; x < D; ++x) {
    std::uint64_t rest = x;
    std::string name = "(";
    for (std::uint32_t j = 0; j < r; ++j) {
      if (j) name += ",";
      name += std::to_string(rest % N);
      rest /= N;
    }
    p.basis_names.push_back(name + ")");
  }
  p.window.push_back(group->identity());
  p.actions.push_back(FqMatrix::identity(field, (std::size_t)D));
  for (std::uint32_t j = 0; j < r; ++j) {
    for (int sign : {+1, -1}) {
      GroupElement s = group->identity();
      s.coords[j] = sign;
      FqMatrix act(field, (std::size_t)D, (std::size_t)D);
      std::uint64_t place = 1;
      for (std::uint32_t jj = 0; jj < j; ++jj) place *= N;
      for (std::uint64_t x = 0; x < D; ++x) {
        std::uint64_t digit = (x / place) % N;
        std::uint64_t shifted = (digit + (sign > 0 ? 1 : N - 1)) % N;
        std::uint64_t y = x + (shifted - digit) * place;
        act.at((std::size_t)y, (std::size_t)x) = 1;
      }
      p.window.push_back(s);
      p.actions.push_back(std::move(act));
    }
  }
  FqVector delta0((std::size_t)D, 0);
  delta0[0] = 1;
  p.gens_a = {delta0};
  p.gens_b = {delta0};
  validate_patch(p);
  return p;
}

// F_q[Z]/(f) with t acting as the companion matrix of the normalized
// polynomial; the action is globally faithful, so coverage is unlimited.
inline PartialModulePatch make_quotient1d_patch(
    const GroupRingElem& f, std::shared_ptr<const GroupSpec> group) {
  if (!group || group->kind != GroupKind::lattice || group->gen_count != 1)
    throw usage_error("one-dimensional quotient patch needs the group Z");
  if (is_zero(f)) throw usage_error("quotient by zero leaves the free module");
  const FieldSpec F = f.field;
  std::int64_t lo = f.terms.front().first.coords[0];
  std::int64_t hi = lo;
  for (const auto& [s, c] : f.terms) {
    group->check_element(s);
    lo = std::min(lo, s.coords[0]);
    hi = std::max(hi, s.coords[0]);
  }
  const std::size_t D = (std::size_t)(hi - lo);
  if (D == 0) throw usage_error("unit relation presents the zero module");

  // monic coefficients of f shifted by t^{-lo}
  std::vector<std::uint32_t> coef(D + 1, 0);
  for (const auto& [s, c] : f.terms) coef[(std::size_t)(s.coords[0] - lo)] = c;
  std::uint32_t lead_inv = F.inv(coef[D]);
  for (auto& c : coef) c = F.mul(c, lead_inv);

  FqMatrix companion(F, D, D);
  for (std::size_t k = 0; k + 1 < D; ++k) companion.at(k + 1, k) = 1;
  for (std::size_t k = 0; k < D; ++k)
    companion.at(k, D - 1) = F.neg(coef[k]);

  PartialModulePatch p;
  p.field = F;
  p.group = group;
  p.D = D;
  for (std::size_t k = 0; k < D; ++k)
    p.basis_names.push_back(k == 0 ? "1" : "t^" + std::to_string(k));
  GroupElement t = group->identity();
  t.coords[0] = 1;
  p.window = {group->identity(), t, group->inv(t)};
  p.actions = {FqMatrix::identity(F, D), companion, mat_inverse(companion)};
  for (std::size_t k = 0; k < D; ++k) {
    FqVector v(D, 0);
    v[k] = 1;
    p.gens_a.push_back(v);
    p.gens_b.push_back(v);
  }
  p.coverage = 0;
  validate_patch(p);
  return p;
}

struct RelativeEstimateRecord {
  std::uint64_t d = 0;
  std::uint64_t dim_a = 0;            // rank of the 𝒜 generators
  std::uint64_t dim_s = 0;            // span of the relation generators
  std::uint64_t dim_intersection = 0; // dim(𝒜^d ∩ S)
  std::uint64_t dim_image = 0;        // d·dim 𝒜 − dim(𝒜^d ∩ S)
  double value = 0.0;
  bool range_ok = false;  // 0 <= value <= dim 𝒜 · log q
};

// S = span{delta_v (x) b - delta_{sigma(s)v} (x) (act_s b)} inside F_q^{dD},
// block coordinate v*D+i; the record reports the image of 𝒜^d in the
// quotient by S, normalized per point.
template <class Approx>
RelativeEstimateRecord relative_estimate(const PartialModulePatch& patch,
                                         const Approx& approx,
                                         std::uint64_t cap = kDefaultEntryCap) {
  validate_patch(patch);
  if (patch.group.get() != approx.group.get())
    throw usage_error("patch and approximation use different groups");
  const std::uint64_t d = approx.degree();
  const std::uint64_t D = patch.D;
  check_entry_cap(d, D, cap, "relative estimate ambient");
  const std::size_t amb = (std::size_t)(d * D);

  std::vector<FqVector> gens_s;
  for (const auto& s : patch.window) {
    const FqMatrix& act = action_of(patch, s);
    Perm ps = approx.image(s);
    for (const auto& b : patch.gens_b) {
      FqVector moved = sofent::apply(act, b);
      for (std::uint64_t v = 0; v < d; ++v) {
        FqVector g(amb, 0);
        for (std::uint64_t i = 0; i < D; ++i) {
          std::size_t pos = (std::size_t)(v * D + i);
          g[pos] = patch.field.add(g[pos], b[(std::size_t)i]);
          std::size_t qos = (std::size_t)((std::uint64_t)ps[v] * D + i);
          g[qos] = patch.field.sub(g[qos], moved[(std::size_t)i]);
        }
        if (!is_zero_vector(g)) gens_s.push_back(std::move(g));
      }
    }
  }

  std::vector<FqVector> gens_ad;
  for (std::uint64_t v = 0; v < d; ++v)
    for (const auto& a : patch.gens_a) {
      FqVector g(amb, 0);
      for (std::uint64_t i = 0; i < D; ++i)
        g[(std::size_t)(v * D + i)] = a[(std::size_t)i];
      if (!is_zero_vector(g)) gens_ad.push_back(std::move(g));
    }

  RelativeEstimateRecord rec;
  rec.d = d;
  rec.dim_a = patch.gens_a.empty()
                  ? 0
                  : rank_of(FqMatrix::from_rows(patch.field, patch.gens_a),
                            ElimPath::Auto, cap);
  rec.dim_s = gens_s.empty()
                  ? 0
                  : rank_of(FqMatrix::from_rows(patch.field, gens_s),
                            ElimPath::Auto, cap);
  std::uint64_t dim_ad = d * rec.dim_a;
  if (!gens_ad.empty() && !gens_s.empty()) {
    SubspaceDims dims = subspace_dims(patch.field, gens_ad, gens_s, cap);
    rec.dim_intersection = dims.dim_intersection;
    // blockwise repetition keeps the generators independent
    dim_ad = dims.dim_a;
  }
  rec.dim_image = d * rec.dim_a - rec.dim_intersection;
  rec.value = patch.field.log_q() * ((double)rec.dim_image / (double)d);
  rec.range_ok = dim_ad == d * rec.dim_a && rec.dim_intersection <= dim_ad;
  return rec;
}

struct FolnerRecord {
  std::uint32_t side = 0;
  std::uint64_t box_points = 0;
  std::uint64_t dim_sum = 0;
  double value = 0.0;
  double running_inf = 0.0;
  bool range_ok = false;  // dim_sum <= |F| · dim 𝒜, in integers
};

struct FolnerReport {
  std::uint64_t dim_a = 0;
  std::vector<FolnerRecord> records;
  double infimum = 0.0;

  bool all_ok() const {
    for (const auto& r : records)
      if (!r.range_ok) return false;
    return !records.empty();
  }
};

// For each box [0,L)^r, the span of the translates act_{s^{-1}}(𝒜) over
// s in the box, normalized by the box volume; the infimum runs over the
// supplied box list in order.
inline FolnerReport folner_entropy(const PartialModulePatch& patch,
                                   const std::vector<std::uint32_t>& sides,
                                   std::uint64_t cap = kDefaultEntryCap) {
  validate_patch(patch);
  if (patch.group->kind != GroupKind::lattice)
    throw usage_error("box entropy needs a lattice group");
  if (sides.empty()) throw usage_error("need at least one box");
  const std::uint32_t r = patch.group->gen_count;

  std::vector<const FqMatrix*> back(r);
  for (std::uint32_t j = 0; j < r; ++j) {
    GroupElement s = patch.group->identity();
    s.coords[j] = -1;
    back[j] = find_action(patch, s);
    if (!back[j])
      throw usage_error("no action matrix for window element " +
                        element_brief(s));
  }

  FolnerReport rep;
  rep.dim_a = patch.gens_a.empty()
                  ? 0
                  : rank_of(FqMatrix::from_rows(patch.field, patch.gens_a),
                            ElimPath::Auto, cap);
  for (std::uint32_t L : sides) {
    if (L == 0) throw usage_error("box side must be positive");
    if (patch.coverage != 0 && L > patch.coverage) {
      GroupElement missing = patch.group->identity();
      missing.coords[0] = -(std::int64_t)patch.coverage;
      throw usage_error("box side " + std::to_string(L) +
                        " exceeds patch coverage " +
                        std::to_string(patch.coverage) +
                        "; missing translate " + element_brief(missing));
    }
    std::uint64_t points = 1;
    for (std::uint32_t j = 0; j < r; ++j) {
      if (points > cap / L) throw resource_error("box volume exceeds cap");
      points *= L;
    }
    check_entry_cap(points * std::max<std::uint64_t>(patch.gens_a.size(), 1),
                    patch.D, cap, "box translate span");

    // axis by axis: translate the running family one more step per point
    std::vector<FqVector> rows = patch.gens_a;
    for (std::uint32_t j = 0; j < r; ++j) {
      std::vector<FqVector> grown;
      grown.reserve(rows.size() * L);
      std::vector<FqVector> cur = rows;
      for (std::uint32_t k = 0; k < L; ++k) {
        for (const auto& v : cur) grown.push_back(v);
        if (k + 1 < L)
          for (auto& v : cur) v = sofent::apply(*back[j], v);
      }
      rows = std::move(grown);
    }

    FolnerRecord rec;
    rec.side = L;
    rec.box_points = points;
    rec.dim_sum = rows.empty()
                      ? 0
                      : rank_of(FqMatrix::from_rows(patch.field, rows),
                                ElimPath::Auto, cap);
    rec.value = patch.field.log_q() * ((double)rec.dim_sum / (double)points);
    rec.range_ok = rec.dim_sum <= points * rep.dim_a;
    rec.running_inf = rep.records.empty()
                          ? rec.value
                          : std::min(rep.records.back().running_inf, rec.value);
    rep.records.push_back(rec);
  }
  rep.infimum = rep.records.back().running_inf;
  return rep;
}

}  // namespace sofent
