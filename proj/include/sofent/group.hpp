#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/rng.hpp"

namespace sofent {

using Perm = std::vector<std::uint32_t>;

inline Perm identity_perm(std::size_t d) {
  Perm p(d);
  for (std::size_t i = 0; i < d; ++i) p[i] = (std::uint32_t)i;
  return p;
}

// (p after q): result[v] = p[q[v]]
inline Perm compose_perms(const Perm& p, const Perm& q) {
  if (p.size() != q.size()) throw usage_error("composing unequal permutations");
  Perm r(p.size());
  for (std::size_t v = 0; v < q.size(); ++v) r[v] = p[q[v]];
  return r;
}

inline Perm invert_perm(const Perm& p) {
  Perm r(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) r[p[v]] = (std::uint32_t)v;
  return r;
}

inline bool is_permutation(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::uint32_t x : p) {
    if (x >= p.size() || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

inline Perm random_permutation(SeededRng& rng, std::size_t d) {
  Perm p = identity_perm(d);
  for (std::size_t i = d; i > 1; --i)
    std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

enum class GroupKind { lattice, free_group, finite };

// Value type; the owning GroupSpec interprets the payload. Lattice elements
// are exponent vectors, free elements are reduced words over signed letters
// (letter i is stored as ±(i+1)), finite elements are table indices.
struct GroupElement {
  GroupKind kind = GroupKind::lattice;
  std::vector<std::int64_t> coords;
  std::vector<std::int32_t> word;
  std::uint32_t index = 0;

  bool operator==(const GroupElement&) const = default;
};

// Total order on canonical encodings: exponent vectors lexicographically,
// words by length then letters, finite elements by index. Fixes term order
// in ring elements and all serialized output.
inline int cmp_elements(const GroupElement& a, const GroupElement& b) {
  if (a.kind != b.kind)
    throw usage_error("comparing elements of different group kinds");
  switch (a.kind) {
    case GroupKind::lattice:
      if (a.coords.size() != b.coords.size())
        throw usage_error("comparing lattice elements of different rank");
      for (std::size_t i = 0; i < a.coords.size(); ++i)
        if (a.coords[i] != b.coords[i])
          return a.coords[i] < b.coords[i] ? -1 : 1;
      return 0;
    case GroupKind::free_group:
      if (a.word.size() != b.word.size())
        return a.word.size() < b.word.size() ? -1 : 1;
      for (std::size_t i = 0; i < a.word.size(); ++i)
        if (a.word[i] != b.word[i]) return a.word[i] < b.word[i] ? -1 : 1;
      return 0;
    case GroupKind::finite:
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      return 0;
  }
  return 0;
}

// One of: Z^r, the free group on k letters, or a permutation group given by
// generators and closed out into an explicit multiplication table.
struct GroupSpec {
  GroupKind kind = GroupKind::lattice;
  std::uint32_t gen_count = 0;  // r, k, or number of generator permutations

  // finite only
  std::uint32_t degree = 0;
  std::vector<Perm> gen_perms;
  std::vector<Perm> elements;          // identity first
  std::vector<std::uint32_t> mul_table;  // size*size
  std::vector<std::uint32_t> inv_table;
  std::vector<std::uint32_t> gen_index;  // element index of each generator

  static GroupSpec lattice(std::uint32_t r) {
    if (r == 0) throw usage_error("lattice rank must be positive");
    GroupSpec g;
    g.kind = GroupKind::lattice;
    g.gen_count = r;
    return g;
  }

  static GroupSpec free_group(std::uint32_t k) {
    if (k == 0) throw usage_error("free rank must be positive");
    GroupSpec g;
    g.kind = GroupKind::free_group;
    g.gen_count = k;
    return g;
  }

  static GroupSpec finite_perm(std::uint32_t degree, std::vector<Perm> gens,
                               std::size_t max_elements = 4096) {
    GroupSpec g;
    g.kind = GroupKind::finite;
    g.degree = degree;
    for (const Perm& p : gens) {
      if (p.size() != degree || !is_permutation(p))
        throw usage_error("generator is not a permutation of the stated degree");
    }
    g.gen_perms = std::move(gens);
    g.gen_count = (std::uint32_t)g.gen_perms.size();

    std::map<Perm, std::uint32_t> idx;
    g.elements.push_back(identity_perm(degree));
    idx[g.elements[0]] = 0;
    for (std::size_t head = 0; head < g.elements.size(); ++head) {
      for (const Perm& gen : g.gen_perms) {
        Perm next = compose_perms(g.elements[head], gen);
        if (idx.emplace(next, (std::uint32_t)g.elements.size()).second) {
          g.elements.push_back(std::move(next));
          if (g.elements.size() > max_elements)
            throw resource_error("finite group enumeration exceeds cap " +
                                 std::to_string(max_elements));
        }
      }
    }
    const std::size_t n = g.elements.size();
    g.mul_table.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        g.mul_table[i * n + j] =
            idx.at(compose_perms(g.elements[i], g.elements[j]));
    g.inv_table.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (g.mul_table[i * n + j] == 0) {
          g.inv_table[i] = (std::uint32_t)j;
          break;
        }
    for (const Perm& p : g.gen_perms) g.gen_index.push_back(idx.at(p));

    // table sanity: associativity exhaustively for small groups, sampled above
    auto check_assoc = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
      if (g.finite_mul(g.finite_mul(a, b), c) !=
          g.finite_mul(a, g.finite_mul(b, c)))
        throw usage_error("finite group table is not associative");
    };
    if (n <= 64) {
      for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
          for (std::uint32_t c = 0; c < n; ++c) check_assoc(a, b, c);
    } else {
      SeededRng rng(0xA550C1A7E);
      for (int t = 0; t < 10000; ++t)
        check_assoc((std::uint32_t)rng.below(n), (std::uint32_t)rng.below(n),
                    (std::uint32_t)rng.below(n));
    }
    return g;
  }

  std::size_t finite_size() const {
    if (kind != GroupKind::finite)
      throw usage_error("finite_size on an infinite group");
    return elements.size();
  }

  std::uint32_t finite_mul(std::uint32_t i, std::uint32_t j) const {
    return mul_table[(std::size_t)i * elements.size() + j];
  }

  GroupElement identity() const {
    GroupElement e;
    e.kind = kind;
    if (kind == GroupKind::lattice) e.coords.assign(gen_count, 0);
    return e;
  }

  GroupElement generator(std::uint32_t i) const {
    if (i >= gen_count) throw usage_error("generator index out of range");
    GroupElement e;
    e.kind = kind;
    switch (kind) {
      case GroupKind::lattice:
        e.coords.assign(gen_count, 0);
        e.coords[i] = 1;
        break;
      case GroupKind::free_group:
        e.word.push_back((std::int32_t)(i + 1));
        break;
      case GroupKind::finite:
        e.index = gen_index[i];
        break;
    }
    return e;
  }

  void check_element(const GroupElement& e) const {
    if (e.kind != kind) throw usage_error("element belongs to another group kind");
    switch (kind) {
      case GroupKind::lattice:
        if (e.coords.size() != gen_count)
          throw usage_error("lattice element of wrong rank");
        break;
      case GroupKind::free_group:
        for (std::int32_t l : e.word) {
          std::uint32_t letter = (std::uint32_t)(l < 0 ? -l : l);
          if (l == 0 || letter > gen_count)
            throw usage_error("free word uses an unknown letter");
        }
        break;
      case GroupKind::finite:
        if (e.index >= elements.size())
          throw usage_error("finite element index out of range");
        break;
    }
  }

  bool is_identity(const GroupElement& e) const {
    return cmp_elements(e, identity()) == 0;
  }

  GroupElement mul(const GroupElement& a, const GroupElement& b) const {
    check_element(a);
    check_element(b);
    GroupElement r;
    r.kind = kind;
    switch (kind) {
      case GroupKind::lattice:
        r.coords.resize(gen_count);
        for (std::uint32_t i = 0; i < gen_count; ++i)
          r.coords[i] = a.coords[i] + b.coords[i];
        break;
      case GroupKind::free_group:
        r.word = a.word;
        for (std::int32_t l : b.word) {
          if (!r.word.empty() && r.word.back() == -l)
            r.word.pop_back();
          else
            r.word.push_back(l);
        }
        break;
      case GroupKind::finite:
        r.index = finite_mul(a.index, b.index);
        break;
    }
    return r;
  }

  GroupElement inv(const GroupElement& a) const {
    check_element(a);
    GroupElement r;
    r.kind = kind;
    switch (kind) {
      case GroupKind::lattice:
        r.coords.resize(gen_count);
        for (std::uint32_t i = 0; i < gen_count; ++i)
          r.coords[i] = -a.coords[i];
        break;
      case GroupKind::free_group:
        r.word.reserve(a.word.size());
        for (auto it = a.word.rbegin(); it != a.word.rend(); ++it)
          r.word.push_back(-*it);
        break;
      case GroupKind::finite:
        r.index = inv_table[a.index];
        break;
    }
    return r;
  }

  GroupElement pow(const GroupElement& a, std::int64_t k) const {
    if (kind == GroupKind::lattice) {
      GroupElement r = identity();
      for (std::uint32_t i = 0; i < gen_count; ++i) r.coords[i] = a.coords[i] * k;
      return r;
    }
    GroupElement base = k < 0 ? inv(a) : a;
    std::uint64_t reps = k < 0 ? (std::uint64_t)(-k) : (std::uint64_t)k;
    GroupElement r = identity();
    for (std::uint64_t i = 0; i < reps; ++i) r = mul(r, base);
    return r;
  }
};

}  // namespace sofent
