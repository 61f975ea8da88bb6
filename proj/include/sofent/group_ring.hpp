#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "sofent/field.hpp"
#include "sofent/group.hpp"

namespace sofent {

// Finitely supported F_q-combination of group elements. Canonical form:
// terms sorted by cmp_elements, coefficients nonzero.
struct GroupRingElem {
  FieldSpec field;
  std::vector<std::pair<GroupElement, std::uint32_t>> terms;

  bool operator==(const GroupRingElem&) const = default;
};

inline void ring_normalize(GroupRingElem& f) {
  std::sort(f.terms.begin(), f.terms.end(),
            [](const auto& a, const auto& b) {
              return cmp_elements(a.first, b.first) < 0;
            });
  std::vector<std::pair<GroupElement, std::uint32_t>> out;
  out.reserve(f.terms.size());
  for (auto& t : f.terms) {
    t.second %= f.field.p;
    if (!out.empty() && cmp_elements(out.back().first, t.first) == 0)
      out.back().second = f.field.add(out.back().second, t.second);
    else
      out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& t) { return t.second == 0; }),
            out.end());
  f.terms.swap(out);
}

inline GroupRingElem ring_zero(FieldSpec field) { return {field, {}}; }

inline GroupRingElem ring_term(FieldSpec field, GroupElement e,
                               std::uint32_t coeff) {
  GroupRingElem f{field, {{std::move(e), coeff}}};
  ring_normalize(f);
  return f;
}

inline GroupRingElem ring_one(FieldSpec field, const GroupSpec& g) {
  return ring_term(field, g.identity(), 1);
}

inline bool is_zero(const GroupRingElem& f) { return f.terms.empty(); }

inline void check_same_field(const GroupRingElem& a, const GroupRingElem& b) {
  if (a.field.p != b.field.p)
    throw usage_error("ring elements over different fields");
}

inline GroupRingElem ring_add(const GroupRingElem& a, const GroupRingElem& b) {
  check_same_field(a, b);
  GroupRingElem r = a;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  ring_normalize(r);
  return r;
}

inline GroupRingElem ring_scale(const GroupRingElem& a, std::uint32_t c) {
  GroupRingElem r = a;
  for (auto& t : r.terms) t.second = a.field.mul(t.second, c % a.field.p);
  ring_normalize(r);
  return r;
}

inline GroupRingElem ring_neg(const GroupRingElem& a) {
  return ring_scale(a, a.field.p - 1);
}

inline GroupRingElem ring_sub(const GroupRingElem& a, const GroupRingElem& b) {
  return ring_add(a, ring_neg(b));
}

inline GroupRingElem ring_mul(const GroupSpec& g, const GroupRingElem& a,
                              const GroupRingElem& b) {
  check_same_field(a, b);
  GroupRingElem r{a.field, {}};
  r.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& [s, cs] : a.terms)
    for (const auto& [t, ct] : b.terms)
      r.terms.emplace_back(g.mul(s, t), a.field.mul(cs, ct));
  ring_normalize(r);
  return r;
}

// u* = sum u_s s^{-1}; an involutive anti-homomorphism.
inline GroupRingElem star(const GroupSpec& g, const GroupRingElem& a) {
  GroupRingElem r{a.field, {}};
  r.terms.reserve(a.terms.size());
  for (const auto& [s, c] : a.terms) r.terms.emplace_back(g.inv(s), c);
  ring_normalize(r);
  return r;
}

inline std::vector<GroupElement> support(const GroupRingElem& a) {
  std::vector<GroupElement> s;
  s.reserve(a.terms.size());
  for (const auto& t : a.terms) s.push_back(t.first);
  return s;
}

struct GroupRingMatrix {
  FieldSpec field;
  std::size_t rows = 0, cols = 0;
  std::vector<GroupRingElem> e;

  GroupRingMatrix() = default;
  GroupRingMatrix(FieldSpec f, std::size_t r, std::size_t c)
      : field(f), rows(r), cols(c), e(r * c, ring_zero(f)) {}

  GroupRingElem& at(std::size_t r, std::size_t c) { return e[r * cols + c]; }
  const GroupRingElem& at(std::size_t r, std::size_t c) const {
    return e[r * cols + c];
  }

  bool operator==(const GroupRingMatrix&) const = default;
};

// (f*)_{ij} = (f_{ji})*
inline GroupRingMatrix matrix_star(const GroupSpec& g,
                                   const GroupRingMatrix& f) {
  GroupRingMatrix r(f.field, f.cols, f.rows);
  for (std::size_t i = 0; i < f.rows; ++i)
    for (std::size_t j = 0; j < f.cols; ++j)
      r.at(j, i) = star(g, f.at(i, j));
  return r;
}

inline GroupRingMatrix block_diag(const GroupRingMatrix& a,
                                  const GroupRingMatrix& b) {
  if (a.field.p != b.field.p)
    throw usage_error("block-diagonal of matrices over different fields");
  GroupRingMatrix r(a.field, a.rows + b.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) r.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j)
      r.at(a.rows + i, a.cols + j) = b.at(i, j);
  return r;
}

// Union of entry supports, deduplicated in canonical order.
inline std::vector<GroupElement> matrix_support(const GroupRingMatrix& f) {
  std::vector<GroupElement> s;
  for (const auto& entry : f.e)
    for (const auto& t : entry.terms) s.push_back(t.first);
  std::sort(s.begin(), s.end(), [](const GroupElement& a, const GroupElement& b) {
    return cmp_elements(a, b) < 0;
  });
  s.erase(std::unique(s.begin(), s.end(),
                      [](const GroupElement& a, const GroupElement& b) {
                        return cmp_elements(a, b) == 0;
                      }),
          s.end());
  return s;
}

}  // namespace sofent
