#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sofent/common.hpp"

namespace sofent {

// Prime field F_p, p < 2^16. Residues live in uint32_t, always reduced;
// products of two reduced residues fit in uint32_t since 65535^2 < 2^32.
struct FieldSpec {
  std::uint32_t p = 2;

  FieldSpec() = default;

  explicit FieldSpec(std::uint32_t prime) : p(prime) {
    if (p < 2 || p >= 65536)
      throw usage_error("field characteristic must be a prime in [2, 2^16): " +
                        std::to_string(p));
    for (std::uint32_t d = 2; d * d <= p; ++d)
      if (p % d == 0)
        throw usage_error("field characteristic is not prime: " +
                          std::to_string(p));
  }

  bool operator==(const FieldSpec&) const = default;

  std::uint32_t reduce64(std::uint64_t x) const {
    return (std::uint32_t)(x % p);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t s = a + b;
    return s >= p ? s - p : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
    return a >= b ? a - b : a + p - b;
  }
  std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return (a * b) % p;
  }
  std::uint32_t inv(std::uint32_t a) const {
    if (a == 0) throw usage_error("inverse of zero residue");
    // Fermat: a^(p-2)
    std::uint32_t r = 1, base = a % p;
    std::uint32_t e = p - 2;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  double log_q() const { return std::log((double)p); }
};

using FqVector = std::vector<std::uint32_t>;

// Dense row-major matrix over F_p.
struct FqMatrix {
  FieldSpec field;
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint32_t> a;

  FqMatrix() = default;
  FqMatrix(FieldSpec f, std::size_t r, std::size_t c,
           std::uint64_t cap = kDefaultEntryCap)
      : field(f), rows(r), cols(c) {
    check_entry_cap(r, c, cap, "dense matrix");
    a.assign(r * c, 0);
  }

  std::uint32_t& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  std::uint32_t at(std::size_t r, std::size_t c) const {
    return a[r * cols + c];
  }

  static FqMatrix identity(FieldSpec f, std::size_t n) {
    FqMatrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static FqMatrix from_rows(FieldSpec f,
                            const std::vector<FqVector>& row_data) {
    std::size_t r = row_data.size();
    std::size_t c = r ? row_data[0].size() : 0;
    FqMatrix m(f, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (row_data[i].size() != c)
        throw usage_error("ragged rows in matrix literal");
      for (std::size_t j = 0; j < c; ++j)
        m.at(i, j) = row_data[i][j] % f.p;
    }
    return m;
  }

  bool operator==(const FqMatrix&) const = default;
};

struct Triplet {
  std::uint64_t row = 0, col = 0;
  std::uint32_t val = 0;
};

// Unordered (row, col, value) entries; normalize() folds duplicates mod p and
// drops zeros, after which each coordinate appears at most once.
struct SparseTriplets {
  FieldSpec field;
  std::uint64_t rows = 0, cols = 0;
  std::vector<Triplet> entries;

  SparseTriplets() = default;
  SparseTriplets(FieldSpec f, std::uint64_t r, std::uint64_t c)
      : field(f), rows(r), cols(c) {}

  void add(std::uint64_t r, std::uint64_t c, std::uint32_t v) {
    if (r >= rows || c >= cols)
      throw usage_error("triplet outside matrix shape");
    v %= field.p;
    if (v) entries.push_back({r, c, v});
  }

  void normalize() {
    std::sort(entries.begin(), entries.end(),
              [](const Triplet& x, const Triplet& y) {
                return x.row != y.row ? x.row < y.row : x.col < y.col;
              });
    std::vector<Triplet> out;
    out.reserve(entries.size());
    for (const Triplet& t : entries) {
      if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
        out.back().val = field.add(out.back().val, t.val);
      } else {
        out.push_back(t);
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Triplet& t) { return t.val == 0; }),
              out.end());
    entries.swap(out);
  }

  FqMatrix to_dense(std::uint64_t cap = kDefaultEntryCap) const {
    check_entry_cap(rows, cols, cap, "densified triplets");
    FqMatrix m(field, (std::size_t)rows, (std::size_t)cols, cap);
    for (const Triplet& t : entries)
      m.at((std::size_t)t.row, (std::size_t)t.col) =
          field.add(m.at((std::size_t)t.row, (std::size_t)t.col), t.val);
    return m;
  }
};

struct RankKernelResult {
  std::size_t rank = 0;
  std::vector<FqVector> kernel_basis;  // reduced; rank + basis size == cols
};

enum class ElimPath { Auto, Generic, Packed };

namespace detail {

// GF(2) rows packed 64 columns per word.
struct BitMatrix {
  std::size_t rows = 0, cols = 0, wpr = 0;
  std::vector<std::uint64_t> w;

  BitMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), wpr((c + 63) / 64) {
    w.assign(rows * wpr, 0);
  }

  void set(std::size_t r, std::size_t c) {
    w[r * wpr + c / 64] |= std::uint64_t(1) << (c % 64);
  }
  bool get(std::size_t r, std::size_t c) const {
    return (w[r * wpr + c / 64] >> (c % 64)) & 1;
  }
  std::uint64_t* row(std::size_t r) { return w.data() + r * wpr; }
  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap_ranges(row(i), row(i) + wpr, row(j));
  }
  void xor_row(std::size_t dst, std::size_t src) {
    std::uint64_t* d = row(dst);
    const std::uint64_t* s = row(src);
    for (std::size_t k = 0; k < wpr; ++k) d[k] ^= s[k];
  }
};

inline BitMatrix pack_bits(const FqMatrix& m) {
  BitMatrix b(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c)
      if (m.at(r, c) & 1) b.set(r, c);
  return b;
}

inline BitMatrix pack_bits(const SparseTriplets& t) {
  BitMatrix b((std::size_t)t.rows, (std::size_t)t.cols);
  // duplicates must cancel mod 2, so xor instead of set
  for (const Triplet& e : t.entries)
    if (e.val & 1)
      b.w[(std::size_t)e.row * b.wpr + (std::size_t)e.col / 64] ^=
          std::uint64_t(1) << (e.col % 64);
  return b;
}

// Elimination with the fixed pivot rule: columns left to right, first row
// with a nonzero entry. full_reduce yields the reduced echelon form, whose
// kernel basis is canonical (one vector per free column, unit there).
inline RankKernelResult eliminate_packed(BitMatrix m, bool want_basis) {
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t pr = r;
    while (pr < m.rows && !m.get(pr, c)) ++pr;
    if (pr == m.rows) continue;
    m.swap_rows(r, pr);
    if (want_basis) {
      for (std::size_t i = 0; i < m.rows; ++i)
        if (i != r && m.get(i, c)) m.xor_row(i, r);
    } else {
      for (std::size_t i = r + 1; i < m.rows; ++i)
        if (m.get(i, c)) m.xor_row(i, r);
    }
    pivot_col.push_back(c);
    ++r;
  }
  RankKernelResult res;
  res.rank = pivot_col.size();
  if (want_basis) {
    std::vector<bool> is_pivot(m.cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (is_pivot[c]) continue;
      FqVector v(m.cols, 0);
      v[c] = 1;
      for (std::size_t i = 0; i < pivot_col.size(); ++i)
        if (m.get(i, c)) v[pivot_col[i]] = 1;
      res.kernel_basis.push_back(std::move(v));
    }
  }
  return res;
}

inline RankKernelResult eliminate_generic(FqMatrix m, bool want_basis) {
  const FieldSpec F = m.field;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t pr = r;
    while (pr < m.rows && m.at(pr, c) == 0) ++pr;
    if (pr == m.rows) continue;
    if (pr != r)
      for (std::size_t k = c; k < m.cols; ++k)
        std::swap(m.at(r, k), m.at(pr, k));
    std::uint32_t piv_inv = F.inv(m.at(r, c));
    if (piv_inv != 1)
      for (std::size_t k = c; k < m.cols; ++k)
        m.at(r, k) = F.mul(m.at(r, k), piv_inv);
    std::size_t lo = want_basis ? 0 : r + 1;
    for (std::size_t i = lo; i < m.rows; ++i) {
      if (i == r) continue;
      std::uint32_t fac = m.at(i, c);
      if (!fac) continue;
      for (std::size_t k = c; k < m.cols; ++k)
        m.at(i, k) = F.sub(m.at(i, k), F.mul(fac, m.at(r, k)));
    }
    pivot_col.push_back(c);
    ++r;
  }
  RankKernelResult res;
  res.rank = pivot_col.size();
  if (want_basis) {
    std::vector<bool> is_pivot(m.cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (is_pivot[c]) continue;
      FqVector v(m.cols, 0);
      v[c] = 1;
      for (std::size_t i = 0; i < pivot_col.size(); ++i)
        v[pivot_col[i]] = F.neg(m.at(i, c));
      res.kernel_basis.push_back(std::move(v));
    }
  }
  return res;
}

}  // namespace detail

// Rank plus reduced right-kernel basis. The reduced echelon form is unique,
// so both paths return the same certificate vector for vector.
inline RankKernelResult echelon_rank_kernel(const FqMatrix& m,
                                            ElimPath path = ElimPath::Auto,
                                            std::uint64_t cap = kDefaultEntryCap) {
  check_entry_cap(m.rows, m.cols, cap, "elimination");
  bool packed = (path == ElimPath::Packed) ||
                (path == ElimPath::Auto && m.field.p == 2);
  if (packed && m.field.p != 2)
    throw usage_error("packed elimination path requires characteristic 2");
  if (packed) return detail::eliminate_packed(detail::pack_bits(m), true);
  return detail::eliminate_generic(m, true);
}

inline RankKernelResult echelon_rank_kernel(const SparseTriplets& t,
                                            ElimPath path = ElimPath::Auto,
                                            std::uint64_t cap = kDefaultEntryCap) {
  check_entry_cap(t.rows, t.cols, cap, "elimination");
  bool packed = (path == ElimPath::Packed) ||
                (path == ElimPath::Auto && t.field.p == 2);
  if (packed && t.field.p != 2)
    throw usage_error("packed elimination path requires characteristic 2");
  if (packed) return detail::eliminate_packed(detail::pack_bits(t), true);
  return detail::eliminate_generic(t.to_dense(cap), true);
}

// Forward elimination only; cheaper when the kernel basis is not needed.
inline std::size_t rank_of(const FqMatrix& m, ElimPath path = ElimPath::Auto,
                           std::uint64_t cap = kDefaultEntryCap) {
  check_entry_cap(m.rows, m.cols, cap, "elimination");
  if (path == ElimPath::Packed ||
      (path == ElimPath::Auto && m.field.p == 2)) {
    if (m.field.p != 2)
      throw usage_error("packed elimination path requires characteristic 2");
    return detail::eliminate_packed(detail::pack_bits(m), false).rank;
  }
  return detail::eliminate_generic(m, false).rank;
}

inline std::size_t rank_of(const SparseTriplets& t,
                           ElimPath path = ElimPath::Auto,
                           std::uint64_t cap = kDefaultEntryCap) {
  check_entry_cap(t.rows, t.cols, cap, "elimination");
  if (path == ElimPath::Packed ||
      (path == ElimPath::Auto && t.field.p == 2)) {
    if (t.field.p != 2)
      throw usage_error("packed elimination path requires characteristic 2");
    return detail::eliminate_packed(detail::pack_bits(t), false).rank;
  }
  return detail::eliminate_generic(t.to_dense(cap), false).rank;
}

struct SubspaceDims {
  std::size_t dim_a = 0, dim_b = 0, dim_sum = 0, dim_intersection = 0;
};

// dim(A∩B) = dim A + dim B - dim(A+B); all four from three eliminations.
inline SubspaceDims subspace_dims(FieldSpec field,
                                  const std::vector<FqVector>& gens_a,
                                  const std::vector<FqVector>& gens_b,
                                  std::uint64_t cap = kDefaultEntryCap) {
  std::size_t ambient = 0;
  for (const auto& v : gens_a) ambient = std::max(ambient, v.size());
  for (const auto& v : gens_b) ambient = std::max(ambient, v.size());
  for (const auto& v : gens_a)
    if (v.size() != ambient)
      throw usage_error("subspace generators of mixed lengths");
  for (const auto& v : gens_b)
    if (v.size() != ambient)
      throw usage_error("subspace generators of mixed lengths");

  auto rank_rows = [&](const std::vector<FqVector>& rs) {
    FqMatrix m = FqMatrix::from_rows(field, rs);
    if (m.rows == 0) return std::size_t(0);
    return rank_of(m, ElimPath::Auto, cap);
  };
  SubspaceDims out;
  out.dim_a = rank_rows(gens_a);
  out.dim_b = rank_rows(gens_b);
  std::vector<FqVector> both = gens_a;
  both.insert(both.end(), gens_b.begin(), gens_b.end());
  out.dim_sum = rank_rows(both);
  out.dim_intersection = out.dim_a + out.dim_b - out.dim_sum;
  return out;
}

inline FqVector apply(const FqMatrix& m, const FqVector& v) {
  if (v.size() != m.cols) throw usage_error("apply: vector length != cols");
  FqVector out(m.rows, 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      acc += (std::uint64_t)m.at(r, c) * (v[c] % m.field.p);
      if (acc >> 60) acc %= m.field.p;
    }
    out[r] = m.field.reduce64(acc);
  }
  return out;
}

inline FqVector apply(const SparseTriplets& t, const FqVector& v) {
  if (v.size() != t.cols) throw usage_error("apply: vector length != cols");
  FqVector out((std::size_t)t.rows, 0);
  for (const Triplet& e : t.entries)
    out[(std::size_t)e.row] = t.field.add(
        out[(std::size_t)e.row],
        t.field.mul(e.val, v[(std::size_t)e.col] % t.field.p));
  return out;
}

inline bool is_zero_vector(const FqVector& v) {
  for (std::uint32_t x : v)
    if (x) return false;
  return true;
}

}  // namespace sofent
