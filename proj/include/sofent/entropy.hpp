#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/field.hpp"
#include "sofent/group_ring.hpp"
#include "sofent/sofic.hpp"

namespace sofent {

// Module presented by an m x n matrix of ring elements acting on row
// vectors: the quotient of the rank-n free module by the row span of f.
// m = 0 presents the free module itself.
struct PrincipalPresentation {
  FieldSpec field;
  std::shared_ptr<const GroupSpec> group;
  GroupRingMatrix f;       // m x n
  GroupRingMatrix f_star;  // n x m
  std::vector<GroupElement> support;

  PrincipalPresentation(FieldSpec fld, std::shared_ptr<const GroupSpec> g,
                        GroupRingMatrix presentation)
      : field(fld), group(std::move(g)), f(std::move(presentation)) {
    if (f.cols == 0)
      throw usage_error("presentation needs at least one module generator");
    if (f.field.p != field.p)
      throw usage_error("presentation matrix over a different field");
    for (const auto& entry : f.e)
      for (const auto& t : entry.terms) group->check_element(t.first);
    f_star = matrix_star(*group, f);
    support = matrix_support(f);
  }

  std::size_t m() const { return f.rows; }
  std::size_t n() const { return f.cols; }
};

inline PrincipalPresentation present_element(FieldSpec field,
                                             std::shared_ptr<const GroupSpec> g,
                                             const GroupRingElem& f) {
  GroupRingMatrix m(field, 1, 1);
  m.at(0, 0) = f;
  return PrincipalPresentation(field, std::move(g), std::move(m));
}

inline PrincipalPresentation present_free(FieldSpec field,
                                          std::shared_ptr<const GroupSpec> g,
                                          std::size_t n) {
  GroupRingMatrix m(field, 0, n);
  return PrincipalPresentation(field, std::move(g), std::move(m));
}

struct AssembledMaps {
  SparseTriplets sigma_f;          // dm x dn
  SparseTriplets sigma_bar_f;      // dn x dm
  SparseTriplets sigma_bar_fstar;  // dm x dn
};

// Blocks of sigma(f) are sums of coefficient-weighted permutation matrices
// of the entry supports; sigma_bar transposes each permutation; the starred
// map uses images of inverses. When inverse images invert images exactly the
// first and third matrices coincide row for row.
template <class Approx>
AssembledMaps assemble_maps(const PrincipalPresentation& pres,
                            const Approx& approx,
                            std::uint64_t cap = kDefaultEntryCap) {
  const std::uint64_t d = approx.degree();
  const std::uint64_t m = pres.m(), n = pres.n();
  check_entry_cap(d * m, d * n, cap, "assembled maps");

  AssembledMaps out;
  out.sigma_f = SparseTriplets(pres.field, d * m, d * n);
  out.sigma_bar_f = SparseTriplets(pres.field, d * n, d * m);
  out.sigma_bar_fstar = SparseTriplets(pres.field, d * m, d * n);

  for (std::uint64_t i = 0; i < m; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) {
      for (const auto& [s, c] : pres.f.at((std::size_t)i, (std::size_t)j).terms) {
        Perm ps = approx.image(s);
        for (std::uint64_t w = 0; w < d; ++w) {
          out.sigma_f.add(i * d + ps[w], j * d + w, c);
          out.sigma_bar_f.add(j * d + w, i * d + ps[w], c);
        }
        Perm psi = approx.image(approx.group->inv(s));
        for (std::uint64_t v = 0; v < d; ++v)
          out.sigma_bar_fstar.add(i * d + v, j * d + psi[v], c);
      }
    }
  }
  out.sigma_f.normalize();
  out.sigma_bar_f.normalize();
  out.sigma_bar_fstar.normalize();
  return out;
}

struct EntropyRecord {
  std::uint64_t d = 0;
  std::uint64_t dim_ker_sigma_f = 0;
  std::uint64_t dim_ker_sigma_bar_fstar = 0;
  std::uint64_t rank_sigma_bar_f = 0;
  std::uint64_t good_complement = 0;
  double h_top_est = 0.0;
  double h_alg_est = 0.0;
  double gap_bound = 0.0;
  bool gap_ok = false;      // |dim ker sigma(f) - dim ker sigma_bar(f*)| <= n |W^c|
  bool duality_ok = false;  // dim ker sigma(f) = dn - rank sigma_bar(f)
  bool peters_ok = false;   // dim ker sigma_bar(f*) + rank sigma_bar(f) = dn
  bool range_ok = false;    // estimates inside [0, n log q]

  bool ok() const { return gap_ok && duality_ok && peters_ok && range_ok; }
};

template <class Approx>
EntropyRecord principal_record(const PrincipalPresentation& pres,
                               const Approx& approx,
                               std::uint64_t cap = kDefaultEntryCap) {
  const std::uint64_t d = approx.degree();
  const std::uint64_t n = pres.n();
  AssembledMaps maps = assemble_maps(pres, approx, cap);

  EntropyRecord r;
  r.d = d;
  // three independent eliminations; the identities across them are asserted,
  // not assumed
  std::uint64_t rank_sigma_f = rank_of(maps.sigma_f, ElimPath::Auto, cap);
  r.dim_ker_sigma_f = d * n - rank_sigma_f;
  r.rank_sigma_bar_f = rank_of(maps.sigma_bar_f, ElimPath::Auto, cap);
  std::uint64_t rank_sbfs = rank_of(maps.sigma_bar_fstar, ElimPath::Auto, cap);
  r.dim_ker_sigma_bar_fstar = d * n - rank_sbfs;

  GoodSet w = good_set(approx, pres.support);
  r.good_complement = w.complement_size;

  const double logq = pres.field.log_q();
  r.h_top_est = logq * ((double)r.dim_ker_sigma_bar_fstar / (double)d);
  r.h_alg_est = logq * ((double)(d * n - r.rank_sigma_bar_f) / (double)d);
  r.gap_bound = logq * ((double)(n * r.good_complement) / (double)d);

  std::uint64_t gap = r.dim_ker_sigma_f > r.dim_ker_sigma_bar_fstar
                          ? r.dim_ker_sigma_f - r.dim_ker_sigma_bar_fstar
                          : r.dim_ker_sigma_bar_fstar - r.dim_ker_sigma_f;
  r.gap_ok = gap <= n * r.good_complement;
  r.duality_ok = r.dim_ker_sigma_f == d * n - r.rank_sigma_bar_f;
  r.peters_ok = r.dim_ker_sigma_bar_fstar + r.rank_sigma_bar_f == d * n;
  r.range_ok = r.dim_ker_sigma_bar_fstar <= d * n &&
               r.rank_sigma_bar_f <= d * n && r.h_top_est >= 0.0 &&
               r.h_alg_est >= 0.0;
  return r;
}

struct EntropyEstimate {
  std::string ladder_description;
  std::vector<EntropyRecord> records;
  // max/min over the last half of the ladder, the finite stand-in for the
  // limsup/liminf a single run cannot take
  double h_top_tail_max = 0.0, h_top_tail_min = 0.0;
  double h_alg_tail_max = 0.0, h_alg_tail_min = 0.0;

  bool all_ok() const {
    for (const auto& r : records)
      if (!r.ok()) return false;
    return !records.empty();
  }
};

inline void fill_tails(EntropyEstimate& est) {
  if (est.records.empty()) return;
  std::size_t start = est.records.size() / 2;
  est.h_top_tail_max = est.h_top_tail_min = est.records[start].h_top_est;
  est.h_alg_tail_max = est.h_alg_tail_min = est.records[start].h_alg_est;
  for (std::size_t i = start; i < est.records.size(); ++i) {
    est.h_top_tail_max = std::max(est.h_top_tail_max, est.records[i].h_top_est);
    est.h_top_tail_min = std::min(est.h_top_tail_min, est.records[i].h_top_est);
    est.h_alg_tail_max = std::max(est.h_alg_tail_max, est.records[i].h_alg_est);
    est.h_alg_tail_min = std::min(est.h_alg_tail_min, est.records[i].h_alg_est);
  }
}

inline EntropyEstimate principal_estimates(const PrincipalPresentation& pres,
                                           const Ladder& ladder,
                                           std::uint64_t cap = kDefaultEntryCap) {
  check_increasing(ladder);
  EntropyEstimate est;
  est.ladder_description = ladder.description;
  est.records.resize(ladder.rungs.size());
  run_indexed(ladder.rungs.size(), [&](std::size_t i) {
    est.records[i] = principal_record(pres, ladder.rungs[i], cap);
  });
  fill_tails(est);
  return est;
}

struct AdditionRecord {
  std::uint64_t d = 0;
  std::uint64_t rank_1 = 0, rank_2 = 0, rank_diag = 0;
  double h_1 = 0.0, h_2 = 0.0, h_diag = 0.0;
  std::int64_t rank_residual = 0;  // rank_diag - rank_1 - rank_2
  bool ok() const { return rank_residual == 0; }
};

struct AdditionReport {
  std::vector<AdditionRecord> records;
  bool all_ok() const {
    for (const auto& r : records)
      if (!r.ok()) return false;
    return !records.empty();
  }
};

// Rank additivity of the block-diagonal join, the per-rung form of entropy
// additivity in short exact sequences that split.
inline AdditionReport addition_check(const PrincipalPresentation& p1,
                                     const PrincipalPresentation& p2,
                                     const Ladder& ladder,
                                     std::uint64_t cap = kDefaultEntryCap) {
  if (p1.field.p != p2.field.p)
    throw usage_error("addition check requires one common field");
  if (p1.group.get() != p2.group.get())
    throw usage_error("addition check requires one common group");
  check_increasing(ladder);
  PrincipalPresentation diag(p1.field, p1.group,
                             block_diag(p1.f, p2.f));
  AdditionReport rep;
  rep.records.resize(ladder.rungs.size());
  run_indexed(ladder.rungs.size(), [&](std::size_t i) {
    const auto& rung = ladder.rungs[i];
    AdditionRecord r;
    r.d = rung.d;
    r.rank_1 = rank_of(assemble_maps(p1, rung, cap).sigma_bar_f,
                       ElimPath::Auto, cap);
    r.rank_2 = rank_of(assemble_maps(p2, rung, cap).sigma_bar_f,
                       ElimPath::Auto, cap);
    r.rank_diag = rank_of(assemble_maps(diag, rung, cap).sigma_bar_f,
                          ElimPath::Auto, cap);
    const double logq = p1.field.log_q();
    r.h_1 = logq * ((double)(rung.d * p1.n() - r.rank_1) / (double)rung.d);
    r.h_2 = logq * ((double)(rung.d * p2.n() - r.rank_2) / (double)rung.d);
    r.h_diag = logq * ((double)(rung.d * (p1.n() + p2.n()) - r.rank_diag) /
                        (double)rung.d);
    r.rank_residual = (std::int64_t)r.rank_diag - (std::int64_t)r.rank_1 -
                      (std::int64_t)r.rank_2;
    rep.records[i] = r;
  });
  return rep;
}

struct ZeroDivisorRecord {
  std::uint64_t d = 0;
  std::uint64_t rank = 0;          // rank of sigma_bar(f)
  double h_quotient = 0.0;         // log q * (d - rank) / d
  double h_cyclic_submodule = 0.0; // log q * rank / d
  bool bound_ok = false;           // rank * (2|supp|+1)^2 >= d, exact
};

struct ZeroDivisorReport {
  std::size_t support_size = 0;
  double bound = 0.0;  // log q / (2|supp|+1)^2
  std::vector<ZeroDivisorRecord> records;
  double quotient_tail_max = 0.0, quotient_tail_min = 0.0;
  bool bound_ok_all = false;
  bool bound_ok_largest = false;
  std::string note;
};

// For nonzero f, the submodule generated by f inside the free rank-1 module
// carries at least log q / (2|supp f|+1)^2 of entropy; per rung that reads
// rank * (2|supp|+1)^2 >= d, checked in integers. A vanishing quotient tail
// is numerical evidence that right multiplication by f is injective, and is
// reported as evidence only.
inline ZeroDivisorReport zero_divisor_probe(const GroupRingElem& f,
                                            std::shared_ptr<const GroupSpec> group,
                                            const Ladder& ladder,
                                            std::uint64_t cap = kDefaultEntryCap) {
  if (is_zero(f)) throw usage_error("zero-divisor probe needs a nonzero element");
  check_increasing(ladder);
  PrincipalPresentation pres = present_element(f.field, group, f);
  ZeroDivisorReport rep;
  rep.support_size = f.terms.size();
  const std::uint64_t weight =
      (2 * (std::uint64_t)rep.support_size + 1) *
      (2 * (std::uint64_t)rep.support_size + 1);
  rep.bound = f.field.log_q() / (double)weight;

  rep.records.resize(ladder.rungs.size());
  run_indexed(ladder.rungs.size(), [&](std::size_t i) {
    const auto& rung = ladder.rungs[i];
    ZeroDivisorRecord r;
    r.d = rung.d;
    r.rank = rank_of(assemble_maps(pres, rung, cap).sigma_bar_f,
                     ElimPath::Auto, cap);
    const double logq = f.field.log_q();
    r.h_quotient = logq * ((double)(rung.d - r.rank) / (double)rung.d);
    r.h_cyclic_submodule = logq * ((double)r.rank / (double)rung.d);
    r.bound_ok = r.rank * weight >= rung.d;
    rep.records[i] = r;
  });

  rep.bound_ok_all = true;
  for (const auto& r : rep.records) rep.bound_ok_all &= r.bound_ok;
  rep.bound_ok_largest = rep.records.back().bound_ok;
  std::size_t start = rep.records.size() / 2;
  rep.quotient_tail_max = rep.quotient_tail_min = rep.records[start].h_quotient;
  for (std::size_t i = start; i < rep.records.size(); ++i) {
    rep.quotient_tail_max = std::max(rep.quotient_tail_max, rep.records[i].h_quotient);
    rep.quotient_tail_min = std::min(rep.quotient_tail_min, rep.records[i].h_quotient);
  }
  rep.note =
      "quotient tail near zero is evidence consistent with injective right "
      "multiplication, not a proof";
  return rep;
}

}  // namespace sofent
