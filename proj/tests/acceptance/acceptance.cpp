// Acceptance gate. Each numbered criterion prints exactly one PASS/FAIL
// line; the process exits 0 only when every line passed. The sofent CLI
// binary path is argv[1] (used by the determinism criterion).
//
// Tolerances are pinned here:
//   kClosedFormTol  absolute slack for comparing a product-form estimate
//                   against a quotient-form closed value (last-ulp rounding)
//   kMapSpaceTol    map-space estimate vs kernel-based value
//   kBoxAgreeTol    box infimum vs sofic estimate, in nats
// Everything else is exact: integer identities or bitwise double equality.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sofent/entropy.hpp"
#include "sofent/oracle.hpp"
#include "sofent/parse.hpp"
#include "sofent/patch.hpp"

using namespace sofent;

namespace {

constexpr double kClosedFormTol = 1e-14;
constexpr double kMapSpaceTol = 1e-12;
constexpr double kBoxAgreeTol = 0.05;

std::string g_cli;
std::vector<EntropyRecord> g_records;  // fed by several criteria, checked once

int g_failures = 0;

void report(int idx, const char* name, bool ok) {
  std::printf("[%s] %2d %s\n", ok ? "PASS" : "FAIL", idx, name);
  if (!ok) ++g_failures;
}

void detail(const std::string& msg) {
  std::fprintf(stderr, "       %s\n", msg.c_str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

GroupElement lat(std::shared_ptr<const GroupSpec> g,
                 std::vector<std::int64_t> coords) {
  GroupElement e = g->identity();
  e.coords = std::move(coords);
  return e;
}

Ladder ladder_for(std::shared_ptr<const GroupSpec> group,
                  std::uint64_t seed) {
  switch (group->kind) {
    case GroupKind::lattice:
      if (group->gen_count == 1)
        return make_lattice_ladder(group, {4, 16, 64, 256, 1024, 4096});
      return make_lattice_ladder(group, {2, 8, 32, 64});
    case GroupKind::free_group:
      return make_free_ladder(group, {16, 256, 1024, 4096}, seed);
    case GroupKind::finite: {
      std::vector<std::uint32_t> copies = {1, 8, 128};
      copies.push_back((std::uint32_t)(4096 / group->finite_size()));
      return make_finite_ladder(group, copies);
    }
  }
  throw usage_error("unreachable");
}

// exercises the kernel gap bound: inverses of the generator act as the
// identity, so half the window pairs land off the good set
struct BrokenInverseApprox {
  std::shared_ptr<const GroupSpec> group;
  std::uint64_t d = 4;

  std::uint64_t degree() const { return d; }
  Perm image(const GroupElement& e) const {
    group->check_element(e);
    Perm cycle = {1, 2, 3, 0};
    Perm acc = identity_perm(4);
    for (std::int32_t letter : e.word)
      if (letter > 0) acc = compose_perms(cycle, acc);
    return acc;
  }
};

// ---------------------------------------------------------------------- 1

void criterion_free_modules() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::vector<std::string> groups = {"Z", "Z^2", "free:2", "Z/6"};
  for (const auto& gt : groups) {
    auto group = parse_group(gt);
    Ladder lad = ladder_for(group, 11);
    for (std::uint64_t q : {2, 3, 5}) {
      FieldSpec field(q);
      for (std::uint64_t n = 1; n <= 3; ++n) {
        PrincipalPresentation pres = present_free(field, group, n);
        EntropyEstimate est = principal_estimates(pres, lad);
        double expect = field.log_q() * (double)n;
        for (const EntropyRecord& r : est.records) {
          if (r.h_top_est != expect || r.h_alg_est != expect || !r.ok())
            ok = false;
          g_records.push_back(r);
        }
      }
    }
  }
  double dt = seconds_since(t0);
  if (dt >= 5.0) {
    ok = false;
    detail("free-module sweep took " + std::to_string(dt) + " s");
  }
  report(1, "free modules give exactly n log q at every rung in under 5 s",
         ok);
}

// ---------------------------------------------------------------------- 2

void criterion_finite_group_equality() {
  bool ok = true;
  struct Case {
    const char* group;
    const char* f;
  };
  for (const Case& c : {Case{"Z/2", "1+s"}, Case{"Z/3", "1+s"},
                        Case{"sym:3", "1+g1"}}) {
    auto group = parse_group(c.group);
    FieldSpec field(2);
    GroupRingElem f = parse_ring_expression(c.f, field, group);
    PrincipalPresentation pres = present_element(field, group, f);
    SoficApprox reg = build_finite_regular(group);
    EntropyRecord r = principal_record(pres, reg);
    g_records.push_back(r);
    oracle::PairingVerdict v = oracle::pairing_check(pres);

    std::uint64_t order = group->finite_size();
    bool case_ok = r.ok() && v.pass && r.d == order;
    // the pairing size must be the kernel count behind the estimate
    std::uint64_t qdim = 1;
    for (std::uint64_t i = 0; i < r.dim_ker_sigma_bar_fstar; ++i) qdim *= 2;
    case_ok = case_ok && v.module_size == qdim;
    case_ok = case_ok && r.h_top_est == r.h_alg_est;
    double closed = std::log((double)v.module_size) / (double)order;
    case_ok = case_ok && std::fabs(r.h_top_est - closed) <= kClosedFormTol;
    if (!case_ok) {
      ok = false;
      detail(std::string("group ") + c.group + " f=" + c.f);
    }
  }
  report(2,
         "finite regular representations: both estimates equal log|M|/|G|, "
         "pairing agrees",
         ok);
}

// ---------------------------------------------------------------------- 3

void criterion_cyclic_convergence() {
  bool ok = true;
  auto z = parse_group("Z");
  FieldSpec field(2);
  std::vector<std::uint32_t> sides;
  for (std::uint32_t n = 4; n <= 256; ++n) sides.push_back(n);
  Ladder lad = make_lattice_ladder(z, sides);
  struct Case {
    const char* f;
    std::uint64_t degspan;
  };
  for (const Case& c : {Case{"1+t", 1}, Case{"1+t+t^2", 2}}) {
    GroupRingElem f = parse_ring_expression(c.f, field, z);
    PrincipalPresentation pres = present_element(field, z, f);
    EntropyEstimate est = principal_estimates(pres, lad);
    for (const EntropyRecord& r : est.records) {
      double bound = field.log_q() * ((double)c.degspan / (double)r.d);
      if (r.dim_ker_sigma_bar_fstar > c.degspan || r.h_top_est > bound ||
          !r.ok())
        ok = false;
      g_records.push_back(r);
    }
  }
  report(3,
         "cyclic quotients: kernel dimension stays below the degree span "
         "for every N in 4..256",
         ok);
}

// ---------------------------------------------------------------------- 4

void criterion_three_dot_bound() {
  bool ok = true;
  auto z2 = parse_group("Z^2");
  FieldSpec field(2);
  GroupRingElem f = parse_ring_expression("1+u+v", field, z2);
  PrincipalPresentation pres = present_element(field, z2, f);
  std::vector<std::uint32_t> sides;
  for (std::uint32_t n = 2; n <= 64; ++n) sides.push_back(n);
  Ladder lad = make_lattice_ladder(z2, sides);
  EntropyEstimate est = principal_estimates(pres, lad);
  for (std::size_t i = 0; i < est.records.size(); ++i) {
    const EntropyRecord& r = est.records[i];
    std::uint64_t n = sides[i];
    double bound = field.log_q() * (1.0 / (double)n);
    if (r.dim_ker_sigma_bar_fstar > n || r.h_top_est > bound || !r.ok())
      ok = false;
    g_records.push_back(r);
  }
  // exhaustive kernel counts at the two smallest tori
  for (std::uint32_t n : {2u, 3u}) {
    SoficApprox a = build_lattice_quotient(z2, n);
    AssembledMaps maps = assemble_maps(pres, a);
    FqMatrix dense = maps.sigma_bar_fstar.to_dense();
    std::uint64_t dim = (std::uint64_t)dense.cols - rank_of(dense);
    std::uint64_t qdim = 1;
    for (std::uint64_t i = 0; i < dim; ++i) qdim *= 2;
    if (oracle::brute_kernel_count(dense) != qdim) ok = false;
  }
  report(4,
         "three-dot polynomial on torus quotients: kernel dimension at most "
         "N, confirmed by enumeration at N=2,3",
         ok);
}

// ---------------------------------------------------------------------- 5

void criterion_kernel_gap() {
  bool ok = !g_records.empty();
  for (const EntropyRecord& r : g_records) {
    std::uint64_t a = r.dim_ker_sigma_f, b = r.dim_ker_sigma_bar_fstar;
    std::uint64_t gap = a > b ? a - b : b - a;
    if (!r.gap_ok || !r.duality_ok) ok = false;
    if (r.good_complement == 0 && gap != 0) ok = false;
  }

  // a deliberately broken approximation keeps the inequality but loses the
  // kernel equality, so the bound is not vacuous
  auto fr1 = std::make_shared<const GroupSpec>(GroupSpec::free_group(1));
  FieldSpec field(2);
  GroupRingElem f = parse_ring_expression("1+a^-1", field, fr1);
  PrincipalPresentation pres = present_element(field, fr1, f);
  BrokenInverseApprox bad{fr1};
  EntropyRecord r = principal_record(pres, bad);
  std::uint64_t gap = r.dim_ker_sigma_f > r.dim_ker_sigma_bar_fstar
                          ? r.dim_ker_sigma_f - r.dim_ker_sigma_bar_fstar
                          : r.dim_ker_sigma_bar_fstar - r.dim_ker_sigma_f;
  if (!(r.good_complement == 4 && gap > 0 && gap <= r.good_complement &&
        r.gap_ok && r.duality_ok && !r.peters_ok))
    ok = false;

  report(5,
         "kernel gap bounded by the bad-set size everywhere, with equality "
         "when the bad set is empty",
         ok);
}

// ---------------------------------------------------------------------- 6

void criterion_rank_additivity() {
  bool ok = true;
  FieldSpec field(2);
  SeededRng rng(2026);

  auto random_element = [&](std::shared_ptr<const GroupSpec> g) {
    GroupRingElem f = ring_one(field, *g);
    std::size_t extra = 1 + rng.below(3);
    for (std::size_t k = 0; k < extra; ++k) {
      GroupElement e = g->identity();
      if (g->kind == GroupKind::lattice) {
        e.coords[0] = (std::int64_t)rng.below(7) - 3;
      } else {
        std::size_t len = 1 + rng.below(2);
        for (std::size_t j = 0; j < len; ++j) {
          std::int32_t letter = 1 + (std::int32_t)rng.below(2);
          if (rng.below(2)) letter = -letter;
          GroupElement step;
          step.kind = GroupKind::free_group;
          step.word = {letter};
          e = g->mul(e, step);
        }
      }
      f = ring_add(f, ring_term(field, e, 1));
    }
    return f;
  };

  auto z = parse_group("Z");
  auto fr = parse_group("free:2");
  Ladder zlad = make_lattice_ladder(z, {4, 8, 16});
  Ladder flad = make_free_ladder(fr, {16, 32}, 77);
  for (int pair = 0; pair < 20; ++pair) {
    auto group = pair < 10 ? z : fr;
    const Ladder& lad = pair < 10 ? zlad : flad;
    PrincipalPresentation p1 =
        present_element(field, group, random_element(group));
    PrincipalPresentation p2 =
        present_element(field, group, random_element(group));
    AdditionReport rep = addition_check(p1, p2, lad);
    if (!rep.all_ok()) {
      ok = false;
      detail("additivity failed on pair " + std::to_string(pair));
    }
  }
  report(6,
         "block-diagonal rank additivity holds per rung on 20 seeded pairs",
         ok);
}

// ---------------------------------------------------------------------- 7

void criterion_oracle_equivalence() {
  bool ok = true;
  SeededRng rng(515);

  // kernel counts on random matrices
  for (int rep = 0; rep < 100; ++rep) {
    std::uint64_t q = rep % 3 == 0 ? 2 : rep % 3 == 1 ? 3 : 5;
    FieldSpec field(q);
    std::size_t cols = 1 + rng.below(q == 2 ? 6 : 4);
    std::size_t rows = 1 + rng.below(5);
    std::vector<FqVector> rws;
    for (std::size_t i = 0; i < rows; ++i) {
      FqVector v(cols);
      for (auto& x : v) x = (std::uint32_t)rng.below(q);
      rws.push_back(v);
    }
    FqMatrix m = FqMatrix::from_rows(field, rws);
    std::uint64_t dim = (std::uint64_t)cols - rank_of(m);
    std::uint64_t qdim = 1;
    for (std::uint64_t i = 0; i < dim; ++i) qdim *= q;
    if (oracle::brute_kernel_count(m) != qdim) ok = false;
  }

  // closure sizes on the two stock relative constructions
  {
    FieldSpec field(2);
    auto z = parse_group("Z");
    GroupElement t = lat(z, {1});

    PartialModulePatch free4 = make_free_patch(field, z, 4);
    SoficApprox a4 = build_lattice_quotient(z, 4);
    RelativeEstimateRecord rec =
        relative_estimate(restrict_window(free4, {t}), a4);
    std::vector<std::uint32_t> moduli(16, 2);
    std::vector<std::vector<std::uint32_t>> gens;
    for (std::uint32_t v = 0; v < 4; ++v) {
      std::vector<std::uint32_t> g(16, 0);
      g[v * 4 + 0] = 1;
      g[((v + 1) % 4) * 4 + 1] = 1;
      gens.push_back(g);
    }
    std::uint64_t qdim = 1;
    for (std::uint64_t i = 0; i < rec.dim_s; ++i) qdim *= 2;
    if (oracle::subgroup_closure_size(moduli, gens) != qdim) ok = false;

    GroupRingElem f = parse_ring_expression("1+t", field, z);
    PartialModulePatch quot = make_quotient1d_patch(f, z);
    SoficApprox a8 = build_lattice_quotient(z, 8);
    RelativeEstimateRecord rec8 =
        relative_estimate(restrict_window(quot, {t}), a8);
    std::vector<std::uint32_t> mod8(8, 2);
    std::vector<std::vector<std::uint32_t>> gens8;
    for (std::uint32_t v = 0; v < 8; ++v) {
      std::vector<std::uint32_t> g(8, 0);
      g[v] = 1;
      g[(v + 1) % 8] = (g[(v + 1) % 8] + 1) % 2;
      if (g != std::vector<std::uint32_t>(8, 0)) gens8.push_back(g);
    }
    std::uint64_t qdim8 = 1;
    for (std::uint64_t i = 0; i < rec8.dim_s; ++i) qdim8 *= 2;
    if (oracle::subgroup_closure_size(mod8, gens8) != qdim8) ok = false;
  }

  // map counting against the kernel-based value on the two-point shift
  {
    auto c2 = parse_group("Z/2");
    FieldSpec field(2);
    oracle::FiniteActionModel model = oracle::make_full_shift_dual(2, c2);
    SoficApprox reg = build_finite_regular(c2);
    oracle::MapSpaceConfig cfg;
    for (std::uint32_t i = 0; i < 2; ++i) {
      GroupElement e;
      e.kind = GroupKind::finite;
      e.index = i;
      cfg.window.push_back(e);
    }
    oracle::MapSpaceResult res = oracle::map_space_entropy(model, reg, cfg);
    PrincipalPresentation free1 = present_free(field, c2, 1);
    EntropyRecord r = principal_record(free1, reg);
    if (res.n_eps != 4) ok = false;
    if (std::fabs(res.estimate - std::log(2.0)) > kMapSpaceTol) ok = false;
    if (std::fabs(res.estimate - r.h_top_est) > kMapSpaceTol) ok = false;
  }

  report(7,
         "exhaustive oracles match rank-based counts, closures, and the "
         "two-point map space",
         ok);
}

// ---------------------------------------------------------------------- 8

void criterion_cyclic_submodule_bound() {
  bool ok = true;
  auto z = parse_group("Z");
  FieldSpec field(2);
  Ladder zlad = make_lattice_ladder(z, {4, 8, 16, 32, 64});

  // every nonzero polynomial with support inside 7 consecutive powers
  for (std::uint32_t mask = 1; mask < 128; ++mask) {
    GroupRingElem f = ring_zero(field);
    for (std::uint32_t bit = 0; bit < 7; ++bit)
      if (mask & (1u << bit))
        f = ring_add(f, ring_term(field, lat(z, {(std::int64_t)bit}), 1));
    ZeroDivisorReport rep = zero_divisor_probe(f, z, zlad);
    if (!rep.bound_ok_largest) {
      ok = false;
      detail("mask " + std::to_string(mask));
    }
  }

  auto fr = parse_group("free:2");
  Ladder flad = make_free_ladder(fr, {64, 128, 256}, 99);
  SeededRng rng(1234);
  std::vector<GroupRingElem> frees;
  frees.push_back(parse_ring_expression("1+a+b", field, fr));
  for (int rep = 0; rep < 19; ++rep) {
    GroupRingElem f = ring_one(field, *fr);
    std::size_t extra = 1 + rng.below(3);
    for (std::size_t k = 0; k < extra; ++k) {
      GroupElement e = fr->identity();
      std::size_t len = 1 + rng.below(2);
      for (std::size_t j = 0; j < len; ++j) {
        std::int32_t letter = 1 + (std::int32_t)rng.below(2);
        if (rng.below(2)) letter = -letter;
        GroupElement step;
        step.kind = GroupKind::free_group;
        step.word = {letter};
        e = fr->mul(e, step);
      }
      f = ring_add(f, ring_term(field, e, 1));
    }
    frees.push_back(f);
  }
  for (std::size_t i = 0; i < frees.size(); ++i) {
    if (support(frees[i]).size() > 4) continue;
    ZeroDivisorReport rep = zero_divisor_probe(frees[i], fr, flad);
    if (!rep.bound_ok_largest) {
      ok = false;
      detail("free instance " + std::to_string(i));
    }
  }

  report(8,
         "cyclic submodule entropy clears its support-weighted floor at the "
         "largest rung",
         ok);
}

// ---------------------------------------------------------------------- 9

void criterion_box_vs_sofic() {
  bool ok = true;
  auto z = parse_group("Z");
  FieldSpec field(2);
  std::vector<std::uint32_t> boxes = {2, 4, 8, 16, 32, 64};

  // free rank-one module: both sides sit at log 2
  PartialModulePatch free64 = make_free_patch(field, z, 64);
  FolnerReport fol = folner_entropy(free64, boxes);
  PrincipalPresentation free1 = present_free(field, z, 1);
  SoficApprox a256 = build_lattice_quotient(z, 256);
  EntropyRecord r = principal_record(free1, a256);
  if (std::fabs(fol.infimum - r.h_top_est) > kBoxAgreeTol) {
    ok = false;
    detail("free module: box " + std::to_string(fol.infimum) + " vs sofic " +
           std::to_string(r.h_top_est));
  }

  // the finite quotient by 1+t: both sides vanish at scale
  GroupRingElem f = parse_ring_expression("1+t", field, z);
  PartialModulePatch quot = make_quotient1d_patch(f, z);
  FolnerReport folq = folner_entropy(quot, boxes);
  PrincipalPresentation pres = present_element(field, z, f);
  EntropyRecord rq = principal_record(pres, a256);
  if (std::fabs(folq.infimum - rq.h_top_est) > kBoxAgreeTol) {
    ok = false;
    detail("quotient: box " + std::to_string(folq.infimum) + " vs sofic " +
           std::to_string(rq.h_top_est));
  }

  report(9, "box infimum at L=64 agrees with the sofic estimate at N=256",
         ok);
}

// --------------------------------------------------------------------- 10

void criterion_relative_monotonicity() {
  bool ok = true;
  auto z = parse_group("Z");
  FieldSpec field(2);
  SoficApprox a8 = build_lattice_quotient(z, 8);
  PartialModulePatch patch = make_free_patch(field, z, 8);
  GroupElement t = lat(z, {1});
  GroupElement t2 = lat(z, {2});
  extend_window_lattice(patch, t2);

  RelativeEstimateRecord small_f =
      relative_estimate(restrict_window(patch, {t}), a8);
  RelativeEstimateRecord big_f =
      relative_estimate(restrict_window(patch, {t, t2}), a8);
  if (big_f.value > small_f.value) ok = false;

  PartialModulePatch bigger_a = restrict_window(patch, {t});
  FqVector delta1((std::size_t)patch.D, 0);
  delta1[1] = 1;
  bigger_a.gens_a.push_back(delta1);
  RelativeEstimateRecord big_a = relative_estimate(bigger_a, a8);
  if (big_a.value < small_f.value) ok = false;

  PartialModulePatch no_b = restrict_window(patch, {t});
  no_b.gens_b.clear();
  RelativeEstimateRecord rb = relative_estimate(no_b, a8);
  double expect = field.log_q() * (double)rb.dim_a;
  if (rb.value != expect) ok = false;
  if (!small_f.range_ok || !big_f.range_ok || !big_a.range_ok || !rb.range_ok)
    ok = false;

  report(10,
         "relative estimate: larger window never raises it, larger source "
         "never lowers it, empty target is exact",
         ok);
}

// --------------------------------------------------------------------- 11

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism_performance() {
  bool ok = true;

  if (g_cli.empty()) {
    ok = false;
    detail("no CLI binary path on the command line");
  } else {
    auto run = [&](const std::string& threads, const std::string& fmt,
                   const std::string& out) {
      std::string cmd = "SOFENT_THREADS=" + threads + " '" + g_cli +
                        "' entropy principal --group free:2 --q 2 "
                        "--f '1+a+b' --ladder d=64,128,256 --seed 7 "
                        "--format " + fmt + " --out " + out;
      return std::system(cmd.c_str()) == 0;
    };
    for (const char* fmt : {"csv", "json"}) {
      std::string f1 = std::string("acceptance_rep_t1.") + fmt;
      std::string f4 = std::string("acceptance_rep_t4.") + fmt;
      if (!run("1", fmt, f1) || !run("4", fmt, f4)) {
        ok = false;
        detail(std::string("CLI run failed for format ") + fmt);
        continue;
      }
      std::string b1 = slurp(f1), b4 = slurp(f4);
      if (b1.empty() || b1 != b4) {
        ok = false;
        detail(std::string("reports differ across thread counts (") + fmt +
               ")");
      }
      std::remove(f1.c_str());
      std::remove(f4.c_str());
    }
  }

  auto z = parse_group("Z");
  FieldSpec field(2);
  GroupRingElem f =
      parse_ring_expression("1+t+t^3+t^7+t^11", field, z);
  PrincipalPresentation pres = present_element(field, z, f);
  SoficApprox big = build_lattice_quotient(z, 4096);
  auto t0 = std::chrono::steady_clock::now();
  EntropyRecord r = principal_record(pres, big);
  double dt = seconds_since(t0);
  if (!(r.d == 4096 && r.ok())) ok = false;
  if (dt >= 10.0) {
    ok = false;
    detail("degree 4096 kernel took " + std::to_string(dt) + " s");
  }

  report(11,
         "identical seeds give byte-identical reports at any thread count; "
         "degree 4096 kernel under 10 s",
         ok);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  criterion_free_modules();
  criterion_finite_group_equality();
  criterion_cyclic_convergence();
  criterion_three_dot_bound();
  criterion_kernel_gap();
  criterion_rank_additivity();
  criterion_oracle_equivalence();
  criterion_cyclic_submodule_bound();
  criterion_box_vs_sofic();
  criterion_relative_monotonicity();
  criterion_determinism_performance();

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
