#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/entropy.hpp"
#include "sofent/field.hpp"
#include "sofent/group.hpp"

// Brute-force reference implementations. Everything here enumerates states
// directly and never calls the elimination code for the quantity it checks,
// so a bug in the fast path cannot hide in the slow path.

namespace sofent::oracle {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp,
                                 std::uint64_t guard, const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > guard / base)
      throw resource_error(std::string(what) + ": state space exceeds guard " +
                           std::to_string(guard));
    r *= base;
  }
  return r;
}

// |ker M| by walking all q^cols vectors with an odometer; each step touches
// only the columns whose digits changed.
inline std::uint64_t brute_kernel_count(const FqMatrix& m,
                                        std::uint64_t guard = kOracleStateGuard) {
  const std::uint32_t q = m.field.p;
  std::uint64_t total = checked_pow(q, m.cols, guard, "kernel enumeration");
  std::vector<std::uint32_t> digits(m.cols, 0);
  FqVector image(m.rows, 0);
  std::uint64_t count = 0;
  for (std::uint64_t step = 0;; ++step) {
    if (is_zero_vector(image)) ++count;
    if (step + 1 == total) break;
    // increment mixed-radix counter, updating image by column deltas
    std::size_t c = 0;
    while (true) {
      if (digits[c] + 1 < q) {
        digits[c] += 1;
        for (std::size_t r = 0; r < m.rows; ++r)
          image[r] = m.field.add(image[r], m.at(r, c));
        break;
      }
      // digit wraps q-1 -> 0: delta is -(q-1) ≡ +1, one more column add
      digits[c] = 0;
      for (std::size_t r = 0; r < m.rows; ++r)
        image[r] = m.field.add(image[r], m.at(r, c));
      c += 1;
    }
  }
  return count;
}

// Size of the subgroup of Π Z/m_i generated by the given vectors, by closure
// under addition from 0 (finite order makes negation redundant).
inline std::uint64_t subgroup_closure_size(
    const std::vector<std::uint32_t>& moduli,
    const std::vector<std::vector<std::uint32_t>>& gens,
    std::uint64_t guard = kOracleStateGuard) {
  for (std::uint32_t m : moduli)
    if (m == 0) throw usage_error("zero modulus in ambient group");
  for (const auto& g : gens)
    if (g.size() != moduli.size())
      throw usage_error("generator length does not match ambient rank");

  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::vector<std::uint32_t>> queue;
  std::vector<std::uint32_t> zero(moduli.size(), 0);
  seen.insert(zero);
  queue.push_back(zero);
  while (!queue.empty()) {
    std::vector<std::uint32_t> x = std::move(queue.back());
    queue.pop_back();
    for (const auto& g : gens) {
      std::vector<std::uint32_t> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = (x[i] + g[i] % moduli[i]) % moduli[i];
      if (seen.insert(y).second) {
        if (seen.size() > guard)
          throw resource_error("subgroup closure exceeds guard " +
                               std::to_string(guard));
        queue.push_back(std::move(y));
      }
    }
  }
  return seen.size();
}

// A finite abelian group X = Π Z/m_i with a finite group acting by
// automorphisms, and a designated observable coordinate block. The
// pseudometric is 1 when two points differ somewhere in that block, else 0.
struct FiniteActionModel {
  std::vector<std::uint32_t> moduli;
  std::shared_ptr<const GroupSpec> group;
  std::vector<Perm> action;  // one permutation of the X enumeration per element
  std::vector<std::size_t> observable;
};

inline std::uint64_t model_states(const FiniteActionModel& m,
                                  std::uint64_t guard = kOracleStateGuard) {
  std::uint64_t total = 1;
  for (std::uint32_t mod : m.moduli) {
    if (mod == 0) throw usage_error("zero modulus in ambient group");
    if (total > guard / mod)
      throw resource_error("model state space exceeds guard " +
                           std::to_string(guard));
    total *= mod;
  }
  return total;
}

inline std::vector<std::uint32_t> x_vector(const FiniteActionModel& m,
                                           std::uint64_t idx) {
  std::vector<std::uint32_t> v(m.moduli.size());
  for (std::size_t i = 0; i < m.moduli.size(); ++i) {
    v[i] = (std::uint32_t)(idx % m.moduli[i]);
    idx /= m.moduli[i];
  }
  return v;
}

inline std::uint64_t x_index(const FiniteActionModel& m,
                             const std::vector<std::uint32_t>& v) {
  std::uint64_t idx = 0, place = 1;
  for (std::size_t i = 0; i < m.moduli.size(); ++i) {
    idx += (std::uint64_t)(v[i] % m.moduli[i]) * place;
    place *= m.moduli[i];
  }
  return idx;
}

// 1 iff the two points differ in the observable block.
inline std::uint32_t rho(const FiniteActionModel& m, std::uint64_t x,
                         std::uint64_t y) {
  if (x == y) return 0;
  std::vector<std::uint32_t> a = x_vector(m, x), b = x_vector(m, y);
  for (std::size_t i : m.observable)
    if (a[i] != b[i]) return 1;
  return 0;
}

inline std::uint64_t x_add(const FiniteActionModel& m, std::uint64_t x,
                           std::uint64_t y) {
  std::vector<std::uint32_t> a = x_vector(m, x), b = x_vector(m, y);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % m.moduli[i];
  return x_index(m, a);
}

inline void validate_model(const FiniteActionModel& m,
                           std::uint64_t guard = kOracleStateGuard) {
  if (!m.group || m.group->kind != GroupKind::finite)
    throw usage_error("action model needs a finite group");
  const std::uint64_t total = model_states(m, guard);
  const std::size_t order = m.group->finite_size();
  if ((unsigned __int128)order * total * total > ((unsigned __int128)1 << 26))
    throw resource_error("model too large for exhaustive validation");
  if (m.action.size() != order)
    throw usage_error("need one action table per group element");
  for (const Perm& p : m.action)
    if (p.size() != total || !is_permutation(p))
      throw usage_error("action table is not a permutation of the states");
  for (std::size_t i : m.observable)
    if (i >= m.moduli.size())
      throw usage_error("observable coordinate out of range");
  if (m.observable.empty())
    throw usage_error("observable block must be nonempty");

  for (std::uint64_t v = 0; v < total; ++v)
    if (m.action[0][v] != v)
      throw usage_error("identity element must act trivially");
  for (std::uint32_t s = 0; s < order; ++s)
    for (std::uint32_t t = 0; t < order; ++t) {
      std::uint32_t st = m.group->finite_mul(s, t);
      for (std::uint64_t v = 0; v < total; ++v)
        if (m.action[s][m.action[t][v]] != m.action[st][v])
          throw usage_error("action tables do not compose with the group");
    }
  // addition table once, then automorphism additivity exhaustively
  std::vector<std::uint32_t> add((std::size_t)(total * total));
  for (std::uint64_t x = 0; x < total; ++x)
    for (std::uint64_t y = 0; y < total; ++y)
      add[(std::size_t)(x * total + y)] = (std::uint32_t)x_add(m, x, y);
  for (std::uint32_t s = 0; s < order; ++s) {
    if (m.action[s][0] != 0)
      throw usage_error("group action must fix the zero element");
    for (std::uint64_t x = 0; x < total; ++x)
      for (std::uint64_t y = x; y < total; ++y)
        if (m.action[s][add[(std::size_t)(x * total + y)]] !=
            add[(std::size_t)((std::uint64_t)m.action[s][x] * total +
                              m.action[s][y])])
          throw usage_error("group must act by automorphisms");
  }
}

// Translates of the observable block separate points.
inline bool dynamically_generating(const FiniteActionModel& m,
                                   std::uint64_t guard = kOracleStateGuard) {
  const std::uint64_t total = model_states(m, guard);
  const std::size_t order = m.group ? m.group->finite_size() : 1;
  if ((unsigned __int128)order * total * total > ((unsigned __int128)1 << 26))
    throw resource_error("model too large for exhaustive separation check");
  for (std::uint64_t x = 0; x < total; ++x)
    for (std::uint64_t y = x + 1; y < total; ++y) {
      bool split = false;
      for (const Perm& p : m.action)
        if (rho(m, p[x], p[y])) {
          split = true;
          break;
        }
      if (!split) return false;
    }
  return true;
}

// X = (Z/q)^Γ with (s·x)(t) = x(s^-1 t); the observable coordinate is the
// value at the identity. This is the dual of the free module of rank one.
inline FiniteActionModel make_full_shift_dual(
    std::uint32_t q, std::shared_ptr<const GroupSpec> group,
    std::uint64_t guard = kOracleStateGuard) {
  if (!group || group->kind != GroupKind::finite)
    throw usage_error("full shift model needs a finite group");
  if (q < 2) throw usage_error("need a modulus of at least 2");
  const std::size_t order = group->finite_size();
  FiniteActionModel m;
  m.moduli.assign(order, q);
  m.group = group;
  m.observable = {0};
  const std::uint64_t total = model_states(m, guard);
  for (std::uint32_t s = 0; s < order; ++s) {
    std::uint32_t si = group->inv_table[s];
    Perm p(total);
    std::vector<std::uint32_t> y(order);
    for (std::uint64_t x = 0; x < total; ++x) {
      std::vector<std::uint32_t> xv = x_vector(m, x);
      for (std::uint32_t t = 0; t < order; ++t)
        y[t] = xv[group->finite_mul(si, t)];
      p[x] = (std::uint32_t)x_index(m, y);
    }
    m.action.push_back(std::move(p));
  }
  validate_model(m, guard);
  return m;
}

struct MapSpaceConfig {
  std::vector<GroupElement> window;
  Rational delta{0, 1};    // approximate equivariance tolerance
  Rational epsilon{1, 2};  // separation scale
};

struct MapSpaceResult {
  std::uint64_t map_count = 0;
  std::uint64_t n_eps = 0;
  double estimate = 0.0;
};

// Enumerates every map [d] -> X, keeps the approximately equivariant ones,
// then counts the largest pairwise separated family. The pseudometric only
// takes values 0 and 1, so a maximum separated family below scale 1 picks
// exactly one map per distinct observable trace; at scale >= 1 nothing is
// separated. Comparisons against delta and epsilon stay in integers.
template <class Approx>
MapSpaceResult map_space_entropy(const FiniteActionModel& model,
                                 const Approx& approx,
                                 const MapSpaceConfig& cfg,
                                 std::uint64_t guard = kOracleStateGuard) {
  validate_model(model, guard);
  if (model.group.get() != approx.group.get())
    throw usage_error("model and approximation use different groups");
  if (cfg.epsilon.num <= 0) throw usage_error("separation scale must be positive");
  if (cfg.delta.num < 0) throw usage_error("tolerance must be nonnegative");
  const std::uint64_t d = approx.degree();
  const std::uint64_t nx = model_states(model, guard);
  checked_pow(nx, d, guard, "map enumeration");

  std::vector<const Perm*> acts;
  std::vector<Perm> sigmas;
  for (const auto& s : cfg.window) {
    model.group->check_element(s);
    acts.push_back(&model.action[s.index]);
    sigmas.push_back(approx.image(s));
  }
  std::vector<std::vector<std::uint32_t>> obs(nx);
  for (std::uint64_t x = 0; x < nx; ++x) {
    std::vector<std::uint32_t> v = x_vector(model, x);
    for (std::size_t i : model.observable) obs[x].push_back(v[i]);
  }

  MapSpaceResult res;
  std::set<std::vector<std::uint32_t>> traces;
  std::vector<std::uint32_t> phi((std::size_t)d, 0);
  while (true) {
    bool keep = true;
    for (std::size_t k = 0; k < cfg.window.size() && keep; ++k) {
      std::uint64_t mismatches = 0;
      for (std::uint64_t v = 0; v < d; ++v) {
        std::uint64_t lhs = (*acts[k])[phi[v]];
        std::uint64_t rhs = phi[sigmas[k][v]];
        if (lhs != rhs && obs[lhs] != obs[rhs]) ++mismatches;
      }
      keep = fraction_leq_square(mismatches, d, cfg.delta);
    }
    if (keep) {
      ++res.map_count;
      std::vector<std::uint32_t> trace;
      for (std::uint64_t v = 0; v < d; ++v)
        for (std::uint32_t o : obs[phi[v]]) trace.push_back(o);
      traces.insert(std::move(trace));
    }
    std::size_t c = 0;
    while (c < d && (std::uint64_t)phi[c] + 1 == nx) phi[c++] = 0;
    if (c == d) break;
    phi[c] += 1;
  }

  res.n_eps = rational_geq_one(cfg.epsilon) ? (res.map_count ? 1 : 0)
                                            : traces.size();
  res.estimate =
      res.n_eps ? std::log((double)res.n_eps) / (double)d : 0.0;
  return res;
}

struct PairingVerdict {
  std::uint64_t group_order = 0;
  std::uint64_t total_states = 0;     // q^{n|Γ|}
  std::uint64_t rank_rf = 0;          // rank of right multiplication by f
  std::uint64_t module_size = 0;      // q^{n|Γ|} / q^{rank}
  std::uint64_t dual_kernel_size = 0; // enumerated |ker of right mult by f*|
  bool pass = false;
};

// Right multiplication by f on the regular representation: the module
// cardinality comes from the rank side, the dual kernel from enumeration;
// the pairing identifies the two counts.
inline PairingVerdict pairing_check(const PrincipalPresentation& pres,
                                    std::uint64_t guard = kOracleStateGuard) {
  const auto& g = *pres.group;
  if (g.kind != GroupKind::finite)
    throw usage_error("pairing check needs a finite group");
  const std::uint64_t order = g.finite_size();
  if (order > 12)
    throw resource_error("pairing check limited to groups of order 12");
  const std::uint64_t n = pres.n(), m = pres.m();
  const std::uint32_t q = pres.field.p;

  PairingVerdict v;
  v.group_order = order;
  v.total_states = checked_pow(q, n * order, guard, "pairing enumeration");

  // rows (j,h) range over (FΓ)^n, cols (i,g) over (FΓ)^m; column (i,g) is
  // the expansion of g·f_i*
  FqMatrix rf(pres.field, (std::size_t)(n * order), (std::size_t)(m * order));
  for (std::uint64_t i = 0; i < m; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      for (const auto& [s, c] :
           pres.f.at((std::size_t)i, (std::size_t)j).terms)
        for (std::uint32_t gg = 0; gg < order; ++gg) {
          std::size_t row = (std::size_t)(j * order + g.finite_mul(gg, s.index));
          std::size_t col = (std::size_t)(i * order + gg);
          rf.at(row, col) = pres.field.add(rf.at(row, col), c);
        }
  v.rank_rf = rank_of(rf);
  v.module_size = 1;
  for (std::uint64_t k = 0; k < n * order - v.rank_rf; ++k) v.module_size *= q;

  // kernel matrix K with K·vec(x) = vec(x f*): output coords (i,g), input
  // coords (j, g·u^{-1}) for terms u of (f*)_{ji}
  FqMatrix kf(pres.field, (std::size_t)(m * order), (std::size_t)(n * order));
  for (std::uint64_t j = 0; j < n; ++j)
    for (std::uint64_t i = 0; i < m; ++i)
      for (const auto& [u, c] :
           pres.f_star.at((std::size_t)j, (std::size_t)i).terms)
        for (std::uint32_t gg = 0; gg < order; ++gg) {
          std::size_t row = (std::size_t)(i * order + gg);
          std::size_t col = (std::size_t)(
              j * order + g.finite_mul(gg, g.inv_table[u.index]));
          kf.at(row, col) = pres.field.add(kf.at(row, col), c);
        }
  v.dual_kernel_size = brute_kernel_count(kf, guard);
  v.pass = v.dual_kernel_size == v.module_size;
  return v;
}

}  // namespace sofent::oracle
