#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sofent/common.hpp"
#include "sofent/group.hpp"
#include "sofent/rng.hpp"

namespace sofent {

// exact_homomorphism: images multiply on the nose for every pair.
// word_extension: only generator images are data; an arbitrary element is
// evaluated along its canonical factorization, with sigma(s^-1) defined as
// sigma(s)^-1. That convention makes inverse images match inverted images
// everywhere by construction.
enum class ApproxKind { exact_homomorphism, word_extension };

struct SoficApprox {
  std::shared_ptr<const GroupSpec> group;
  std::uint64_t d = 0;
  ApproxKind kind = ApproxKind::exact_homomorphism;

  // lattice quotient: translation on (Z/N)^r
  std::uint32_t lattice_n = 0;
  // finite regular: disjoint copies of the translation action
  std::uint32_t copies = 0;
  // word extension: one image per generator
  std::vector<Perm> gen_images;
  std::vector<Perm> gen_images_inv;

  std::uint64_t degree() const { return d; }

  Perm image(const GroupElement& s) const {
    group->check_element(s);
    switch (group->kind) {
      case GroupKind::lattice: {
        if (lattice_n) {
          // direct translation on base-N digit vectors
          const std::uint32_t N = lattice_n;
          const std::uint32_t r = group->gen_count;
          std::vector<std::uint32_t> shift(r);
          for (std::uint32_t j = 0; j < r; ++j) {
            std::int64_t k = s.coords[j] % (std::int64_t)N;
            if (k < 0) k += N;
            shift[j] = (std::uint32_t)k;
          }
          Perm p(d);
          for (std::uint64_t v = 0; v < d; ++v) {
            std::uint64_t rest = v, out = 0, place = 1;
            for (std::uint32_t j = 0; j < r; ++j) {
              std::uint32_t digit = (std::uint32_t)(rest % N);
              rest /= N;
              out += (std::uint64_t)((digit + shift[j]) % N) * place;
              place *= N;
            }
            p[v] = (std::uint32_t)out;
          }
          return p;
        }
        // word extension over a lattice: fixed generator order with exponents
        Perm acc = identity_perm(d);
        for (std::uint32_t j = 0; j < group->gen_count; ++j)
          acc = compose_perms(acc, gen_power(j, s.coords[j]));
        return acc;
      }
      case GroupKind::free_group: {
        Perm acc = identity_perm(d);
        for (std::int32_t l : s.word) {
          const Perm& step = l > 0 ? gen_images[(std::size_t)l - 1]
                                   : gen_images_inv[(std::size_t)(-l) - 1];
          acc = compose_perms(acc, step);
        }
        return acc;
      }
      case GroupKind::finite: {
        const std::size_t n = group->finite_size();
        Perm p(d);
        for (std::uint32_t b = 0; b < copies; ++b)
          for (std::size_t j = 0; j < n; ++j)
            p[b * n + j] =
                (std::uint32_t)(b * n + group->finite_mul(s.index, (std::uint32_t)j));
        return p;
      }
    }
    throw usage_error("unreachable group kind");
  }

 private:
  Perm gen_power(std::uint32_t j, std::int64_t k) const {
    const Perm& base = k >= 0 ? gen_images[j] : gen_images_inv[j];
    std::uint64_t reps = k >= 0 ? (std::uint64_t)k : (std::uint64_t)(-k);
    Perm acc = identity_perm(d);
    for (std::uint64_t i = 0; i < reps; ++i) acc = compose_perms(acc, base);
    return acc;
  }
};

// Translation action of Z^r on the discrete torus (Z/N)^r; a genuine
// homomorphism, d = N^r.
inline SoficApprox build_lattice_quotient(
    std::shared_ptr<const GroupSpec> group, std::uint32_t N,
    std::uint64_t point_cap = kDefaultEntryCap) {
  if (!group || group->kind != GroupKind::lattice)
    throw usage_error("lattice quotient requires a lattice group");
  if (N == 0) throw usage_error("quotient side must be positive");
  std::uint64_t d = 1;
  for (std::uint32_t j = 0; j < group->gen_count; ++j) {
    if (d > point_cap / N)
      throw resource_error("lattice quotient point count exceeds cap");
    d *= N;
  }
  SoficApprox a;
  a.group = std::move(group);
  a.d = d;
  a.kind = ApproxKind::exact_homomorphism;
  a.lattice_n = N;
  return a;
}

inline SoficApprox build_lattice_quotient(std::uint32_t r, std::uint32_t N,
                                          std::uint64_t point_cap = kDefaultEntryCap) {
  return build_lattice_quotient(
      std::make_shared<const GroupSpec>(GroupSpec::lattice(r)), N, point_cap);
}

// Left translation of a finite group on `copies` disjoint copies of itself.
inline SoficApprox build_finite_regular(std::shared_ptr<const GroupSpec> group,
                                        std::uint32_t copies = 1) {
  if (!group || group->kind != GroupKind::finite)
    throw usage_error("regular approximation requires a finite group");
  if (copies == 0) throw usage_error("need at least one copy");
  SoficApprox a;
  a.d = (std::uint64_t)group->finite_size() * copies;
  a.group = std::move(group);
  a.kind = ApproxKind::exact_homomorphism;
  a.copies = copies;
  return a;
}

// Independent uniform generator images from the seeded stream.
inline SoficApprox build_free_random(std::shared_ptr<const GroupSpec> group,
                                     std::uint64_t d, std::uint64_t seed) {
  if (!group || group->kind != GroupKind::free_group)
    throw usage_error("random word-extension requires a free group");
  if (d == 0) throw usage_error("degree must be positive");
  SoficApprox a;
  a.d = d;
  a.kind = ApproxKind::word_extension;
  SeededRng rng(seed);
  for (std::uint32_t j = 0; j < group->gen_count; ++j) {
    a.gen_images.push_back(random_permutation(rng, (std::size_t)d));
    a.gen_images_inv.push_back(invert_perm(a.gen_images.back()));
  }
  a.group = std::move(group);
  return a;
}

struct DefectPair {
  GroupElement s, t;
  std::uint64_t count = 0;  // points violating (mult) or agreeing (sep)
};

// Exact per-pair counts over a finite window; fractions have denominator d.
struct DefectReport {
  std::uint64_t d = 0;
  std::vector<GroupElement> window;
  std::vector<DefectPair> mult;  // #{v : sigma(s)(sigma(t)(v)) != sigma(st)(v)}
  std::vector<DefectPair> sep;   // s != t, #{v : sigma(s)(v) == sigma(t)(v)}

  double max_mult_fraction() const {
    std::uint64_t m = 0;
    for (const auto& p : mult) m = std::max(m, p.count);
    return d ? (double)m / (double)d : 0.0;
  }
  double max_sep_fraction() const {
    std::uint64_t m = 0;
    for (const auto& p : sep) m = std::max(m, p.count);
    return d ? (double)m / (double)d : 0.0;
  }
};

template <class Approx>
DefectReport defect_report(const Approx& approx,
                           const std::vector<GroupElement>& window) {
  DefectReport rep;
  rep.d = approx.degree();
  rep.window = window;
  const GroupSpec& g = *approx.group;
  std::vector<Perm> images;
  images.reserve(window.size());
  for (const auto& s : window) images.push_back(approx.image(s));
  for (std::size_t i = 0; i < window.size(); ++i) {
    for (std::size_t j = 0; j < window.size(); ++j) {
      Perm prod_image = approx.image(g.mul(window[i], window[j]));
      std::uint64_t bad = 0;
      for (std::uint64_t v = 0; v < rep.d; ++v)
        if (images[i][images[j][v]] != prod_image[v]) ++bad;
      rep.mult.push_back({window[i], window[j], bad});
      if (i != j) {
        std::uint64_t agree = 0;
        for (std::uint64_t v = 0; v < rep.d; ++v)
          if (images[i][v] == images[j][v]) ++agree;
        rep.sep.push_back({window[i], window[j], agree});
      }
    }
  }
  return rep;
}

// Points where the image of each inverse is the inverse of the image, over
// a given support set.
struct GoodSet {
  std::vector<GroupElement> support;
  std::vector<std::uint8_t> member;
  std::uint64_t complement_size = 0;
};

template <class Approx>
GoodSet good_set(const Approx& approx,
                 const std::vector<GroupElement>& support_elems) {
  GoodSet w;
  w.support = support_elems;
  w.member.assign((std::size_t)approx.degree(), 1);
  const GroupSpec& g = *approx.group;
  for (const auto& s : support_elems) {
    Perm ps = approx.image(s);
    Perm psi = approx.image(g.inv(s));
    // v is good for s when sigma(s^-1)(v) = sigma(s)^-1(v), i.e. sigma(s)
    // sends sigma(s^-1)(v) back to v
    for (std::uint64_t v = 0; v < approx.degree(); ++v)
      if (ps[psi[v]] != v) w.member[v] = 0;
  }
  for (std::uint8_t m : w.member)
    if (!m) ++w.complement_size;
  return w;
}

// Strictly increasing degrees; rung contents depend only on (master seed, d).
struct Ladder {
  std::shared_ptr<const GroupSpec> group;
  std::uint64_t master_seed = 0;
  std::vector<SoficApprox> rungs;
  std::string description;
};

inline void check_increasing(const Ladder& l) {
  if (l.rungs.empty()) throw usage_error("ladder needs at least one rung");
  for (std::size_t i = 1; i < l.rungs.size(); ++i)
    if (l.rungs[i].d <= l.rungs[i - 1].d)
      throw usage_error("ladder degrees must be strictly increasing");
}

inline Ladder make_lattice_ladder(std::shared_ptr<const GroupSpec> group,
                                  const std::vector<std::uint32_t>& sides,
                                  std::uint64_t point_cap = kDefaultEntryCap) {
  Ladder l;
  l.group = group;
  for (std::uint32_t n : sides)
    l.rungs.push_back(build_lattice_quotient(group, n, point_cap));
  l.description = "lattice-quotient";
  check_increasing(l);
  return l;
}

inline Ladder make_free_ladder(std::shared_ptr<const GroupSpec> group,
                               const std::vector<std::uint64_t>& degrees,
                               std::uint64_t master_seed) {
  Ladder l;
  l.group = group;
  l.master_seed = master_seed;
  for (std::uint64_t d : degrees)
    l.rungs.push_back(
        build_free_random(group, d, SeededRng::mix(master_seed, d)));
  l.description = "free-random";
  check_increasing(l);
  return l;
}

inline Ladder make_finite_ladder(std::shared_ptr<const GroupSpec> group,
                                 const std::vector<std::uint32_t>& copies) {
  Ladder l;
  l.group = group;
  for (std::uint32_t c : copies)
    l.rungs.push_back(build_finite_regular(group, c));
  l.description = "finite-regular";
  check_increasing(l);
  return l;
}

}  // namespace sofent
