#include <catch2/catch_amalgamated.hpp>

#include "sofent/group.hpp"
#include "sofent/group_ring.hpp"
#include "sofent/rng.hpp"

using namespace sofent;

namespace {

GroupElement lat(const GroupSpec& g, std::vector<std::int64_t> c) {
  GroupElement e = g.identity();
  e.coords = std::move(c);
  return e;
}

GroupElement word(std::vector<std::int32_t> w) {
  GroupElement e;
  e.kind = GroupKind::free_group;
  e.word = std::move(w);
  return e;
}

GroupElement fin(std::uint32_t idx) {
  GroupElement e;
  e.kind = GroupKind::finite;
  e.index = idx;
  return e;
}

GroupElement random_element(const GroupSpec& g, SeededRng& rng) {
  switch (g.kind) {
    case GroupKind::lattice: {
      GroupElement e = g.identity();
      for (auto& c : e.coords) c = (std::int64_t)rng.below(7) - 3;
      return e;
    }
    case GroupKind::free_group: {
      GroupElement e = g.identity();
      std::size_t len = rng.below(5);
      for (std::size_t i = 0; i < len; ++i) {
        std::int32_t l = (std::int32_t)(1 + rng.below(g.gen_count));
        if (rng.below(2)) l = -l;
        e = g.mul(e, word({l}));
      }
      return e;
    }
    case GroupKind::finite:
      return fin((std::uint32_t)rng.below(g.finite_size()));
  }
  return g.identity();
}

GroupRingElem random_ring_elem(const GroupSpec& g, FieldSpec f,
                               SeededRng& rng) {
  GroupRingElem r = ring_zero(f);
  std::size_t terms = rng.below(4);
  for (std::size_t i = 0; i < terms; ++i)
    r = ring_add(r, ring_term(f, random_element(g, rng),
                              (std::uint32_t)rng.below(f.p)));
  return r;
}

}  // namespace

TEST_CASE("lattice element operations") {
  GroupSpec g = GroupSpec::lattice(2);
  auto a = lat(g, {1, -2}), b = lat(g, {3, 5});
  REQUIRE(g.mul(a, b) == lat(g, {4, 3}));
  REQUIRE(g.inv(a) == lat(g, {-1, 2}));
  REQUIRE(g.mul(a, g.inv(a)) == g.identity());
  REQUIRE(g.pow(a, -3) == lat(g, {-3, 6}));
  REQUIRE(g.is_identity(g.identity()));
  REQUIRE_THROWS_AS(g.mul(a, lat(g, {1, 2, 3})), usage_error);
  REQUIRE_THROWS_AS(GroupSpec::lattice(0), usage_error);
}

TEST_CASE("free group reduction") {
  GroupSpec g = GroupSpec::free_group(2);
  // a b b^-1 a^-1 reduces to identity
  auto w = g.mul(g.mul(word({1}), word({2})), g.mul(word({-2}), word({-1})));
  REQUIRE(g.is_identity(w));
  // a b a^-1 stays reduced
  auto c = g.mul(g.mul(word({1}), word({2})), word({-1}));
  REQUIRE(c == word({1, 2, -1}));
  REQUIRE(g.inv(c) == word({1, -2, -1}));
  REQUIRE(g.pow(word({1}), 3) == word({1, 1, 1}));
  REQUIRE(g.pow(word({1}), -2) == word({-1, -1}));
  REQUIRE_THROWS_AS(g.check_element(word({3})), usage_error);
  REQUIRE_THROWS_AS(g.check_element(word({0})), usage_error);
}

TEST_CASE("cyclic group from a single cycle") {
  GroupSpec g = GroupSpec::finite_perm(3, {{1, 2, 0}});
  REQUIRE(g.finite_size() == 3);
  REQUIRE(g.is_identity(fin(0)));
  auto s = g.generator(0);
  REQUIRE(g.mul(s, g.mul(s, s)) == fin(0));
  REQUIRE(g.inv(s) == g.mul(s, s));
}

TEST_CASE("symmetric group on three points") {
  GroupSpec g = GroupSpec::finite_perm(3, {{1, 0, 2}, {1, 2, 0}});
  REQUIRE(g.finite_size() == 6);
  // noncommutative witness
  auto a = g.generator(0), b = g.generator(1);
  REQUIRE(!(g.mul(a, b) == g.mul(b, a)));
  // full associativity got checked exhaustively at construction
  for (std::uint32_t i = 0; i < 6; ++i) {
    REQUIRE(g.finite_mul(i, g.inv_table[i]) == 0);
    REQUIRE(g.finite_mul(g.inv_table[i], i) == 0);
  }
}

TEST_CASE("finite group construction rejects bad input") {
  REQUIRE_THROWS_AS(GroupSpec::finite_perm(3, {{0, 0, 1}}), usage_error);
  REQUIRE_THROWS_AS(GroupSpec::finite_perm(2, {{1, 0, 2}}), usage_error);
  // closure cap: the 4-cycle generates 4 elements, cap of 3 refuses
  REQUIRE_THROWS_AS(GroupSpec::finite_perm(4, {{1, 2, 3, 0}}, 3),
                    resource_error);
}

TEST_CASE("permutation helpers") {
  Perm p{2, 0, 1};
  REQUIRE(compose_perms(p, invert_perm(p)) == identity_perm(3));
  REQUIRE(is_permutation(p));
  REQUIRE(!is_permutation(Perm{0, 0}));
  SeededRng rng(11);
  for (int i = 0; i < 10; ++i) REQUIRE(is_permutation(random_permutation(rng, 20)));
  // same seed, same permutation
  SeededRng r1(99), r2(99);
  REQUIRE(random_permutation(r1, 50) == random_permutation(r2, 50));
}

TEST_CASE("canonical element order") {
  GroupSpec g = GroupSpec::free_group(2);
  REQUIRE(cmp_elements(g.identity(), word({1})) < 0);   // shorter first
  REQUIRE(cmp_elements(word({-1}), word({1})) < 0);     // then by letters
  REQUIRE(cmp_elements(word({1}), word({1, 1})) < 0);
  REQUIRE(cmp_elements(word({1}), word({1})) == 0);
  GroupSpec z = GroupSpec::lattice(1);
  REQUIRE(cmp_elements(lat(z, {-2}), lat(z, {1})) < 0);
  REQUIRE_THROWS_AS(cmp_elements(word({1}), lat(z, {1})), usage_error);
}

TEST_CASE("ring element canonical form") {
  GroupSpec g = GroupSpec::lattice(1);
  FieldSpec f(3);
  GroupRingElem e{f, {{lat(g, {1}), 2}, {lat(g, {0}), 1}, {lat(g, {1}), 1}}};
  ring_normalize(e);
  REQUIRE(e.terms.size() == 1);  // t-terms fold to 3 ≡ 0, drop
  REQUIRE(e.terms[0].first == lat(g, {0}));
  REQUIRE(ring_add(e, ring_neg(e)) == ring_zero(f));
  REQUIRE(is_zero(ring_scale(e, 0)));
}

TEST_CASE("ring multiplication over the integers' group") {
  GroupSpec g = GroupSpec::lattice(1);
  FieldSpec f(2);
  auto one_plus_t = ring_add(ring_one(f, g), ring_term(f, lat(g, {1}), 1));
  // (1+t)^2 = 1 + t^2 over F_2
  auto sq = ring_mul(g, one_plus_t, one_plus_t);
  REQUIRE(sq.terms.size() == 2);
  REQUIRE(sq == ring_add(ring_one(f, g), ring_term(f, lat(g, {2}), 1)));
  REQUIRE(ring_mul(g, one_plus_t, ring_zero(f)) == ring_zero(f));
  REQUIRE(ring_mul(g, ring_one(f, g), one_plus_t) == one_plus_t);
}

TEST_CASE("ring multiplication respects noncommutativity") {
  GroupSpec g = GroupSpec::free_group(2);
  FieldSpec f(3);
  auto a = ring_term(f, word({1}), 1), b = ring_term(f, word({2}), 1);
  REQUIRE(!(ring_mul(g, a, b) == ring_mul(g, b, a)));
  REQUIRE(ring_mul(g, a, b) == ring_term(f, word({1, 2}), 1));
}

TEST_CASE("star is an involutive anti-homomorphism") {
  SeededRng rng(0x57A4);
  FieldSpec f(5);
  std::vector<GroupSpec> groups;
  groups.push_back(GroupSpec::lattice(2));
  groups.push_back(GroupSpec::free_group(2));
  groups.push_back(GroupSpec::finite_perm(3, {{1, 0, 2}, {1, 2, 0}}));
  for (const GroupSpec& g : groups) {
    for (int rep = 0; rep < 15; ++rep) {
      auto x = random_ring_elem(g, f, rng), y = random_ring_elem(g, f, rng);
      REQUIRE(star(g, star(g, x)) == x);
      REQUIRE(star(g, ring_mul(g, x, y)) ==
              ring_mul(g, star(g, y), star(g, x)));
      REQUIRE(star(g, ring_add(x, y)) == ring_add(star(g, x), star(g, y)));
    }
  }
}

TEST_CASE("star on an explicit element") {
  GroupSpec g = GroupSpec::lattice(1);
  FieldSpec f(5);
  auto e = ring_add(ring_term(f, lat(g, {2}), 3), ring_one(f, g));
  auto st = star(g, e);
  REQUIRE(st == ring_add(ring_term(f, lat(g, {-2}), 3), ring_one(f, g)));
}

TEST_CASE("support enumerates canonical term order") {
  GroupSpec g = GroupSpec::lattice(1);
  FieldSpec f(2);
  auto e = ring_add(ring_term(f, lat(g, {3}), 1), ring_term(f, lat(g, {-1}), 1));
  auto s = support(e);
  REQUIRE(s.size() == 2);
  REQUIRE(s[0] == lat(g, {-1}));
  REQUIRE(s[1] == lat(g, {3}));
  REQUIRE(support(ring_zero(f)).empty());
}

TEST_CASE("ring matrices, star, block diagonal") {
  GroupSpec g = GroupSpec::free_group(2);
  FieldSpec f(2);
  GroupRingMatrix m(f, 1, 2);
  m.at(0, 0) = ring_term(f, word({1}), 1);
  m.at(0, 1) = ring_add(ring_one(f, g), ring_term(f, word({2}), 1));
  auto st = matrix_star(g, m);
  REQUIRE(st.rows == 2);
  REQUIRE(st.cols == 1);
  REQUIRE(st.at(0, 0) == ring_term(f, word({-1}), 1));
  REQUIRE(st.at(1, 0) == ring_add(ring_one(f, g), ring_term(f, word({-2}), 1)));
  // star of star returns the transpose of the transpose
  REQUIRE(matrix_star(g, st) == m);

  GroupRingMatrix d = block_diag(m, st);
  REQUIRE(d.rows == 3);
  REQUIRE(d.cols == 3);
  REQUIRE(d.at(0, 0) == m.at(0, 0));
  REQUIRE(d.at(1, 2) == st.at(0, 0));
  REQUIRE(is_zero(d.at(0, 2)));

  auto sup = matrix_support(m);
  REQUIRE(sup.size() == 3);  // e, a, b
}

TEST_CASE("mixed fields are rejected") {
  FieldSpec f2(2), f3(3);
  GroupSpec g = GroupSpec::lattice(1);
  REQUIRE_THROWS_AS(ring_add(ring_one(f2, g), ring_one(f3, g)), usage_error);
}
