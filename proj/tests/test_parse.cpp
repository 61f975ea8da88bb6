#include <catch2/catch_amalgamated.hpp>

#include "sofent/parse.hpp"
#include "sofent/report.hpp"

using namespace sofent;

TEST_CASE("group expressions") {
  REQUIRE(parse_group("Z")->kind == GroupKind::lattice);
  REQUIRE(parse_group("Z")->gen_count == 1);
  REQUIRE(parse_group("Z^2")->gen_count == 2);
  REQUIRE(parse_group(" Z^3 ")->gen_count == 3);
  REQUIRE(parse_group("free:2")->kind == GroupKind::free_group);
  REQUIRE(parse_group("free(2)")->gen_count == 2);
  REQUIRE(parse_group("finite:Z/6")->finite_size() == 6);
  REQUIRE(parse_group("Z/6")->finite_size() == 6);
  REQUIRE(parse_group("sym:3")->finite_size() == 6);
  REQUIRE(parse_group("finite:sym:4")->finite_size() == 24);

  REQUIRE_THROWS_AS(parse_group(""), usage_error);
  REQUIRE_THROWS_AS(parse_group("Z^7"), usage_error);
  REQUIRE_THROWS_AS(parse_group("Z^0"), usage_error);
  REQUIRE_THROWS_AS(parse_group("free:9"), usage_error);
  REQUIRE_THROWS_AS(parse_group("Z/0"), usage_error);
  REQUIRE_THROWS_AS(parse_group("quaternion"), usage_error);
  REQUIRE_THROWS_AS(parse_group("Z/abc"), usage_error);
}

TEST_CASE("ring expressions over the integers") {
  FieldSpec F2(2), F5(5);
  auto z = parse_group("Z");

  GroupRingElem f = parse_ring_expression("1 + t", F2, z);
  REQUIRE(f.terms.size() == 2);
  GroupElement t = z->identity();
  t.coords[0] = 1;
  REQUIRE((f == ring_add(ring_one(F2, *z), ring_term(F2, t, 1))));

  f = parse_ring_expression("1 + t + t^-1", F2, z);
  REQUIRE(f.terms.size() == 3);

  f = parse_ring_expression("2t^3 + 1", F5, z);
  REQUIRE(f.terms.size() == 2);
  GroupElement t3 = z->identity();
  t3.coords[0] = 3;
  REQUIRE((f == ring_add(ring_one(F5, *z), ring_term(F5, t3, 2))));

  // coefficients are residues; 5 vanishes mod 5, 3 is 1 mod 2
  REQUIRE(parse_ring_expression("5t", F5, z).terms.empty());
  f = parse_ring_expression("3", F2, z);
  REQUIRE((f == ring_one(F2, *z)));

  // juxtaposition multiplies: t t = t^2
  f = parse_ring_expression("t t", F2, z);
  GroupElement t2 = z->identity();
  t2.coords[0] = 2;
  REQUIRE((f == ring_term(F2, t2, 1)));

  REQUIRE(parse_ring_expression("", F2, z).terms.empty());
  REQUIRE(parse_ring_expression("  ", F2, z).terms.empty());
}

TEST_CASE("ring expressions over higher rank and free groups") {
  FieldSpec F2(2);
  auto z2 = parse_group("Z^2");
  GroupRingElem f = parse_ring_expression("1 + u + v", F2, z2);
  REQUIRE(f.terms.size() == 3);

  f = parse_ring_expression("u v^-1", F2, z2);
  REQUIRE(f.terms.size() == 1);
  REQUIRE(f.terms[0].first.coords == std::vector<std::int64_t>{1, -1});

  auto fr = parse_group("free:2");
  f = parse_ring_expression("1 + a + b", F2, fr);
  REQUIRE(f.terms.size() == 3);

  f = parse_ring_expression("a b^-1 a", F2, fr);
  REQUIRE(f.terms.size() == 1);
  REQUIRE(f.terms[0].first.word == std::vector<std::int32_t>{1, -2, 1});

  // a a^-1 collapses to the identity
  f = parse_ring_expression("a a^-1", F2, fr);
  REQUIRE((f == ring_one(F2, *fr)));

  f = parse_ring_expression("a^3 b^-2", F2, fr);
  REQUIRE(f.terms[0].first.word ==
          std::vector<std::int32_t>{1, 1, 1, -2, -2});
}

TEST_CASE("ring expressions over finite groups") {
  FieldSpec F2(2), F7(7);
  auto c3 = parse_group("Z/3");
  GroupRingElem f = parse_ring_expression("1 + s", F2, c3);
  REQUIRE(f.terms.size() == 2);
  REQUIRE(f.terms[1].first.index == 1);

  // s^2 lands on the third table element, s^3 is trivial
  f = parse_ring_expression("s^2", F2, c3);
  REQUIRE(f.terms[0].first.index == 2);
  f = parse_ring_expression("s^3", F2, c3);
  REQUIRE(f.terms[0].first.index == 0);
  f = parse_ring_expression("g1 g1", F2, c3);
  REQUIRE(f.terms[0].first.index == 2);
  f = parse_ring_expression("s^-1", F2, c3);
  REQUIRE(f.terms[0].first.index == 2);

  auto c6 = parse_group("Z/6");
  f = parse_ring_expression("1 + 3g2 + 2 g5", F7, c6);
  REQUIRE(f.terms.size() == 3);
  REQUIRE_THROWS_AS(parse_ring_expression("g6", F2, c6), usage_error);
}

TEST_CASE("expression errors carry positions") {
  FieldSpec F2(2);
  auto z = parse_group("Z");
  auto z2 = parse_group("Z^2");

  REQUIRE_THROWS_WITH(parse_ring_expression("1 +", F2, z),
                      Catch::Matchers::ContainsSubstring("position"));
  REQUIRE_THROWS_AS(parse_ring_expression("q", F2, z), usage_error);
  REQUIRE_THROWS_AS(parse_ring_expression("t^", F2, z), usage_error);
  REQUIRE_THROWS_AS(parse_ring_expression("t", F2, z2), usage_error);
  REQUIRE_THROWS_AS(parse_ring_expression("w", F2, z2), usage_error);
  REQUIRE_THROWS_AS(parse_ring_expression("1 & t", F2, z), usage_error);
  REQUIRE_THROWS_AS(parse_ring_expression("+ t", F2, z), usage_error);
}

TEST_CASE("matrix expressions") {
  FieldSpec F2(2);
  auto z = parse_group("Z");
  GroupRingMatrix m = parse_ring_matrix("1+t, 0; t, 1", F2, z);
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 2);
  REQUIRE(m.at(0, 0).terms.size() == 2);
  REQUIRE(m.at(0, 1).terms.empty());
  REQUIRE(m.at(1, 1).terms.size() == 1);
  REQUIRE_THROWS_AS(parse_ring_matrix("1, t; 1", F2, z), usage_error);
}

TEST_CASE("serialization round trips") {
  FieldSpec F2(2), F5(5), F7(7);
  auto z = parse_group("Z");
  auto z2 = parse_group("Z^2");
  auto fr = parse_group("free:2");
  auto c6 = parse_group("Z/6");

  auto round = [](const FieldSpec& fld, std::shared_ptr<const GroupSpec> g,
                  const std::string& text) {
    GroupRingElem f = parse_ring_expression(text, fld, g);
    std::string s = serialize_ring_element(*g, f);
    GroupRingElem f2 = parse_ring_expression(s, fld, g);
    REQUIRE((f == f2));
    // serialization is idempotent
    REQUIRE(serialize_ring_element(*g, f2) == s);
  };

  round(F2, z, "1 + t");
  round(F5, z, "t^-3 + 2t^2 + 4");
  round(F2, z2, "1 + u + v");
  round(F5, z2, "u^2 v^-1 + 3u");
  round(F2, fr, "1 + a + b");
  round(F2, fr, "a b^-1 a + b^2");
  round(F7, c6, "1 + 3g2 + 2g5");
  round(F2, z, "");

  GroupRingMatrix m = parse_ring_matrix("1+t, 0; t, 1", F2, z);
  std::string s = serialize_ring_matrix(*z, m);
  GroupRingMatrix m2 = parse_ring_matrix(s, F2, z);
  REQUIRE(m2.rows == 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      REQUIRE(m.at(i, j) == m2.at(i, j));
}

TEST_CASE("ladder expressions") {
  LadderSpec s = parse_ladder_spec("N=4..64");
  REQUIRE(s.kind == LadderSpec::Kind::lattice_sides);
  REQUIRE(s.values == std::vector<std::uint64_t>{4, 8, 16, 32, 64});

  s = parse_ladder_spec("N=4..64:12");
  REQUIRE(s.values == std::vector<std::uint64_t>{4, 16, 28, 40, 52, 64});

  s = parse_ladder_spec("N=10..13");
  REQUIRE(s.values == std::vector<std::uint64_t>{10, 13});

  s = parse_ladder_spec("N=4..4");
  REQUIRE(s.values == std::vector<std::uint64_t>{4});

  s = parse_ladder_spec("d=4,16,64");
  REQUIRE(s.kind == LadderSpec::Kind::degrees);
  REQUIRE(s.values == std::vector<std::uint64_t>{4, 16, 64});

  s = parse_ladder_spec("copies=1..8");
  REQUIRE(s.kind == LadderSpec::Kind::copies);
  REQUIRE(s.values == std::vector<std::uint64_t>{1, 2, 4, 8});

  REQUIRE_THROWS_AS(parse_ladder_spec("x=3"), usage_error);
  REQUIRE_THROWS_AS(parse_ladder_spec("N=0..4"), usage_error);
  REQUIRE_THROWS_AS(parse_ladder_spec("N=5..3"), usage_error);
  REQUIRE_THROWS_AS(parse_ladder_spec("d="), usage_error);
  REQUIRE_THROWS_AS(parse_ladder_spec("4..8"), usage_error);
  REQUIRE_THROWS_AS(parse_ladder_spec("N=4..8:0"), usage_error);
}

TEST_CASE("ladder construction respects group kinds") {
  auto z = parse_group("Z");
  auto fr = parse_group("free:2");
  auto c2 = parse_group("Z/2");

  Ladder lad = build_ladder(parse_ladder_spec("N=2..8"), z, 1);
  REQUIRE(lad.rungs.size() == 3);
  REQUIRE(lad.rungs[2].degree() == 8);

  lad = build_ladder(parse_ladder_spec("d=8,16"), fr, 42);
  REQUIRE(lad.rungs[0].degree() == 8);

  lad = build_ladder(parse_ladder_spec("copies=1,2"), c2, 1);
  REQUIRE(lad.rungs[1].degree() == 4);

  REQUIRE_THROWS_AS(build_ladder(parse_ladder_spec("N=2..4"), fr, 1),
                    usage_error);
  REQUIRE_THROWS_AS(build_ladder(parse_ladder_spec("d=4"), z, 1),
                    usage_error);
  REQUIRE_THROWS_AS(build_ladder(parse_ladder_spec("copies=2"), z, 1),
                    usage_error);
}

TEST_CASE("default ladders") {
  REQUIRE(default_ladder(*parse_group("Z")).values ==
          std::vector<std::uint64_t>{4, 8, 16, 32});
  REQUIRE(default_ladder(*parse_group("Z^3")).values ==
          std::vector<std::uint64_t>{2, 4, 8});
  REQUIRE(default_ladder(*parse_group("free:2")).kind ==
          LadderSpec::Kind::degrees);
  REQUIRE(default_ladder(*parse_group("Z/2")).kind ==
          LadderSpec::Kind::copies);
}

TEST_CASE("element lists") {
  FieldSpec F2(2);
  auto z = parse_group("Z");
  std::vector<GroupElement> els = parse_element_list("e, t, t^-1", z, F2);
  REQUIRE(els.size() == 3);
  REQUIRE(z->is_identity(els[0]));
  REQUIRE(els[1].coords[0] == 1);
  REQUIRE(els[2].coords[0] == -1);

  els = parse_element_list("1", z, F2);
  REQUIRE(els.size() == 1);
  REQUIRE(z->is_identity(els[0]));

  REQUIRE(parse_element_list("", z, F2).empty());
  REQUIRE_THROWS_AS(parse_element_list("t+1", z, F2), usage_error);
  REQUIRE_THROWS_AS(parse_element_list("2t", z, F2), usage_error);
}

TEST_CASE("report rendering") {
  ReportTable t;
  t.command = "entropy principal";
  t.param("group", "Z");
  t.param("q", "2");
  t.columns = {"d", "h_top_est", "ok", "label"};
  t.rows.push_back({std::uint64_t(4), 0.173286795139986, true,
                    std::string("a,b")});
  t.note("rungs", "1");
  t.pass = true;

  std::string csv = render_csv(t);
  REQUIRE(csv.find("# schema_version=1\n") == 0);
  REQUIRE(csv.find("# command=entropy principal\n") != std::string::npos);
  REQUIRE(csv.find("# param q=2\n") != std::string::npos);
  REQUIRE(csv.find("d,h_top_est,ok,label\n") != std::string::npos);
  REQUIRE(csv.find("4,0.17328679514,true,\"a,b\"\n") != std::string::npos);
  REQUIRE(csv.find("# rungs=1\n") != std::string::npos);
  REQUIRE(csv.find("# pass=true\n") != std::string::npos);

  REQUIRE(render_double(0.5) == "0.5");
  REQUIRE(render_double(2.0) == "2");
}
