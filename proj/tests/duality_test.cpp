#include <gtest/gtest.h>

#include "homkit/duality.hpp"
#include "homkit/program.hpp"
#include "test_util.hpp"

using namespace homkit;
using namespace homkit::testing;

namespace {

// Transitive tournament on n+1 vertices.
instance linear_order(std::size_t n) {
  instance a(schema{{"E", 2}});
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) a.add_fact("E", {el("l" + std::to_string(i)), el("l" + std::to_string(j))});
  for (std::size_t i = 0; i <= n; ++i) a.add_element(el("l" + std::to_string(i)));
  return a;
}

bool maps(const instance& a, const instance& b) { return find_homomorphism(a, b).has_value(); }

// Some dual receives b, and every dual maps into b.
bool covers(const std::vector<instance>& duals, const instance& b) {
  bool into = std::any_of(duals.begin(), duals.end(), [&](const instance& d) { return maps(b, d); });
  bool from = std::all_of(duals.begin(), duals.end(), [&](const instance& d) { return maps(d, b); });
  return into && from;
}

void expect_no_frontier_below(const duality& d) {
  for (const auto& a : d.frontier)
    for (const auto& b : d.duals) EXPECT_FALSE(maps(a, b));
}

tgd_set transitivity() { return fixture_tgds("transitive.tgd"); }
tgd_set inclusion() { return fixture_tgds("inclusion.tgd"); }

theory_options transitive_rewrite() {
  theory_options o;
  o.rewrite = pipeline(fixture_program("transitive_rewrite.dl"));
  return o;
}

}  // namespace

TEST(DualFromProgram, SingleEdge) {
  duality d = dual_from_program(fixture_program("edge_bool.dl"), "Ans");
  ASSERT_EQ(d.duals.size(), 1u);
  EXPECT_TRUE(d.duals[0].facts().empty());
  EXPECT_GE(d.duals[0].size(), 1u);
  verdict v = verify(d, 3);
  EXPECT_TRUE(v.pass) << v.explanation;
  EXPECT_TRUE(d.verified);
}

TEST(DualFromProgram, TwoEdgePathGivesSourcesAndSinks) {
  duality d = dual_from_program(fixture_program("path2.dl"), "Ans");
  EXPECT_TRUE(covers(d.duals, inst("instance over E/2\nE(a,b).")));
  // Independent check: I maps to a dual iff I has no directed 2-path.
  for_each_instance({{"E", 2}}, 3, [&](const instance& i) {
    bool two_path = false;
    for (const auto& f : i.facts())
      for (const auto& g : i.facts()) two_path = two_path || f.args[1] == g.args[0];
    bool below = std::any_of(d.duals.begin(), d.duals.end(), [&](const instance& b) { return maps(i, b); });
    EXPECT_NE(two_path, below) << print_instance(i);
    return true;
  });
}

TEST(DualFromProgram, PathsAgainstLinearOrders) {
  const char* files[] = {"path2.dl", "path3.dl", "path4.dl"};
  for (std::size_t n = 1; n <= 3; ++n) {
    duality d = dual_from_program(fixture_program(files[n - 1]), "Ans");
    EXPECT_TRUE(covers(d.duals, linear_order(n))) << "n=" << n;
    verdict v = verify(d, 4);
    EXPECT_TRUE(v.pass) << "n=" << n << ": " << v.explanation;
  }
}

TEST(DualFromProgram, UnaryOutputAndRenaming) {
  program p = fixture_program("out_edge.dl");
  duality d = dual_from_program(p, "Ans");
  EXPECT_EQ(d.arity, 1u);
  for (const auto& b : d.duals) EXPECT_EQ(b.points().size(), 1u);
  EXPECT_TRUE(verify(d, 3).pass);
  dual_options o;
  o.b_prefix = "p";
  o.c_name = "q";
  duality e = dual_from_program(p, "Ans", o);
  for (const auto& x : d.duals)
    EXPECT_TRUE(std::any_of(e.duals.begin(), e.duals.end(), [&](const instance& y) { return maps(x, y); }));
  for (const auto& y : e.duals)
    EXPECT_TRUE(std::any_of(d.duals.begin(), d.duals.end(), [&](const instance& x) { return maps(y, x); }));
}

TEST(DualFromProgram, MinimizeYieldsCores) {
  dual_options o;
  o.minimize = true;
  duality d = dual_from_program(fixture_program("path3.dl"), "Ans", o);
  ASSERT_EQ(d.duals.size(), 1u);
  EXPECT_TRUE(isomorphic(d.duals[0], linear_order(2)));
  EXPECT_TRUE(verify(d, 3).pass);
}

TEST(DualFromProgram, TransitiveClosureTree) {
  duality d = dual_from_program(fixture_program("tc.dl"), "Ans");
  EXPECT_EQ(d.arity, 2u);
  verdict v = verify(d, 3);
  EXPECT_TRUE(v.pass) << v.explanation;
}

TEST(DualFromProgram, RejectsProgramsWithoutAdjoint) {
  EXPECT_THROW(dual_from_program(fixture_program("loop.dl"), "Ans"), error);
}

TEST(FrontierProgram, BooleanEdge) {
  program p = frontier_program({inst("instance over E/2\nE(a,b).")}, 0);
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.out, (schema{{"R", 0}}));
  EXPECT_EQ(p.rules[0].body.size(), 1u);
}

TEST(FrontierProgram, PointedPath) {
  instance a = inst("instance over E/2\npoints: a c\nE(a,b). E(b,c).");
  program p = frontier_program({a}, 2);
  EXPECT_EQ(to_string(p.rules[0]), "R(a,c) :- E(a,b), E(b,c).");
  auto u = unfoldings(p, "R", 1);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_TRUE(isomorphic(u[0], a));
}

TEST(FrontierProgram, RejectsLoop) {
  EXPECT_THROW(frontier_program({inst("instance over E/2\npoints: a\nE(a,a).")}, 1), error);
}

TEST(FrontierProgram, DualityForFiniteFrontier) {
  std::vector<instance> f = {inst("instance over E/2, P/1\nE(a,b). P(b)."), inst("instance over E/2, P/1\nP(a). E(a,b).")};
  duality d = dual_from_program(frontier_program(f, 0), "R");
  d.frontier = f;
  d.generator.reset();
  verdict v = verify(d, 2);
  EXPECT_TRUE(v.pass) << v.explanation;
  expect_no_frontier_below(d);
}

TEST(DualWrtTheory, EmptyTheoryMatchesPlain) {
  tgd_set none{{{"E", 2}}, {}};
  instance path = inst("instance over E/2\nE(a,b). E(b,c).");
  duality d = dual_wrt_theory(none, {path});
  duality plain = dual_from_program(fixture_program("path2.dl"), "Ans");
  ASSERT_EQ(d.duals.size(), 1u);
  EXPECT_TRUE(hom_equivalent(d.duals[0], plain.duals[0]));
  EXPECT_TRUE(verify(d, 3).pass);
}

TEST(DualWrtTheory, TransitiveDigraphs) {
  instance path = inst("instance over E/2\nE(a,b). E(b,c).");
  duality d = dual_wrt_theory(transitivity(), {path}, transitive_rewrite());
  EXPECT_TRUE(d.frontier[0].contains(fact{"E", {el("a"), el("c")}}));
  tgd_set sigma = transitivity();
  for (const auto& b : d.duals) EXPECT_TRUE(satisfies(b, sigma));
  verdict v = verify(d, 3);
  EXPECT_TRUE(v.pass) << v.explanation;
  expect_no_frontier_below(d);
}

TEST(DualWrtTheory, PointedTransitive) {
  instance edge = inst("instance over E/2\npoints: a\nE(a,b).");
  duality d = dual_wrt_theory(transitivity(), {edge}, transitive_rewrite());
  verdict v = verify(d, 3);
  EXPECT_TRUE(v.pass) << v.explanation;
}

TEST(DualWrtTheory, RequiresWeakAcyclicity) {
  try {
    dual_wrt_theory(inclusion(), {inst("instance over E/2\nE(a,b).")});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::precondition);
  }
}

TEST(AboxDual, EmptyTheoryCoincidesWithPlain) {
  tgd_set none{{{"E", 2}}, {}};
  instance edge = inst("instance over E/2\nE(a,b).");
  duality d = abox_dual(none, {edge});
  duality plain = dual_from_program(fixture_program("edge_bool.dl"), "Ans");
  ASSERT_EQ(d.duals.size(), 1u);
  EXPECT_TRUE(hom_equivalent(d.duals[0], plain.duals[0]));
  verdict v = verify(d, 2);
  EXPECT_TRUE(v.pass) << v.explanation;
}

TEST(AboxDual, InclusionDependency) {
  for (const char* text : {"instance over E/2\nE(a,b).", "instance over E/2\nE(a,b). E(b,c)."}) {
    duality d = abox_dual(inclusion(), {inst(text)});
    verdict v = verify(d, 2);
    EXPECT_TRUE(v.pass) << v.explanation;
    EXPECT_FALSE(v.unknown);
  }
}

TEST(AboxDual, DiffersFromRelativeByFinalChase) {
  instance path = inst("instance over E/2\nE(a,b). E(b,c).");
  duality ab = abox_dual(transitivity(), {path}, transitive_rewrite());
  duality rel = dual_wrt_theory(transitivity(), {path}, transitive_rewrite());
  ASSERT_EQ(ab.duals.size(), rel.duals.size());
  for (std::size_t i = 0; i < ab.duals.size(); ++i)
    EXPECT_TRUE(hom_equivalent(theory_chase(transitivity(), ab.duals[i]).output, rel.duals[i]));
  EXPECT_TRUE(verify(ab, 2).pass);
}

TEST(AboxMorphism, EmptyTheoryIsPlainHom) {
  tgd_set none{{{"E", 2}}, {}};
  instance a = inst("instance over E/2\nE(a,b).");
  instance b = inst("instance over E/2\nE(x,y). E(y,x).");
  EXPECT_EQ(abox_morphism(none, a, b, {{el("a"), el("x")}}), tri::yes);
  EXPECT_EQ(abox_morphism(none, b, a), tri::no);
}

TEST(AboxMorphism, TransitivePathCollapsesOntoLoop) {
  instance a = inst("instance over E/2\nE(a,b). E(b,c).");
  instance b = inst("instance over E/2\nE(x,x).");
  EXPECT_EQ(abox_morphism(transitivity(), a, b), tri::yes);
}

TEST(AboxMorphism, InfiniteChaseWrapsOntoLoop) {
  instance a = inst("instance over E/2\nE(a,b).");
  instance b = inst("instance over E/2\nE(x,x).");
  EXPECT_EQ(abox_morphism(inclusion(), a, b, {{el("a"), el("x")}}), tri::yes);
  EXPECT_EQ(abox_morphism(inclusion(), a, inst("instance over E/2\ndomain: x")), tri::no);
  EXPECT_THROW(abox_morphism(inclusion(), a, b, {{el("zz"), el("x")}}), error);
}

TEST(Core, RetractsToSmallestEquivalent) {
  instance a = inst("instance over E/2\nE(a,b). E(c,d). E(a,d).");
  instance c = core_of(a);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_TRUE(hom_equivalent(a, c));
  instance pointed = inst("instance over E/2\npoints: c\nE(a,b). E(c,d).");
  EXPECT_EQ(core_of(pointed).size(), 2u);
}

TEST(Verify, DetectsMissingDual) {
  duality d = dual_from_program(fixture_program("path2.dl"), "Ans");
  d.duals.clear();
  verdict v = verify(d, 2);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(d.verified);
  ASSERT_TRUE(v.counterexample.has_value());
}
