#include <gtest/gtest.h>

#include "homkit/adjoint.hpp"
#include "homkit/oracle.hpp"
#include "homkit/program.hpp"
#include "test_util.hpp"

using namespace homkit;
using namespace homkit::testing;

namespace {

bool equiv(const instance& a, const instance& b) { return hom_equivalent(a.reduct(b.sch()), b); }

void expect_adjoint(const pipeline& pl, const instance& j, const adjoint_result& r, std::size_t bound) {
  verdict v = verify_adjoint(pl, j, r, bound);
  EXPECT_TRUE(v.pass) << v.explanation << "\n" << (v.counterexample ? print_instance(*v.counterexample) : "");
  EXPECT_FALSE(v.unknown);
}

}  // namespace

TEST(TamAdjoint, SymmetricPairGivesMaximalSymmetricPart) {
  program p = fixture_program("symmetric.dl");
  instance j = fixture_instance("sym_pair.inst");
  auto r = tam_adjoint(p, j);
  ASSERT_EQ(r.members.size(), 1u);
  EXPECT_TRUE(equiv(r.members[0].j_prime, inst("instance over R/2\nR(a,b). R(b,a).")));
  expect_adjoint(p, j, r, 3);
}

TEST(TamAdjoint, SymmetricVariousTargets) {
  program p = fixture_program("symmetric.dl");
  for (const char* text : {"instance over S/2\nS(a,b).", "instance over S/2\nS(a,a).",
                           "instance over S/2\nS(a,b). S(b,a). S(b,c). S(c,b).", "instance over S/2\ndomain: a b"}) {
    instance j = inst(text);
    auto r = tam_adjoint(p, j);
    ASSERT_EQ(r.members.size(), 1u) << text;
    expect_adjoint(p, j, r, 3);
  }
}

TEST(TamAdjoint, OneWayEdgeHasNoSymmetricPart) {
  auto r = tam_adjoint(fixture_program("symmetric.dl"), inst("instance over S/2\nS(a,b)."));
  EXPECT_TRUE(r.members[0].j_prime.facts().empty());
}

TEST(TamAdjoint, DisconnectedProgramSplitsIntoTwoMembers) {
  program p = fixture_program("two_unary.dl");
  instance j = inst("instance over Q3/0\ndomain: c");
  auto r = tam_adjoint(p, j);
  ASSERT_EQ(r.members.size(), 2u);
  instance q1 = inst("instance over Q1/1, Q2/1\nQ1(a).");
  instance q2 = inst("instance over Q1/1, Q2/1\nQ2(a).");
  bool first_q1 = equiv(r.members[0].j_prime, q1);
  EXPECT_TRUE(first_q1 || equiv(r.members[0].j_prime, q2));
  EXPECT_TRUE(equiv(r.members[1].j_prime, first_q1 ? q2 : q1));
  expect_adjoint(p, j, r, 3);
}

TEST(TamAdjoint, DisconnectedProgramWithSatisfiedTarget) {
  program p = fixture_program("two_unary.dl");
  instance j = inst("instance over Q3/0\nQ3().");
  auto r = tam_adjoint(p, j);
  expect_adjoint(p, j, r, 3);
}

TEST(TamAdjoint, CopyProgramRenamesTarget) {
  program p = fixture_program("copy.dl");
  for (const char* text : {"instance over S_out/2\nS_out(a,b). S_out(b,b).", "instance over S_out/2\nS_out(a,b).",
                           "instance over S_out/2\ndomain: a"}) {
    instance j = inst(text);
    auto r = tam_adjoint(p, j);
    ASSERT_EQ(r.members.size(), 1u);
    EXPECT_TRUE(equiv(r.members[0].j_prime, j.renamed({{"S_out", "S_in"}})));
    expect_adjoint(p, j, r, 2);
  }
}

TEST(TamAdjoint, TransitiveClosure) {
  program p = fixture_program("tc.dl");
  for (const char* text : {"instance over Ans/2\nAns(a,b).", "instance over Ans/2\nAns(a,a). Ans(a,b). Ans(b,b)."}) {
    instance j = inst(text);
    auto r = tam_adjoint(p, j);
    ASSERT_EQ(r.members.size(), 1u);
    expect_adjoint(p, j, r, 3);
  }
}

TEST(TamAdjoint, IotaUndefinedOnBottom) {
  auto r = tam_adjoint(fixture_program("tc.dl"), inst("instance over Ans/2\nAns(a,b)."));
  const auto& m = r.members[0];
  for (const auto& e : m.j_prime.domain()) {
    ASSERT_EQ(e.kind(), element_kind::pair);
    auto it = m.iota.find(e);
    if (e.first().kind() == element_kind::bottom)
      EXPECT_EQ(it, m.iota.end());
    else
      EXPECT_EQ(it->second, e.first());
  }
}

TEST(TamAdjoint, EmptyDomainTarget) {
  program p = fixture_program("symmetric.dl");
  instance j = inst("instance over S/2");
  auto r = tam_adjoint(p, j);
  ASSERT_EQ(r.members.size(), 1u);
  EXPECT_TRUE(r.members[0].j_prime.facts().empty());
  expect_adjoint(p, j, r, 2);
}

TEST(TamAdjoint, Errors) {
  adjoint_options tiny;
  tiny.cap = 10;
  try {
    tam_adjoint(fixture_program("tc.dl"), inst("instance over Ans/2\nAns(a,b)."), tiny);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::cap_exceeded);
  }
  try {
    tam_adjoint(fixture_program("inclusion.dl"), inst("instance over R_out/2"));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::precondition);
  }
}

TEST(SlAdjoint, LoopTargetKeepsLoop) {
  program p = tgd_compile(fixture_tgds("inclusion.tgd"));
  instance j = inst("instance over E_out/2\nE_out(a,a).");
  auto r = sl_adjoint(p, j);
  ASSERT_EQ(r.members.size(), 1u);
  EXPECT_TRUE(r.members[0].j_prime.contains(fact{"E_in", {el("a"), el("a")}}));
  EXPECT_EQ(r.members[0].iota.at(el("a")), el("a"));
  expect_adjoint(p, j, r, 3);
}

TEST(SlAdjoint, DeadEndEdgeLeavesNoInput) {
  program p = tgd_compile(fixture_tgds("inclusion.tgd"));
  instance j = inst("instance over E_out/2\nE_out(a,b).");
  auto r = sl_adjoint(p, j);
  EXPECT_TRUE(r.members[0].j_prime.facts().empty());
  expect_adjoint(p, j, r, 3);
}

TEST(SlAdjoint, CycleAndTail) {
  program p = tgd_compile(fixture_tgds("inclusion.tgd"));
  instance j = inst("instance over E_out/2\nE_out(a,b). E_out(b,c). E_out(c,b).");
  auto r = sl_adjoint(p, j);
  expect_adjoint(p, j, r, 3);
}

TEST(SlAdjoint, CopyProgramIsIdentity) {
  program p = fixture_program("copy.dl");
  instance j = inst("instance over S_out/2\nS_out(a,b). S_out(b,b).");
  auto r = sl_adjoint(p, j);
  instance expect = j.renamed({{"S_out", "S_in"}});
  expect.add_element(element::bottom());
  EXPECT_EQ(r.members[0].j_prime, expect);
}

TEST(SlAdjoint, RejectsNonLinear) {
  EXPECT_THROW(sl_adjoint(fixture_program("tc.dl"), inst("instance over Ans/2")), error);
}

TEST(ComposeAdjoints, CopyIsNeutral) {
  program sym = fixture_program("symmetric.dl");
  program copy = parse_program("program\nin: T/2\nout: R/2\nrules\nR(x,y) :- T(x,y).\n");
  instance j = fixture_instance("sym_pair.inst");
  auto base = tam_adjoint(sym, j);
  auto composed = compose_adjoints(base, adjoint_for(copy));
  ASSERT_EQ(composed.members.size(), 1u);
  EXPECT_TRUE(hom_equivalent(composed.members[0].j_prime.renamed({{"T", "R"}}).reduct(sym.in),
                             base.members[0].j_prime));
  pipeline pl(copy);
  pl.stages.push_back(sym);
  pl.links.push_back({});
  expect_adjoint(pl, j, composed, 3);
}

TEST(ComposeAdjoints, EmptyOuterGivesEmpty) {
  adjoint_result none;
  auto r = compose_adjoints(none, adjoint_for(fixture_program("copy.dl")));
  EXPECT_TRUE(r.members.empty());
}

TEST(ComposeAdjoints, InclusionThenTransitivePipeline) {
  pipeline pl(tgd_compile(fixture_tgds("inclusion.tgd")));
  pl.stages.push_back(fixture_program("transitive_rewrite.dl"));
  pl.links.push_back({{"E_out", "E_in"}});
  auto omega = adjoint_for(pl);
  for (const char* text : {"instance over E_out/2\nE_out(a,a).", "instance over E_out/2\nE_out(a,b). E_out(b,b)."}) {
    instance j = inst(text);
    auto r = omega(j);
    expect_adjoint(pl, j, r, 2);
  }
}

TEST(AdjointVerification, DetectsMutatedMember) {
  program p = fixture_program("symmetric.dl");
  instance j = fixture_instance("sym_pair.inst");
  auto r = tam_adjoint(p, j);
  auto& m = r.members[0].j_prime;
  // A loop over a breaks the biconditional: S(a,a) is not in J.
  element x;
  for (const auto& e : m.domain())
    if (e.first() == el("a")) x = e;
  instance broken(m.sch());
  for (const auto& e : m.domain()) broken.add_element(e);
  broken.add_fact(fact{"R", {x, x}});
  r.members[0].j_prime = broken;
  verdict v = verify_adjoint(p, j, r, 2);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_EQ(v.counterexample->size(), 1u);
}

TEST(AdjointVerification, DetectsRemovedFact) {
  program p = fixture_program("symmetric.dl");
  instance j = fixture_instance("sym_pair.inst");
  auto r = tam_adjoint(p, j);
  const auto& m = r.members[0].j_prime;
  instance broken(m.sch());
  for (const auto& e : m.domain()) broken.add_element(e);
  bool skipped = false;
  for (const auto& f : m.facts()) {
    if (!skipped && f.args[0].first() == el("a") && f.args[1].first() == el("b")) {
      skipped = true;
      continue;
    }
    broken.add_fact(f);
  }
  ASSERT_TRUE(skipped);
  r.members[0].j_prime = broken;
  verdict v = verify_adjoint(p, j, r, 2);
  EXPECT_FALSE(v.pass);
  EXPECT_TRUE(v.counterexample.has_value());
}
