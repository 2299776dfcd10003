#include <gtest/gtest.h>

#include <algorithm>

#include "homkit/chase.hpp"
#include "homkit/oracle.hpp"
#include "homkit/program.hpp"
#include "test_util.hpp"

using namespace homkit;
using namespace homkit::testing;

namespace {

program renamed_vars(const program& p, const std::string& prefix) {
  program out = p;
  auto ren = [&](std::string& v) { v = prefix + v; };
  for (auto& r : out.rules) {
    for (auto& a : r.head)
      for (auto& v : a.args) ren(v);
    for (auto& a : r.body)
      for (auto& v : a.args) ren(v);
    for (auto& v : r.existentials) ren(v);
  }
  return out;
}

std::size_t s_in_atoms(const program& p, const rule& r) {
  return static_cast<std::size_t>(std::count_if(r.body.begin(), r.body.end(), [&](const atom& a) { return p.in.count(a.rel) != 0; }));
}

bool same_up_to_iso(const std::vector<instance>& a, const std::vector<instance>& b) {
  if (a.size() != b.size()) return false;
  std::vector<char> used(b.size(), 0);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t i = 0; i < b.size() && !found; ++i)
      if (!used[i] && x.sch() == b[i].sch() && isomorphic(x, b[i])) found = used[i] = 1;
    if (!found) return false;
  }
  return true;
}

// Holds iff R(a) is in P(I).
bool derives(const program& p, const instance& i, const std::string& r, const std::vector<element>& a) {
  return chase_datalog(p, as_input(p, i)).output.contains(fact{r, a});
}

void for_each_tuple(const instance& i, std::size_t k, const std::function<void(const std::vector<element>&)>& f) {
  std::vector<element> dom(i.domain().begin(), i.domain().end());
  if (k > 0 && dom.empty()) return;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<element> t;
    for (auto x : idx) t.push_back(dom[x]);
    f(t);
    std::size_t pos = k;
    bool done = true;
    while (pos-- > 0) {
      if (++idx[pos] < dom.size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
    if (done) return;
  }
}

}  // namespace

TEST(Classify, TransitiveClosure) {
  classification c = classify(fixture_program("tc.dl"));
  EXPECT_TRUE(c.tree_shaped);
  EXPECT_TRUE(c.almost_monadic);
  EXPECT_TRUE(c.tam);
  EXPECT_TRUE(c.connected);
  EXPECT_FALSE(c.monadic);
  EXPECT_FALSE(c.strongly_linear);
  EXPECT_TRUE(c.weakly_acyclic);
  EXPECT_FALSE(c.non_recursive);
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(c.witness->at("Path"), 1u);
}

TEST(Classify, WitnessSearchWithoutDeclaration) {
  program p = parse_program("Path(x,y) :- Edge(x,y).\nPath(x,y) :- Edge(x,z), Path(z,y).\nAns(x,y) :- Path(x,y).\nAns(x,y) :- Path(y,x).\n");
  classification c = classify(p);
  EXPECT_TRUE(c.almost_monadic);
  EXPECT_EQ(c.witness->at("Path"), 1u);
}

TEST(Classify, DeclaredArticulationIsValidated) {
  program p = fixture_program("tc.dl");
  p.articulation["Path"] = 2;
  EXPECT_FALSE(classify(p).almost_monadic);
}

TEST(Classify, BalancedPathsNotAlmostMonadic) {
  classification c = classify(fixture_program("balanced.dl"));
  EXPECT_TRUE(c.tree_shaped);
  EXPECT_FALSE(c.almost_monadic);
  EXPECT_FALSE(c.tam);
}

TEST(Classify, LoopRule) {
  classification c = classify(fixture_program("loop.dl"));
  EXPECT_FALSE(c.tree_shaped);
  EXPECT_TRUE(c.monadic);
  EXPECT_TRUE(c.non_recursive);
}

TEST(Classify, CompiledTheories) {
  classification inc = classify(tgd_compile(fixture_tgds("inclusion.tgd")));
  EXPECT_TRUE(inc.strongly_linear);
  EXPECT_FALSE(inc.weakly_acyclic);
  EXPECT_TRUE(inc.tree_shaped);
  classification tr = classify(tgd_compile(fixture_tgds("transitive.tgd")));
  EXPECT_FALSE(tr.tam);
  EXPECT_FALSE(tr.strongly_linear);
  classification rw = classify(fixture_program("transitive_rewrite.dl"));
  EXPECT_TRUE(rw.tam);
  EXPECT_EQ(rw.witness->at("E"), 2u);
  EXPECT_FALSE(classify(fixture_program("ternary_inclusion.dl")).weakly_acyclic);
  EXPECT_TRUE(classify(fixture_program("ternary_inclusion.dl")).strongly_linear);
}

TEST(Classify, MiscFlags) {
  classification two = classify(fixture_program("two_unary.dl"));
  EXPECT_FALSE(two.connected);
  EXPECT_TRUE(two.boolean_program);
  EXPECT_TRUE(two.tam);
  EXPECT_TRUE(two.simple == false);
  classification sym = classify(fixture_program("symmetric.dl"));
  EXPECT_TRUE(sym.strongly_linear);
  EXPECT_TRUE(sym.simple);
  EXPECT_TRUE(sym.tam);
  EXPECT_TRUE(classify(fixture_program("path3.dl")).boolean_program);
}

TEST(Classify, InvariantUnderReorderingAndRenaming) {
  std::mt19937 rng(9);
  for (const char* name : {"tc.dl", "unfold_example.dl", "balanced.dl", "loop.dl", "inclusion.dl", "two_unary.dl",
                           "transitive_rewrite.dl", "ternary_inclusion.dl"}) {
    program p = fixture_program(name);
    std::string base = to_json(classify(p)).dump();
    for (int t = 0; t < 5; ++t) {
      program q = renamed_vars(p, "r" + std::to_string(t));
      std::shuffle(q.rules.begin(), q.rules.end(), rng);
      EXPECT_EQ(to_json(classify(q)).dump(), base) << name;
    }
  }
}

TEST(SimpleNormalForm, TransitiveClosure) {
  program p = fixture_program("tc.dl");
  program s = to_simple_tam(p);
  classification c = classify(s);
  EXPECT_TRUE(c.tam);
  EXPECT_TRUE(c.simple);
  EXPECT_TRUE(c.connected);
  EXPECT_TRUE(programs_equivalent_bounded(p, s, 3).pass);
}

TEST(SimpleNormalForm, SplitsTwoInputAtoms) {
  program p = parse_program(
      "program\nin: E/2, F/2\nout: Ans/1\naux: T/1 @1\nrules\nT(x) :- E(x,y), F(y,z).\nT(x) :- E(x,y), T(y).\nAns(x) :- T(x), F(x,x2).\n");
  ASSERT_TRUE(classify(p).tam);
  program s = to_simple_tam(p);
  EXPECT_GT(s.aux.size(), p.aux.size());
  for (const auto& r : s.rules) EXPECT_EQ(s_in_atoms(s, r), 1u) << to_string(r);
  for (const auto& [rel, ar] : s.aux)
    if (!p.aux.count(rel)) EXPECT_EQ(s.articulation.at(rel), 1u);
  EXPECT_TRUE(classify(s).tam);
  EXPECT_TRUE(programs_equivalent_bounded(p, s, 3).pass);
}

TEST(SimpleNormalForm, ExtendsRulesWithoutInputAtoms) {
  program p = parse_program("program\nin: E/2, U/1\nout: Ans/1\naux: T/1 @1\nrules\nT(x) :- U(x).\nAns(x) :- T(x).\n");
  program s = to_simple_tam(p);
  std::size_t from_ans = 0;
  for (const auto& r : s.rules) {
    EXPECT_EQ(s_in_atoms(s, r), 1u);
    from_ans += r.head.front().rel == "Ans";
  }
  EXPECT_EQ(from_ans, 3u);  // E at either position, U
  EXPECT_TRUE(programs_equivalent_bounded(p, s, 3).pass);
  EXPECT_THROW(to_simple_tam(fixture_program("balanced.dl")), error);
}

TEST(SimpleNormalForm, FixturesStayEquivalent) {
  for (const char* name : {"two_unary.dl", "symmetric.dl", "transitive_rewrite.dl", "path2.dl", "out_edge.dl"}) {
    program p = fixture_program(name);
    program s = to_simple_tam(p);
    classification c = classify(s);
    EXPECT_TRUE(c.tam && c.simple) << name;
    EXPECT_EQ(c.connected, classify(p).connected) << name;
    EXPECT_TRUE(programs_equivalent_bounded(p, s, 3).pass) << name;
  }
}

TEST(MonadicReduction, OutgoingEdge) {
  program p = fixture_program("out_edge.dl");
  program m = monadic_reduction(p, "Ans");
  classification c = classify(m);
  EXPECT_TRUE(c.monadic);
  EXPECT_TRUE(c.boolean_program);
  const std::string ans = m.out.begin()->first;
  for (const instance& i : enumerate_instances(p.in, 3)) {
    for (const auto& a : i.domain()) {
      instance j = with_schema(i, m.in);
      j.add_fact(fact{"Q1", {a}});
      bool has_edge = std::any_of(i.facts().begin(), i.facts().end(), [&](const fact& f) { return f.args[0] == a; });
      EXPECT_EQ(chase_datalog(m, j).output.contains(fact{ans, {}}), has_edge);
    }
  }
}

TEST(MonadicReduction, BooleanKeepsShape) {
  program p = fixture_program("two_unary.dl");
  program m = monadic_reduction(p, "Q3");
  EXPECT_EQ(m.in, p.in);
  for (const instance& i : enumerate_instances(p.in, 2))
    EXPECT_EQ(chase_datalog(m, i).output.facts().size(), chase_datalog(p, i).output.facts().size());
}

TEST(MonadicReduction, TransitiveClosureBothDirections) {
  program p = fixture_program("tc.dl");
  program m = monadic_reduction(p, "Ans");
  ASSERT_TRUE(classify(m).monadic);
  const std::string ans = m.out.begin()->first;
  program back = monadic_to_tam(m, {"Q1", "Q2"}, "R");
  std::size_t checked = 0;
  for (const instance& i : enumerate_instances(p.in, 3)) {
    chase_result pr = chase_datalog(p, i);
    chase_result br = chase_datalog(back, with_schema(i, back.in));
    for_each_tuple(i, 2, [&](const std::vector<element>& a) {
      instance j = with_schema(i, m.in);
      j.add_fact(fact{"Q1", {a[0]}});
      j.add_fact(fact{"Q2", {a[1]}});
      bool mono = chase_datalog(m, j).output.contains(fact{ans, {}});
      ASSERT_EQ(pr.output.contains(fact{"Ans", a}), mono);
      ASSERT_EQ(br.output.contains(fact{"R", a}), mono);
      ++checked;
    });
  }
  EXPECT_GT(checked, 4000u);
}

TEST(MonadicToTam, SeedOnly) {
  program m = parse_program("program\nin: Q1/1, E/2\nout: Ans/0\nrules\nAns() :- Q1(x).\n");
  program t = monadic_to_tam(m, {"Q1"}, "R");
  EXPECT_TRUE(classify(t).tam);
  instance i = inst("instance over E/2\ndomain: c\nE(a,b).");
  instance out = chase_datalog(t, i).output;
  EXPECT_TRUE(out.contains(fact{"R", {el("a")}}));
  EXPECT_TRUE(out.contains(fact{"R", {el("b")}}));
  EXPECT_FALSE(out.contains(fact{"R", {el("c")}}));
}

TEST(MonadicToTam, SingleDerivedAtomBodiesStayTam) {
  program m = parse_program("program\nin: Q1/1, E/2\nout: Ans/0\naux: A/1\nrules\nA(x) :- Q1(x).\nA(x) :- E(x,y), A(y).\nAns() :- A(x).\n");
  program t = monadic_to_tam(m, {"Q1"}, "R");
  EXPECT_TRUE(classify(t).tam);
  for (const instance& i : enumerate_instances(schema{{"E", 2}}, 3)) {
    instance out = chase_datalog(t, i).output;
    for (const auto& a : i.active_domain()) {
      instance j = with_schema(i, m.in);
      j.add_fact(fact{"Q1", {a}});
      EXPECT_EQ(out.contains(fact{"R", {a}}), chase_datalog(m, j).output.contains(fact{"Ans", {}}));
    }
  }
}

TEST(MonadicToTam, EmptyProgram) {
  program m = parse_program("program\nin: Q1/1, E/2\nout: Ans/0\nrules\n");
  program t = monadic_to_tam(m, {"Q1"}, "R");
  EXPECT_TRUE(chase_datalog(t, inst("instance over E/2\nE(a,b). E(b,a).")).output.facts().empty());
}

TEST(Unfoldings, TwoRelationExample) {
  program p = fixture_program("unfold_example.dl");
  std::vector<instance> got = unfoldings(p, "R", 2);
  std::vector<instance> expect = {
      with_schema(inst("instance over U/2\nU(a,b). U(b,c).\npoints: a a"), p.in),
      with_schema(inst("instance over S/2\nS(a,b).\npoints: a b"), p.in),
  };
  EXPECT_TRUE(same_up_to_iso(got, expect));
}

TEST(Unfoldings, PathsForTransitiveClosure) {
  program p = fixture_program("tc.dl");
  for (int d = 1; d <= 5; ++d) {
    std::vector<instance> got = unfoldings(p, "Ans", d);
    std::vector<instance> expect;
    for (int n = 1; n <= d; ++n) {
      instance path(p.in);
      for (int i = 0; i < n; ++i) path.add_fact(fact{"Edge", {el("p" + std::to_string(i)), el("p" + std::to_string(i + 1))}});
      path.set_points({el("p0"), el("p" + std::to_string(n))});
      expect.push_back(path);
    }
    EXPECT_TRUE(same_up_to_iso(got, expect)) << "depth " << d;
  }
}

TEST(Unfoldings, NonRecursiveDepthOne) {
  program p = fixture_program("loop.dl");
  std::vector<instance> got = unfoldings(p, "Ans", 1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_TRUE(isomorphic(got[0], inst("instance over E/2\nE(a,a).\npoints: a")));
  EXPECT_THROW(unfoldings(fixture_program("inclusion.dl"), "R_out", 1), error);
}

TEST(Unfoldings, BoundedDerivations) {
  std::mt19937 rng(31);
  for (const char* name : {"tc.dl", "unfold_example.dl", "symmetric.dl", "balanced.dl", "two_unary.dl", "transitive_rewrite.dl"}) {
    program p = fixture_program(name);
    for (const auto& [r, k] : p.out) {
      std::size_t max_ar = 0;
      schema derived = merge_schemas(p.out, p.aux);
      for (const auto& [rel, ar] : p.full_schema()) max_ar = std::max(max_ar, ar);
      std::vector<std::pair<std::size_t, std::vector<instance>>> by_n;
      for (std::size_t n = 0; n <= 3; ++n) {
        std::size_t d = derived.size();
        for (std::size_t i = 0; i < max_ar; ++i) d *= n;
        by_n.emplace_back(n, unfoldings(p, r, static_cast<int>(std::max<std::size_t>(d, 1))));
      }
      for (int t = 0; t < 120; ++t) {
        std::size_t n = rng() % 4;
        instance i = random_instance(p.in, n, 0.3, rng);
        const auto& unf = by_n[n].second;
        for_each_tuple(i, k, [&](const std::vector<element>& a) {
          instance target = k ? i.with_points(a) : i;
          bool via_unf = std::any_of(unf.begin(), unf.end(), [&](const instance& u) { return find_homomorphism(u, target).has_value(); });
          EXPECT_EQ(derives(p, i, r, a), via_unf) << name;
        });
      }
    }
  }
}

TEST(Unfoldings, TreeShapedGivesAcyclic) {
  for (const char* name : {"tc.dl", "unfold_example.dl", "balanced.dl", "symmetric.dl", "transitive_rewrite.dl", "path3.dl"}) {
    program p = fixture_program(name);
    ASSERT_TRUE(classify(p).tree_shaped);
    for (const auto& [r, k] : p.out)
      for (const auto& u : unfoldings(p, r, 6)) EXPECT_TRUE(structure_report(u).acyclic) << name;
  }
}

TEST(TgdCompile, Transitivity) {
  program p = tgd_compile(fixture_tgds("transitive.tgd"));
  program expect = parse_program(
      "program\nin: E_in/2\nout: E_out/2\naux: E/2\nrules\nE(x1,x2) :- E_in(x1,x2).\nE(x,z) :- E(x,y), E(y,z).\nE_out(x1,x2) :- E(x1,x2).\n");
  EXPECT_EQ(p, expect);
}

TEST(TgdCompile, EmptyTheoryCopies) {
  tgd_set s = parse_tgds("tgds over E/2\n");
  program p = tgd_compile(s);
  instance i = inst("instance over E_in/2\nE_in(a,b). E_in(b,b).");
  instance out = chase_datalog(p, i).output;
  EXPECT_EQ(out.renamed({{"E_out", "E_in"}}).facts(), i.facts());
}

TEST(TgdCompile, CopyConstraintProperties) {
  std::mt19937 rng(41);
  std::vector<tgd_set> theories = {fixture_tgds("transitive.tgd"),
                                    parse_tgds("tgds over E/2\nE(x,y) -> E(y,x).\n"),
                                    parse_tgds("tgds over E/2, F/2, G/1\nE(x,y) -> exists z : F(y,z).\nF(x,y), E(y,x) -> G(x).\n")};
  for (const auto& sigma : theories) {
    program p = tgd_compile(sigma);
    ASSERT_TRUE(is_weakly_acyclic(p));
    std::map<std::string, std::string> to_in, from_out;
    for (const auto& [r, k] : sigma.sch) {
      to_in[r] = in_name(r);
      from_out[out_name(r)] = r;
    }
    for (int t = 0; t < 60; ++t) {
      instance i = random_instance(sigma.sch, rng() % 4, 0.3, rng);
      instance o = chase_existential(p, i.renamed(to_in)).output.renamed(from_out);
      for (const auto& f : i.facts()) EXPECT_TRUE(o.contains(f));
      EXPECT_TRUE(satisfies(o, sigma));
      if (satisfies(i, sigma)) EXPECT_TRUE(find_homomorphism(o.trimmed(), i, i.active_domain()).has_value());
    }
  }
}

TEST(PultrCompile, ArcGraph) {
  cq phi_v{{"x", "y"}, {atom{"E", {"x", "y"}}}};
  cq phi_e{{"x", "y", "y", "z"}, {atom{"E", {"x", "y"}}, atom{"E", {"y", "z"}}}};
  program p = pultr_compile(phi_v, phi_e);
  EXPECT_EQ(p.aux.size(), 2u);
  EXPECT_TRUE(is_weakly_acyclic(p));
  instance out = chase_existential(p, inst("instance over E_in/2, V_in/1\nE_in(a,b). E_in(b,c).")).output;
  instance expect = inst("instance over E_out/2, V_out/1\nE_out(u,v). V_out(u). V_out(v).");
  EXPECT_TRUE(hom_equivalent(out.trimmed(), expect));
  EXPECT_THROW(pultr_compile(phi_v, phi_v), error);
}

TEST(PultrCompile, IdentityFunctor) {
  cq phi_v{{"x"}, {atom{"V", {"x"}}}};
  cq phi_e{{"x", "y"}, {atom{"E", {"x", "y"}}}};
  program p = pultr_compile(phi_v, phi_e);
  std::mt19937 rng(2);
  for (int t = 0; t < 40; ++t) {
    std::size_t n = 1 + rng() % 3;
    instance g = random_instance(schema{{"E", 2}}, n, 0.4, rng);
    instance i(p.in);
    for (const auto& e : g.domain()) i.add_fact(fact{"V_in", {e}});
    for (const auto& f : g.facts()) i.add_fact(fact{"E_in", f.args});
    instance out = chase_existential(p, i).output.trimmed();
    EXPECT_TRUE(hom_equivalent(out, i.renamed({{"V_in", "V_out"}, {"E_in", "E_out"}}).reduct(p.out)));
  }
  instance empty(p.in);
  EXPECT_TRUE(chase_existential(p, empty).output.facts().empty());
}

TEST(RestrictOutput, KeepsOnlyRequested) {
  program p = parse_program("program\nin: E/2\nout: A/1, B/1\nrules\nA(x) :- E(x,y).\nB(y) :- E(x,y).\nexists z : A(z), B(x) :- E(x,x).\n");
  program r = restrict_output(p, "A");
  EXPECT_EQ(r.out, (schema{{"A", 1}}));
  EXPECT_EQ(r.rules.size(), 2u);
  EXPECT_EQ(restrict_output(fixture_program("unfold_example.dl"), "R"), fixture_program("unfold_example.dl"));
  EXPECT_THROW(restrict_output(p, "C"), error);
}
