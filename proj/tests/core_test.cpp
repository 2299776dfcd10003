#include <gtest/gtest.h>

#include "homkit/core.hpp"
#include "test_util.hpp"

using namespace homkit;
using homkit::testing::el;
using homkit::testing::inst;

TEST(Element, CanonicalKeys) {
  EXPECT_EQ(element::bottom().key(), "_bot");
  EXPECT_EQ(element::null(3).key(), "_n3");
  element p = element::pair(el("a"), {fact{"P", {el("b"), el("a")}}, fact{"P", {el("a"), el("a")}}});
  EXPECT_EQ(p.key(), "(a|{P(a,a),P(b,a)})");
  EXPECT_EQ(p, element::pair(el("a"), {fact{"P", {el("a"), el("a")}}, fact{"P", {el("b"), el("a")}}}));
  EXPECT_NE(p, element::pair(el("a"), {}));
  EXPECT_TRUE(element() == element::bottom());
}

TEST(Instance, RejectsArityMismatch) {
  instance a(schema{{"E", 2}});
  EXPECT_THROW(a.add_fact("E", {el("a")}), error);
  EXPECT_THROW(a.add_fact("F", {el("a")}), error);
}

TEST(Homomorphism, CollapseOntoLoop) {
  auto a = inst("instance over Edge/2\nEdge(a,b).");
  auto b = inst("instance over Edge/2\nEdge(c,c).");
  auto h = find_homomorphism(a, b);
  ASSERT_TRUE(h);
  EXPECT_EQ(h->at(el("a")), el("c"));
  EXPECT_EQ(h->at(el("b")), el("c"));
}

TEST(Homomorphism, PathIntoSingleEdgeAbsent) {
  auto a = inst("instance over Edge/2\nEdge(a,b). Edge(b,c).");
  auto b = inst("instance over Edge/2\nEdge(0,1).");
  EXPECT_FALSE(find_homomorphism(a, b));
  // Exhaust all 8 maps independently.
  std::vector<element> src{el("a"), el("b"), el("c")}, dst{el("0"), el("1")};
  int found = 0;
  for (int m = 0; m < 8; ++m) {
    element_map h;
    for (int i = 0; i < 3; ++i) h.emplace(src[i], dst[(m >> i) & 1]);
    found += is_homomorphism(a, b, h);
  }
  EXPECT_EQ(found, 0);
}

TEST(Homomorphism, IdentityWithFixedDomain) {
  auto a = inst("instance over Edge/2\nEdge(a,b). Edge(b,c). Edge(c,a).");
  auto h = find_homomorphism(a, a, a.domain());
  ASSERT_TRUE(h);
  for (const auto& e : a.domain()) EXPECT_EQ(h->at(e), e);
}

TEST(Homomorphism, Errors) {
  auto a = inst("instance over Edge/2\nEdge(a,b).");
  auto b = inst("instance over F/2\nF(a,b).");
  EXPECT_THROW(find_homomorphism(a, b), error);
  auto c = inst("instance over Edge/2\nEdge(x,y).");
  EXPECT_THROW(find_homomorphism(a, c, std::set<element>{el("a")}), error);
  auto pa = inst("instance over Edge/2\nEdge(a,b).\npoints: a b");
  auto pc = inst("instance over Edge/2\nEdge(x,y).\npoints: x");
  EXPECT_THROW(find_homomorphism(pa, pc), error);
}

TEST(Homomorphism, PointsAndTotality) {
  auto a = inst("instance over Edge/2\nEdge(a,b).\npoints: b a");
  auto b = inst("instance over Edge/2\nEdge(x,y). Edge(y,y).\npoints: x y");
  EXPECT_FALSE(find_homomorphism(a, b));
  auto b2 = inst("instance over Edge/2\nEdge(x,y). Edge(y,x).\npoints: y x");
  EXPECT_TRUE(find_homomorphism(a, b2));
  // An isolated domain element still needs an image.
  auto lone = inst("instance over Edge/2\ndomain: c");
  auto empty = inst("instance over Edge/2");
  EXPECT_FALSE(find_homomorphism(lone, empty));
  EXPECT_TRUE(find_homomorphism(empty, lone));
}

TEST(Homomorphism, ZeroAryFacts) {
  auto a = inst("instance over Ans/0, E/2\nAns(). E(a,b).");
  auto b = inst("instance over Ans/0, E/2\nE(x,x).");
  EXPECT_FALSE(find_homomorphism(a, b));
  auto c = inst("instance over Ans/0, E/2\nE(x,x). Ans().");
  EXPECT_TRUE(find_homomorphism(a, c));
}

TEST(HomEquivalent, Examples) {
  EXPECT_TRUE(hom_equivalent(inst("instance over R/2\nR(a,b). R(b,a)."), inst("instance over R/2\nR(x,y). R(y,x).")));
  EXPECT_FALSE(hom_equivalent(inst("instance over Edge/2\nEdge(a,b)."), inst("instance over Edge/2\nEdge(c,c).")));
  auto a = inst("instance over R/2\nR(a,b). R(b,c).");
  EXPECT_TRUE(hom_equivalent(a, a));
}

TEST(Structure, Examples) {
  auto loop = inst("instance over E/2\nE(a,a).\npoints: a");
  auto s = structure_report(loop);
  EXPECT_FALSE(s.acyclic);
  EXPECT_TRUE(s.c_acyclic);
  auto path = structure_report(inst("instance over E/2\nE(a,b). E(b,c)."));
  EXPECT_TRUE(path.acyclic);
  EXPECT_TRUE(path.connected);
  auto two = structure_report(inst("instance over E/2, F/2\nE(a,b). F(b,a)."));
  EXPECT_FALSE(two.acyclic);
  EXPECT_FALSE(two.c_acyclic);
  EXPECT_TRUE(structure_report(instance()).connected);
  EXPECT_FALSE(structure_report(inst("instance over E/2\nE(a,b). E(c,d).")).connected);
  EXPECT_FALSE(structure_report(inst("instance over E/2\ndomain: a b")).connected);
}

TEST(Structure, SingleFactDistinctArgsAcyclic) {
  for (std::size_t k = 1; k <= 5; ++k) {
    instance a(schema{{"R", k}});
    fact f{"R", {}};
    for (std::size_t i = 0; i < k; ++i) f.args.push_back(el("x" + std::to_string(i)));
    a.add_fact(f);
    EXPECT_TRUE(structure_report(a).acyclic);
  }
}

TEST(Isomorphic, Examples) {
  EXPECT_TRUE(isomorphic(inst("instance over E/2\nE(a,b)."), inst("instance over E/2\nE(x,y).")));
  EXPECT_FALSE(isomorphic(inst("instance over E/2\nE(a,b)."), inst("instance over E/2\nE(a,a).")));
  EXPECT_FALSE(isomorphic(inst("instance over E/2\nE(a,b). E(b,a)."), inst("instance over E/2\nE(a,b). E(a,b).")));
  EXPECT_FALSE(isomorphic(inst("instance over E/2\nE(a,b). E(b,c)."), inst("instance over E/2\nE(a,b). E(c,b).")));
}

TEST(Homomorphism, RandomProperties) {
  std::mt19937 rng(7);
  schema s{{"E", 2}, {"U", 1}};
  for (int trial = 0; trial < 200; ++trial) {
    auto a = homkit::testing::random_instance(s, 1 + rng() % 3, 0.3, rng);
    auto b = homkit::testing::random_instance(s, 1 + rng() % 3, 0.4, rng);
    auto c = homkit::testing::random_instance(s, 1 + rng() % 3, 0.5, rng);
    auto ab = find_homomorphism(a, b);
    auto bc = find_homomorphism(b, c);
    if (ab) EXPECT_TRUE(is_homomorphism(a, b, *ab));
    if (ab && bc) {
      element_map comp;
      for (const auto& [x, y] : *ab) comp.emplace(x, bc->at(y));
      EXPECT_TRUE(is_homomorphism(a, c, comp));
    }
    // Brute-force oracle for existence.
    std::vector<element> src(a.domain().begin(), a.domain().end()), dst(b.domain().begin(), b.domain().end());
    bool any = false;
    std::vector<std::size_t> idx(src.size(), 0);
    while (!any) {
      element_map h;
      for (std::size_t i = 0; i < src.size(); ++i) h.emplace(src[i], dst[idx[i]]);
      any = is_homomorphism(a, b, h);
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == dst.size()) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
    EXPECT_EQ(any, ab.has_value());
    if (isomorphic(a, b)) EXPECT_TRUE(hom_equivalent(a, b));
  }
}
