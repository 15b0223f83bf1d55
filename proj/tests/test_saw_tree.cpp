#include "hardcore/saw_tree.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace hardcore;

TEST(SawTree, IsolatedVertex) {
  const auto s = build_saw_tree(path_graph(1), 0);
  EXPECT_EQ(s.size(), 1);
  EXPECT_EQ(s.origin, std::vector<Vertex>{0});
}

TEST(SawTree, TriangleByHand) {
  const auto s = build_saw_tree(complete_graph(3), 0);
  ASSERT_EQ(s.size(), 4);
  // root(0) -> a(1) -> b(2), root -> b(2)
  EXPECT_EQ(s.origin, (std::vector<Vertex>{0, 1, 2, 2}));
  EXPECT_EQ(s.tree.parents(), (std::vector<Vertex>{-1, 0, 1, 0}));
}

TEST(SawTree, FourCycleByHand) {
  const auto s = build_saw_tree(cycle_graph(4), 0);
  ASSERT_EQ(s.size(), 6);
  EXPECT_EQ(s.origin, (std::vector<Vertex>{0, 1, 2, 3, 3, 2}));
  EXPECT_EQ(s.tree.height(), 3);
}

TEST(SawTree, Budget) {
  EXPECT_THROW(build_saw_tree(complete_graph(8), 0, 100), BudgetError);
  EXPECT_THROW(build_saw_tree(path_graph(3), 5), ValidationError);
}

TEST(SawTree, TreeInputIsItself) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_tree(15, 3, seed);
    const auto s = build_saw_tree(t.to_graph(), t.root());
    EXPECT_EQ(s.tree, t);
    std::vector<Vertex> id(static_cast<std::size_t>(t.size()));
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(s.origin, id);
  }
}

TEST(SawTree, ProjectsToSelfAvoidingWalks) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(8, 0.4, seed);
    EXPECT_TRUE(projects_to_walks(build_saw_tree(g, 0), g));
  }
}

TEST(SawTree, SubtreeView) {
  const auto s = build_saw_tree(complete_graph(3), 0);
  const auto whole = subtree_view(s, 0);
  EXPECT_EQ(whole.tree, s.tree);
  EXPECT_EQ(whole.origin, s.origin);
  const auto a = subtree_view(s, 1);
  EXPECT_EQ(a.size(), 2);
  EXPECT_EQ(a.origin, (std::vector<Vertex>{1, 2}));
  const auto leaf = subtree_view(s, 3);
  EXPECT_EQ(leaf.size(), 1);
}

TEST(SawTree, SubtreeIsSawOfInducedSubgraph) {
  // the subtree at a child x_i is SAW(G - {v, x_1..x_{i-1}}, x_i)
  const auto g = random_graph(7, 0.5, 4);
  const auto s = build_saw_tree(g, 0);
  std::vector<bool> keep(7, true);
  keep[0] = false;
  for (Vertex c : s.tree.children(0)) {
    std::vector<Vertex> map;
    const auto h = g.induced_subgraph(keep, &map);
    const auto x = s.origin[static_cast<std::size_t>(c)];
    const auto expected = build_saw_tree(h, map[static_cast<std::size_t>(x)]);
    const auto view = subtree_view(s, c);
    EXPECT_EQ(view.tree, expected.tree);
    keep[static_cast<std::size_t>(x)] = false;
  }
}

TEST(Weitz, Triangle) {
  const Rational lam(3, 4);
  const auto k3 = complete_graph(3);
  const auto check = verify_weitz<Rational>(k3, 0, uniform_fugacity(k3, lam));
  EXPECT_TRUE(check.equal);
  EXPECT_EQ(check.tree_ratio.value(), lam / (1 + 2 * lam));
}

TEST(Weitz, RandomRationalMultivariate) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 2 + static_cast<int>(seed % 8);
    const auto g = random_graph(n, 0.45, seed + 17);
    std::vector<Rational> f;
    for (int i = 0; i < n; ++i) f.push_back(oracle::random_rational(rng, 1, 12, 5));
    const Vertex v = static_cast<Vertex>(rng() % static_cast<unsigned>(n));
    const auto check = verify_weitz<Rational>(g, v, f);
    EXPECT_TRUE(check.equal) << seed;
    const auto [zin, zout] = oracle::conditional_sums(g, f, v);
    EXPECT_EQ(check.tree_ratio.value(), zin / zout);
  }
}

TEST(Weitz, OrderingInvariance) {
  std::mt19937_64 rng(5);
  const auto g = random_graph(8, 0.45, 31);
  const std::vector<Rational> f{Rational(1, 2), 2, Rational(1, 3), 1, 3, Rational(2, 5), 1, Rational(7, 4)};
  const auto base = ratio<Rational>(g, 0, f);
  std::set<std::vector<Vertex>> shapes;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vertex> order(8);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto h = g.relabeled(order);  // h-vertex order[i] is g-vertex i
    std::vector<Rational> fh(8);
    for (std::size_t i = 0; i < 8; ++i) fh[static_cast<std::size_t>(order[i])] = f[i];
    const auto check = verify_weitz<Rational>(h, order[0], fh);
    EXPECT_TRUE(check.equal);
    EXPECT_TRUE(check.tree_ratio.equals(base));
    shapes.insert(build_saw_tree(h, order[0]).tree.parents());
  }
  EXPECT_GT(shapes.size(), 1u);
}

TEST(Weitz, ComplexFugacities) {
  const auto g = random_graph(7, 0.5, 8);
  std::vector<Complex> f;
  for (int i = 0; i < 7; ++i) f.emplace_back(0.3 + 0.1 * i, 0.2 - 0.05 * i);
  EXPECT_TRUE(verify_weitz<Complex>(g, 2, f, 1e-12).equal);
}

TEST(SawTree, DotDump) {
  std::ostringstream out;
  write_dot(out, build_saw_tree(complete_graph(3), 0));
  EXPECT_NE(out.str().find("n1 -> n2"), std::string::npos);
  EXPECT_NE(out.str().find("label=\"3/2\""), std::string::npos);
}
