#include "hardcore/partition.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hardcore;

namespace {

std::vector<Rational> rational_fugacities(int n, std::mt19937_64& rng) {
  std::vector<Rational> f;
  for (int i = 0; i < n; ++i) f.push_back(oracle::random_rational(rng, 1, 9, 7));
  return f;
}

}  // namespace

TEST(ZPoly, SmallExamples) {
  EXPECT_EQ(z_poly(path_graph(1)).coefficients, (std::vector<BigInt>{1, 1}));
  EXPECT_EQ(z_poly(complete_graph(3)).coefficients, (std::vector<BigInt>{1, 3}));
  EXPECT_EQ(z_poly(path_graph(3)).coefficients, (std::vector<BigInt>{1, 3, 1}));
  EXPECT_EQ(z_poly(cycle_graph(4)).coefficients, (std::vector<BigInt>{1, 4, 2}));
  EXPECT_EQ(z_poly(path_graph(4)).coefficients, (std::vector<BigInt>{1, 4, 3}));
  EXPECT_EQ(z_poly(path_graph(0)).coefficients, (std::vector<BigInt>{1}));
}

TEST(ZPoly, CountsMatchEnumeration) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = random_graph(11, 0.3, seed);
    const auto p = z_poly(g);
    EXPECT_EQ(p.coefficients[0], 1);
    EXPECT_EQ(p.coefficients[1], g.vertex_count());
    for (const auto& c : p.coefficients) EXPECT_GE(c, 0);
    EXPECT_EQ(p.total(), BigInt(oracle::independent_sets(g).size()));
    std::vector<int> by_size(12, 0);
    for (auto m : oracle::independent_sets(g)) ++by_size[static_cast<std::size_t>(std::popcount(m))];
    for (std::size_t i = 0; i < p.coefficients.size(); ++i) EXPECT_EQ(p.coefficients[i], by_size[i]);
    EXPECT_EQ(by_size[p.coefficients.size()], 0);
  }
}

TEST(ZPoly, DecimalStrings) {
  const auto p = z_poly(cycle_graph(4));
  EXPECT_EQ(p.decimal_strings(), (std::vector<std::string>{"1", "4", "2"}));
}

TEST(ZPoly, Budget) {
  PartitionOptions tiny;
  tiny.memo_budget = 3;
  EXPECT_THROW(z_poly(random_graph(14, 0.3, 1), tiny), BudgetError);
}

TEST(ZEval, Examples) {
  const auto edge = path_graph(2);
  EXPECT_EQ(z_eval<Rational>(edge, {Rational(1), Rational(1)}), 3);
  const auto g = random_graph(9, 0.4, 3);
  EXPECT_EQ(z_eval<Rational>(g, uniform_fugacity(g, Rational(0))), 1);
  const Rational lam(3, 7);
  const auto c4 = cycle_graph(4);
  EXPECT_EQ(z_eval<Rational>(c4, uniform_fugacity(c4, lam)), 1 + 4 * lam + 2 * lam * lam);
  EXPECT_EQ(z_brute_force<Rational>(complete_graph(3), uniform_fugacity(complete_graph(3), Rational(2))), 7);
  EXPECT_EQ(z_brute_force<Rational>(path_graph(0), std::vector<Rational>{}), 1);
  EXPECT_THROW(z_eval<double>(edge, std::vector<double>{1.0}), ValidationError);
}

TEST(ZEval, MatchesBruteForceExactly) {
  std::mt19937_64 rng(42);
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const int n = 1 + static_cast<int>(seed % 12);
    const auto g = random_graph(n, 0.1 + 0.05 * static_cast<double>(seed % 10), seed);
    const auto f = rational_fugacities(n, rng);
    EXPECT_EQ(z_eval<Rational>(g, f), z_brute_force<Rational>(g, f)) << seed;
  }
}

TEST(ZEval, MatchesBruteForceComplex) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int n = 1 + static_cast<int>(seed % 12);
    const auto g = random_graph(n, 0.35, seed + 1000);
    std::vector<Complex> f;
    for (int i = 0; i < n; ++i) f.emplace_back(u(rng), u(rng));
    const Complex a = z_eval<Complex>(g, f), b = z_brute_force<Complex>(g, f);
    EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(b))) << seed;
  }
}

TEST(ZEval, VertexDeletionConsistency) {
  std::mt19937_64 rng(3);
  const auto g = random_graph(10, 0.35, 77);
  const auto f = rational_fugacities(10, rng);
  const Rational z = z_eval<Rational>(g, f);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::vector<bool> keep_out(10, true), keep_in(10, true);
    keep_out[static_cast<std::size_t>(v)] = false;
    keep_in[static_cast<std::size_t>(v)] = false;
    for (Vertex w : g.neighbors(v)) keep_in[static_cast<std::size_t>(w)] = false;
    std::vector<Vertex> map_out, map_in;
    const auto g_out = g.induced_subgraph(keep_out, &map_out);
    const auto g_in = g.induced_subgraph(keep_in, &map_in);
    std::vector<Rational> f_out(static_cast<std::size_t>(g_out.vertex_count())), f_in(static_cast<std::size_t>(g_in.vertex_count()));
    for (std::size_t i = 0; i < 10; ++i) {
      if (map_out[i] >= 0) f_out[static_cast<std::size_t>(map_out[i])] = f[i];
      if (map_in[i] >= 0) f_in[static_cast<std::size_t>(map_in[i])] = f[i];
    }
    EXPECT_EQ(z, f[static_cast<std::size_t>(v)] * z_eval<Rational>(g_in, f_in) + z_eval<Rational>(g_out, f_out));
  }
}

TEST(Ratio, Examples) {
  const Rational lam(5, 3);
  const auto one = path_graph(1);
  EXPECT_EQ(ratio<Rational>(one, 0, uniform_fugacity(one, lam)).value(), lam);
  const auto edge = path_graph(2);
  EXPECT_EQ(ratio<Rational>(edge, 0, uniform_fugacity(edge, lam)).value(), lam / (1 + lam));
  const auto k3 = complete_graph(3);
  EXPECT_EQ(ratio<Rational>(k3, 0, uniform_fugacity(k3, lam)).value(), lam / (1 + 2 * lam));
}

TEST(Ratio, MatchesOccupationOdds) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_graph(9, 0.3, seed);
    const auto f = rational_fugacities(9, rng);
    for (Vertex v = 0; v < 9; ++v) {
      const auto r = ratio<Rational>(g, v, f);
      const auto [zin, zout] = oracle::conditional_sums(g, f, v);
      EXPECT_EQ(r.value(), zin / zout);
      EXPECT_GT(r.value(), 0);
    }
  }
}

TEST(Ratio, BothVanishIsAnError) {
  const auto edge = path_graph(2);
  // Z^{in} = lambda_0 = 0 and Z^{out} = 1 + lambda_1 = 0.
  EXPECT_THROW(ratio<Complex>(edge, 0, std::vector<Complex>{0.0, -1.0}), ValidationError);
}

TEST(ConditionalRatio, Examples) {
  const Rational lam(2, 5);
  const auto p3 = path_graph(3);
  BoundaryCondition c_in{{2, Spin::In}};
  EXPECT_EQ(conditional_ratio<Rational>(p3, c_in, 0, uniform_fugacity(p3, lam)).value(), lam);
  const auto star = star_graph(5);
  BoundaryCondition all_out;
  for (Vertex v = 1; v < 5; ++v) all_out.pin(v, Spin::Out);
  EXPECT_EQ(conditional_ratio<Rational>(star, all_out, 0, uniform_fugacity(star, lam)).value(), lam);
  BoundaryCondition one_in{{3, Spin::In}};
  EXPECT_EQ(conditional_ratio<Rational>(star, one_in, 0, uniform_fugacity(star, lam)).value(), 0);
}

TEST(ConditionalRatio, Errors) {
  const auto p3 = path_graph(3);
  const auto f = uniform_fugacity(p3, Rational(1));
  EXPECT_THROW(conditional_ratio<Rational>(p3, BoundaryCondition{{0, Spin::Out}}, 0, f), ValidationError);
  EXPECT_THROW(conditional_ratio<Rational>(p3, BoundaryCondition{{1, Spin::In}, {2, Spin::In}}, 0, f), ValidationError);
}

TEST(ConditionalRatio, MatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = random_graph(8, 0.3, seed + 300);
    const auto f = rational_fugacities(8, rng);
    // pin vertices 5..7 randomly, keeping the IN-set independent
    BoundaryCondition sigma;
    std::map<Vertex, bool> pins;
    for (Vertex u = 5; u < 8; ++u) {
      bool in = (rng() & 1U) != 0;
      for (const auto& [w, s] : pins)
        if (s && g.has_edge(u, w)) in = false;
      sigma.pin(u, in ? Spin::In : Spin::Out);
      pins[u] = in;
    }
    for (Vertex v = 0; v < 5; ++v) {
      const auto r = conditional_ratio<Rational>(g, sigma, v, f);
      const auto [zin, zout] = oracle::conditional_sums(g, f, v, pins);
      EXPECT_TRUE(r.equals(ProjectiveRatio<Rational>(zin, zout))) << seed << " " << v;
    }
  }
}

TEST(Occupation, Examples) {
  EXPECT_DOUBLE_EQ(occupation_probability(path_graph(1), 0, 1.0), 0.5);
  EXPECT_NEAR(occupation_probability(path_graph(2), 0, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(occupation_probability(path_graph(2), 0, 0.0), ValidationError);
}

TEST(Occupation, LowerBoundHolds) {
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 100; ++seed) {
    const auto g = random_graph(1 + static_cast<int>(seed % 10), 0.3, seed + 900);
    if (g.max_degree() > 4) continue;
    ++tested;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      const double p = occupation_probability(g, v, 1.0);
      EXPECT_GE(p, occupation_lower_bound(g.max_degree(), 1.0));
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Occupation, ConditionalMatchesMeasure) {
  const auto g = cycle_graph(6);
  const auto f = uniform_fugacity(g, Rational(1));
  const BoundaryCondition sigma{{3, Spin::In}};
  const Rational p = conditional_occupation<Rational>(g, sigma, 0, f);
  EXPECT_EQ(p, oracle::conditional_probability<Rational>(g, f, 0, {{3, true}}));
}
