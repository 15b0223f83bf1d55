#include "hardcore/spectral.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hardcore;

namespace {

template <class T>
T oracle_influence(const Graph& g, const T& lambda, Vertex u, Vertex v) {
  const std::vector<T> fug(static_cast<std::size_t>(g.vertex_count()), lambda);
  return oracle::conditional_probability<T>(g, fug, v, {{u, true}}) - oracle::conditional_probability<T>(g, fug, v, {{u, false}});
}

}  // namespace

TEST(Influence, K2Exact) {
  const auto g = complete_graph(2);
  for (const Rational& lam : {Rational(1), Rational(3, 7), Rational(5)}) {
    const auto m = influence_entries<Rational>(g, lam);
    EXPECT_EQ(m[0][0], 0);
    EXPECT_EQ(m[1][1], 0);
    EXPECT_EQ(m[0][1], -lam / (1 + lam));
    EXPECT_EQ(m[1][0], -lam / (1 + lam));
  }
  EXPECT_EQ(influence<Rational>(g, Rational(1), 0, 1), Rational(-1, 2));
}

TEST(Influence, SimpleCases) {
  const Graph two(2, {});
  EXPECT_EQ(influence<Rational>(two, Rational(2), 0, 1), 0);
  const auto p3 = path_graph(3);
  EXPECT_EQ(influence<Rational>(p3, Rational(1), 0, 2), oracle_influence<Rational>(p3, Rational(1), 0, 2));
  EXPECT_THROW(influence<double>(p3, 1.0, 1, 1), ValidationError);
  EXPECT_THROW(influence<double>(p3, -1.0, 0, 1), ValidationError);
}

TEST(Influence, MatchesEnumeration) {
  std::vector<Graph> graphs{path_graph(6), cycle_graph(7), complete_graph(5), star_graph(8)};
  for (std::uint64_t s = 0; s < 8; ++s) graphs.push_back(random_graph(10, 0.3, s));
  for (const auto& g : graphs)
    for (double lam : {0.5, 1.0, 3.0}) {
      const auto m = influence_matrix(g, lam);
      for (Vertex u = 0; u < g.vertex_count(); ++u)
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
          if (u == v) {
            EXPECT_EQ(m.entries(u, v), 0.0);
            continue;
          }
          EXPECT_NEAR(m.entries(u, v), oracle_influence<double>(g, lam, u, v), 1e-12);
          EXPECT_LE(std::abs(m.entries(u, v)), 1.0);
        }
    }
}

TEST(Spectrum, Examples) {
  const auto k2 = spectral_report(complete_graph(2), 1.0);
  ASSERT_EQ(k2.eigenvalues.size(), 2U);
  EXPECT_NEAR(k2.eigenvalues[0].real(), 0.5, 1e-15);
  EXPECT_NEAR(k2.eigenvalues[1].real(), -0.5, 1e-15);
  EXPECT_NEAR(k2.max_real, 0.5, 1e-15);
  EXPECT_TRUE(k2.has_negative);
  const auto empty = spectral_report(Graph(4, {}), 2.0);
  for (const auto& z : empty.eigenvalues) EXPECT_EQ(std::abs(z), 0.0);
  const auto p4 = spectral_report(path_graph(4), 1.0);
  EXPECT_EQ(p4.eigenvalues.size(), 4U);
  EXPECT_TRUE(p4.real_spectrum);
  EXPECT_LT(p4.max_abs_imag, 1e-9);
}

TEST(Spectrum, RealOnRandomGraphs) {
  for (std::uint64_t s = 0; s < 20; ++s)
    for (double lam : {0.3, 1.0, 4.0}) {
      const auto rep = spectral_report(random_graph(9, 0.35, s), lam);
      EXPECT_TRUE(rep.real_spectrum) << s << " " << lam << " " << rep.max_abs_imag;
    }
}

TEST(Spectrum, SubgraphSweep) {
  const auto sw = induced_subgraph_sweep(cycle_graph(6), 1.0);
  EXPECT_EQ(sw.subgraphs, 63U);
  EXPECT_TRUE(sw.all_real);
  EXPECT_GT(sw.with_negative, 0U);
  EXPECT_GE(sw.max_eigenvalue, spectral_report(cycle_graph(6), 1.0).max_real);
  EXPECT_THROW(induced_subgraph_sweep(path_graph(9), 1.0), ValidationError);
}

TEST(Spectrum, FamilyProbe) {
  const auto rows = spectral_family_probe(3, {1, 2, 3, 4}, 1.0);
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_EQ(rows[3].vertices, 31);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.real_spectrum);
    EXPECT_LT(r.max_eigenvalue, 10.0);
  }
  const auto j = to_json(spectral_report(path_graph(3), 1.0));
  EXPECT_EQ(j["eigenvalues"].size(), 3U);
}
