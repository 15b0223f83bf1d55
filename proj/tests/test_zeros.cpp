#include "hardcore/zeros.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace hardcore;

namespace {

IndependencePolynomial poly(std::vector<long> c) {
  IndependencePolynomial p;
  p.coefficients.clear();
  for (long x : c) p.coefficients.emplace_back(x);
  return p;
}

// product of (x + r) and (x^2 + 2 a x + a^2 + b^2) factors, exact
IndependencePolynomial product(const std::vector<long>& linear, const std::vector<std::pair<long, long>>& quad) {
  std::vector<BigInt> c{BigInt(1)};
  auto mul = [&](const std::vector<BigInt>& f) {
    std::vector<BigInt> out(c.size() + f.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
    c = out;
  };
  for (long r : linear) mul({BigInt(r), BigInt(1)});
  for (auto [a, b] : quad) mul({BigInt(a * a + b * b), BigInt(2 * a), BigInt(1)});
  IndependencePolynomial p;
  p.coefficients = c;
  return p;
}

double max_match_error(const RootSet& rs, const std::vector<Complex>& expected) {
  double worst = 0.0;
  for (const auto& e : expected) worst = std::max(worst, nearest_root_distance(rs, e));
  return worst;
}

}  // namespace

TEST(PolyRoots, SmallExamples) {
  const auto a = poly_roots(poly({1, 3}));
  ASSERT_EQ(a.roots.size(), 1U);
  EXPECT_NEAR(a.roots[0].real(), -1.0 / 3.0, 1e-15);
  const auto c4 = z_poly(cycle_graph(4));
  EXPECT_EQ(c4, poly({1, 4, 2}));
  const auto b = poly_roots(c4);
  EXPECT_LT(max_match_error(b, {{-1 - 1 / std::sqrt(2.0), 0}, {-1 + 1 / std::sqrt(2.0), 0}}), 1e-14);
  EXPECT_TRUE(b.converged);
  EXPECT_THROW(poly_roots(poly({1})), ValidationError);
  const auto z = poly_roots(poly({0, 0, 2, 1}));
  EXPECT_LT(max_match_error(z, {{0, 0}, {-2, 0}}), 1e-14);
  EXPECT_EQ(z.roots.size(), 3U);
}

TEST(PolyRoots, KnownFactors) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long> lin(1, 9), re(-4, 4), im(1, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<long> l;
    std::vector<std::pair<long, long>> q;
    std::vector<Complex> expected;
    for (int i = 0; i < 1 + trial % 4; ++i) {
      l.push_back(lin(rng) * 10 + i);  // distinct
      expected.emplace_back(-static_cast<double>(l.back()), 0.0);
    }
    for (int i = 0; i < 1 + trial % 3; ++i) {
      const long a = re(rng) * 3 + i, b = im(rng) + 7 * i;
      q.emplace_back(a, b);
      expected.emplace_back(-a, b);
      expected.emplace_back(-a, -b);
    }
    const auto p = product(l, q);
    for (int bits : {53, 128}) {
      const auto rs = poly_roots(p, bits);
      EXPECT_TRUE(rs.converged) << trial;
      EXPECT_LT(max_match_error(rs, expected), 1e-10 * 50) << trial << " bits " << bits;
      EXPECT_LT(max_match_error(rs, expected) / 50.0, 1e-10);
    }
  }
}

TEST(PolyRoots, IndependencePolynomialProperties) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto g = random_graph(12, 0.3, seed);
    const auto p = z_poly(g);
    if (p.degree() < 1) continue;
    const auto rs = poly_roots(p);
    EXPECT_TRUE(rs.converged);
    EXPECT_EQ(static_cast<int>(rs.roots.size()), p.degree());
    EXPECT_LT(conjugate_symmetry_gap(rs), 1e-9);
    const auto scan = zero_free_scan(p, 1e6, 0.0);
    EXPECT_GT(scan.positive_axis_distance, 0.0);
  }
}

TEST(PolyRoots, HighPrecisionAgrees) {
  const auto p = z_poly(build_cayley_path_tree(2, 4, 0).to_graph());
  const auto lo = poly_roots(p, 160), hi = poly_roots(p, 256);
  EXPECT_LT(lo.residual, std::pow(2.0, -80));
  EXPECT_LT(max_match_error(lo, hi.roots), 1e-8);
  EXPECT_LT(max_match_error(hi, lo.roots), 1e-8);
}

TEST(Newton, LinearAndQuadratic) {
  const auto k3 = newton_zero(GraphTarget{complete_graph(3), 0}, {-0.25, 0.0});
  EXPECT_TRUE(k3.converged);
  EXPECT_NEAR(k3.lambda.real(), -1.0 / 3.0, 1e-12);
  EXPECT_LT(k3.residual, 1e-12);
  const auto p4 = RootedTree::from_graph(path_graph(4), 0);
  EXPECT_EQ(z_poly(path_graph(4)), poly({1, 4, 3}));
  const auto a = newton_zero(TreeTarget{p4}, {-0.3, 0.01});
  const auto b = newton_zero(TreeTarget{p4}, {-1.1, 0.01});
  EXPECT_LT(std::abs(a.lambda - Complex(-1.0 / 3.0, 0)), 1e-10);
  EXPECT_LT(std::abs(b.lambda - Complex(-1.0, 0)), 1e-10);
  ASSERT_TRUE(a.z_minus_v_abs);
  EXPECT_GT(*a.z_minus_v_abs, 1e-3);
}

TEST(Newton, TargetsAgree) {
  const auto t = build_cayley_path_tree(2, 2, 2);
  const Complex seed(-0.2, 0.3);
  NewtonOptions opt;
  const auto f = newton_zero(FamilyTarget{2, 2, 2}, seed, opt);
  const auto e = newton_zero(TreeTarget{t}, seed, opt);
  const auto g = newton_zero(GraphTarget{t.to_graph(), 0}, seed, opt);
  EXPECT_LT(std::abs(f.lambda - e.lambda), 1e-10);
  EXPECT_LT(std::abs(f.lambda - g.lambda), 1e-10);
}

TEST(Newton, BinaryTreeNearCritical) {
  const auto r = newton_zero(FamilyTarget{2, 6, 0}, std::polar(4.0, std::numbers::pi / 60));
  EXPECT_TRUE(r.converged);
  ASSERT_TRUE(r.z_residual);
  EXPECT_LT(*r.z_residual, 1e-9);
}

TEST(Newton, MatchesPolyRoots) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  NewtonOptions opt;
  opt.throw_on_failure = false;
  int matched = 0;
  for (int k = 0; k <= 5; ++k)
    for (int m = 0; m <= 2; ++m) {
      const auto t = build_cayley_path_tree(2, k, m);
      if (t.size() > 200 || t.size() < 2) continue;
      const auto rs = poly_roots(z_poly(t.to_graph()), 256);
      for (int s = 0; s < 5; ++s) {
        const auto r = newton_zero(FamilyTarget{2, k, m}, {u(rng), u(rng)}, opt);
        if (!r.converged) continue;
        EXPECT_LT(nearest_root_distance(rs, r.lambda), 1e-6) << k << " " << m;
        ++matched;
      }
    }
  EXPECT_GT(matched, 20);
}

TEST(Newton, Failures) {
  NewtonOptions opt;
  opt.max_iter = 1;
  EXPECT_THROW(newton_zero(FamilyTarget{2, 5, 0}, {50.0, 50.0}, opt), ConvergenceError);
  opt.throw_on_failure = false;
  EXPECT_FALSE(newton_zero(FamilyTarget{2, 5, 0}, {50.0, 50.0}, opt).converged);
  EXPECT_THROW(newton_zero(FamilyTarget{2, 1, 0}, {1.0, 0.0}, NewtonOptions{-1.0}), ValidationError);
}

TEST(ZeroFree, Examples) {
  const auto t3 = zero_free_scan(z_poly(build_cayley_path_tree(2, 3, 0).to_graph()), 3.0, 0.1);
  EXPECT_GT(t3.min_distance, 0.1);
  EXPECT_TRUE(t3.zero_free);
  const auto k2 = zero_free_scan(z_poly(complete_graph(2)), 0.3, 0.1);
  EXPECT_NEAR(k2.min_distance, 0.5, 1e-15);
  EXPECT_TRUE(k2.zero_free);
  EXPECT_FALSE(zero_free_scan(z_poly(complete_graph(2)), 0.3, 0.6).zero_free);
  const auto none = zero_free_scan(poly({1}), 1.0, 0.1);
  EXPECT_TRUE(none.zero_free);
  EXPECT_TRUE(std::isinf(none.min_distance));
}

TEST(Accumulation, TableShape) {
  const auto single = accumulation_experiment(2, {4}, [](int) { return 0; }, std::numbers::pi / 60);
  EXPECT_EQ(single.rows.size(), 1U);
  EXPECT_FALSE(single.pass);
  const auto rep = accumulation_experiment(2, {4, 5, 6}, [](int k) { return k; }, std::numbers::pi / 60);
  ASSERT_EQ(rep.rows.size(), 3U);
  EXPECT_EQ(rep.rows[2].m, 6);
  EXPECT_DOUBLE_EQ(rep.lambda_c, 4.0);
  for (const auto& row : rep.rows) {
    if (row.converged) {
      EXPECT_NEAR(row.distance, std::abs(row.lambda - 4.0), 1e-15);
    }
  }
  EXPECT_THROW(accumulation_experiment(2, {5, 4}, [](int) { return 0; }, 0.1), ValidationError);
  const auto three = accumulation_three_families(2, {4, 5}, [](int) { return 0; }, 0.1);
  ASSERT_EQ(three.size(), 3U);
  EXPECT_EQ(three[2].family, "T''");
  const auto j = to_json(rep);
  EXPECT_EQ(j["rows"].size(), 3U);
}

TEST(Output, RootsCsv) {
  std::ostringstream out;
  write_roots_csv(out, {{1, poly_roots(poly({1, 2}))}, {3, poly_roots(poly({3, 1}))}});
  EXPECT_EQ(out.str(), "re,im,k\n-0.5,0,1\n-3,0,3\n");
}
