#pragma once

// Complex zeros of independence polynomials.
//
// Two routes: Newton on h(lambda) = R(lambda) + 1 (Z_G = 0 iff R_{G,v} = -1
// when Z_{G-v} != 0), and Aberth-Ehrlich on the explicit coefficient list.

#include "hardcore/dual.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/format.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/mobius.hpp"
#include "hardcore/partition.hpp"
#include "hardcore/tree_ratio.hpp"

#include <boost/multiprecision/mpfr.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hardcore {

// ---------------------------------------------------------------------------
// Aberth-Ehrlich

namespace detail {

// std::complex is only specified for float types, so the solver carries its
// own pair for the multiprecision case.
template <class R>
struct Cx {
  R re{0}, im{0};
  Cx() = default;
  Cx(R r, R i = R(0)) : re(std::move(r)), im(std::move(i)) {}
  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend Cx operator/(const Cx& a, const Cx& b) {
    // Smith's algorithm
    using std::abs;
    if (abs(b.re) >= abs(b.im)) {
      const R r = b.im / b.re, den = b.re + b.im * r;
      return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
    }
    const R r = b.re / b.im, den = b.re * r + b.im;
    return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
  }
  R abs() const {
    using std::sqrt;
    return sqrt(re * re + im * im);
  }
  bool is_zero() const { return re == 0 && im == 0; }
};

// p(z) / p'(z) with coefficients a[0..N]; for |z| > 1 the reversed polynomial
// is used so Horner does not overflow.
template <class R>
Cx<R> newton_correction(const std::vector<R>& a, const Cx<R>& z) {
  const int n = static_cast<int>(a.size()) - 1;
  if (z.abs() <= R(1)) {
    Cx<R> p(a[static_cast<std::size_t>(n)]), dp(R(0));
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + Cx<R>(a[static_cast<std::size_t>(i)]);
    }
    if (p.is_zero()) return Cx<R>(R(0));
    return p / dp;
  }
  const Cx<R> w = Cx<R>(R(1)) / z;
  Cx<R> q(a[0]), dq(R(0));
  for (int i = 1; i <= n; ++i) {
    dq = dq * w + q;
    q = q * w + Cx<R>(a[static_cast<std::size_t>(i)]);
  }
  if (q.is_zero()) return Cx<R>(R(0));
  // p(z) = z^n q(w):  p'/p = n/z - w^2 q'(w)/q(w)
  const Cx<R> logderiv = Cx<R>(R(n)) * w - w * w * dq / q;
  return Cx<R>(R(1)) / logderiv;
}

template <class R>
R horner_abs_residual(const std::vector<R>& a, const Cx<R>& z, R& scale) {
  Cx<R> p(R(0));
  R s(0);
  const R mod = z.abs();
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    using std::abs;
    p = p * z + Cx<R>(*it);
    s = s * mod + abs(*it);
  }
  scale = s;
  return p.abs();
}

struct AberthOutcome {
  std::vector<Complex> roots;
  double residual = 0.0;  // max |p(z)| / sum |a_i||z|^i
  int iterations = 0;
  bool converged = false;
};

template <class R>
bool finite(const Cx<R>& z) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(z.re) && isfinite(z.im);
}

// eps: relative step size at which a root counts as converged; noise_floor:
// relative residual at which further steps only chase rounding.
template <class R>
AberthOutcome aberth(const std::vector<R>& a, R eps, R noise_floor, int max_iter) {
  using std::abs;
  using std::pow;
  const int n = static_cast<int>(a.size()) - 1;
  const double ratio = std::abs(static_cast<double>(a[0] / a[static_cast<std::size_t>(n)]));
  const double radius = 1.1 * std::pow(ratio, 1.0 / n);
  std::vector<Cx<R>> z;
  z.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    // deterministic jitter keeps starts off any symmetry axis of the roots
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4 + 0.05 * std::sin(3.0 * k + 1.0);
    z.emplace_back(R(radius * std::cos(theta)), R(radius * std::sin(theta)));
  }
  AberthOutcome out;
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    bool all_done = true;
    for (int k = 0; k < n; ++k) {
      if (done[static_cast<std::size_t>(k)]) continue;
      const Cx<R> corr = newton_correction(a, z[static_cast<std::size_t>(k)]);
      Cx<R> sum(R(0));
      for (int j = 0; j < n; ++j)
        if (j != k) sum = sum + Cx<R>(R(1)) / (z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)]);
      const Cx<R> w = corr / (Cx<R>(R(1)) - corr * sum);
      auto& zk = z[static_cast<std::size_t>(k)];
      if (!finite(w)) {
        // coincident approximations; nudge and retry next sweep
        zk = zk * Cx<R>(R(1) + eps * 1024, eps * 1024);
        all_done = false;
        continue;
      }
      zk = zk - w;
      R scale;
      const R res = horner_abs_residual(a, zk, scale);
      if (w.abs() <= eps * zk.abs() || res <= noise_floor * scale)
        done[static_cast<std::size_t>(k)] = true;
      else
        all_done = false;
    }
    if (all_done) {
      out.converged = true;
      break;
    }
  }
  double worst = 0.0;
  for (const auto& r : z) {
    R scale;
    const R res = horner_abs_residual(a, r, scale);
    const double rel = static_cast<double>(res / scale);
    if (!(rel <= worst)) worst = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
    out.roots.emplace_back(static_cast<double>(r.re), static_cast<double>(r.im));
  }
  out.residual = worst;
  return out;
}

}  // namespace detail

struct RootSet {
  std::vector<Complex> roots;  // sorted by (re, im)
  double residual = 0.0;       // max over roots of |p(z)| / sum |a_i||z|^i
  int precision_bits = 53;
  int iterations = 0;
  bool converged = true;
};

/// All complex roots of p by Aberth-Ehrlich iteration carried out with
/// `precision_bits` of mantissa (double for <= 53, MPFR above). Converged
/// means residual < 2^(-precision_bits/2). Tree polynomials have roots of high
/// multiplicity, which double precision resolves only to ~eps^(1/mult).
inline RootSet poly_roots(const IndependencePolynomial& p, int precision_bits = 128, int max_iter = 2000) {
  detail::require(precision_bits >= 24, "poly_roots: precision_bits must be at least 24");
  RootSet out;
  out.precision_bits = precision_bits;
  std::vector<BigInt> c = p.coefficients;
  while (!c.empty() && c.back() == 0) c.pop_back();
  detail::require(c.size() >= 2, "poly_roots: polynomial degree must be at least 1");
  std::size_t zeros = 0;
  while (c[zeros] == 0) ++zeros;
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));
  for (std::size_t i = 0; i < zeros; ++i) out.roots.emplace_back(0.0, 0.0);
  if (c.size() >= 2) {
    detail::AberthOutcome res;
    if (precision_bits <= 53) {
      std::vector<double> a;
      for (const auto& x : c) a.push_back(x.convert_to<double>());
      constexpr double ulp = std::numeric_limits<double>::epsilon();
      res = detail::aberth<double>(a, 4.0 * ulp, 16.0 * ulp, max_iter);
    } else {
      using boost::multiprecision::mpfr_float;
      // MPFR default precision is process-global in this Boost version
      static std::mutex guard;
      std::lock_guard<std::mutex> lock(guard);
      const unsigned digits10 = static_cast<unsigned>(std::ceil(precision_bits * 0.30103)) + 1;
      const unsigned saved = mpfr_float::default_precision();
      mpfr_float::default_precision(digits10);
      std::vector<mpfr_float> a;
      for (const auto& x : c) a.emplace_back(x);
      const mpfr_float ulp = boost::multiprecision::pow(mpfr_float(2), -precision_bits);
      res = detail::aberth<mpfr_float>(a, ulp * 16, ulp * 64, max_iter);
      mpfr_float::default_precision(saved);
    }
    out.roots.insert(out.roots.end(), res.roots.begin(), res.roots.end());
    out.residual = res.residual;
    out.iterations = res.iterations;
  }
  out.converged = out.residual < std::pow(2.0, -precision_bits / 2.0);
  std::sort(out.roots.begin(), out.roots.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

/// Distance from z to the nearest root.
inline double nearest_root_distance(const RootSet& rs, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rs.roots) best = std::min(best, std::abs(r - z));
  return best;
}

/// Largest distance from a root to the nearest root of its conjugate image.
inline double conjugate_symmetry_gap(const RootSet& rs) {
  double worst = 0.0;
  for (const auto& r : rs.roots) worst = std::max(worst, nearest_root_distance(rs, std::conj(r)));
  return worst;
}

// ---------------------------------------------------------------------------
// Newton on the ratio equation

struct FamilyTarget {
  int d = 2, k = 0, m = 0;
};
struct TreeTarget {
  RootedTree tree;
};
struct GraphTarget {
  Graph graph;
  Vertex v = 0;
};
using ZeroTarget = std::variant<FamilyTarget, TreeTarget, GraphTarget>;

struct NewtonOptions {
  double tol = 1e-12;  // on |R(lambda) + 1|
  int max_iter = 100;
  bool throw_on_failure = true;
  int cross_check_vertices = 300;  // explicit polynomial check when the tree/graph is at most this big
  double max_step = 0.5;           // steps longer than max_step * (1 + |lambda|) are shortened; 0 disables
};

struct ZeroSearchResult {
  Complex lambda{0.0, 0.0};
  double residual = std::numeric_limits<double>::infinity();  // |R(lambda) + 1|
  int newton_iterations = 0;
  bool converged = false;
  // explicit polynomial check, when the instance is small enough
  std::optional<double> z_residual;      // |Z_G| / sum |a_i||lambda|^i
  std::optional<double> z_minus_v_abs;   // |Z_{G-v}(lambda)|
};

namespace detail {

using CDual = Dual<Complex>;

// h(lambda) = R(lambda) + 1 and its derivative.
inline std::pair<Complex, Complex> ratio_plus_one(const ZeroTarget& target, Complex lambda) {
  const CDual x = CDual::variable(lambda);
  ProjectiveRatio<CDual> r;
  if (const auto* f = std::get_if<FamilyTarget>(&target)) {
    r = iterate_family_ratio<CDual>(f->d, f->k, f->m, x);
  } else if (const auto* t = std::get_if<TreeTarget>(&target)) {
    const std::vector<CDual> fug(static_cast<std::size_t>(t->tree.size()), x);
    r = tree_ratio<CDual>(t->tree, fug);
  } else {
    throw std::logic_error("ratio_plus_one: graph targets go through polynomials");
  }
  const CDual h = (r.num() + r.den()) / r.den();
  return {h.value, h.deriv};
}

struct GraphPolys {
  IndependencePolynomial whole, minus_v, minus_closed;
};

inline GraphPolys graph_polys(const Graph& g, Vertex v) {
  detail::require(g.contains(v), "newton_zero: vertex not in graph");
  std::vector<bool> keep(static_cast<std::size_t>(g.vertex_count()), true), keep2 = keep;
  keep[static_cast<std::size_t>(v)] = false;
  keep2[static_cast<std::size_t>(v)] = false;
  for (Vertex w : g.neighbors(v)) keep2[static_cast<std::size_t>(w)] = false;
  return {z_poly(g), z_poly(g.induced_subgraph(keep)), z_poly(g.induced_subgraph(keep2))};
}

}  // namespace detail

/// Explicit graph and distinguished vertex behind a target (built on demand).
inline std::pair<Graph, Vertex> target_graph(const ZeroTarget& target) {
  if (const auto* f = std::get_if<FamilyTarget>(&target)) return {build_cayley_path_tree(f->d, f->k, f->m).to_graph(), 0};
  if (const auto* t = std::get_if<TreeTarget>(&target)) return {t->tree.to_graph(), 0};
  const auto& g = std::get<GraphTarget>(target);
  return {g.graph, g.v};
}

inline int target_vertex_count(const ZeroTarget& target) {
  if (const auto* f = std::get_if<FamilyTarget>(&target)) {
    // 1 + d + ... + d^k core plus d^k paths of m vertices
    double n = 0, p = 1;
    for (int i = 0; i <= f->k; ++i, p *= f->d) n += p;
    n += (p / f->d) * f->m;
    return n > 1e9 ? std::numeric_limits<int>::max() : static_cast<int>(n);
  }
  if (const auto* t = std::get_if<TreeTarget>(&target)) return t->tree.size();
  return std::get<GraphTarget>(target).graph.vertex_count();
}

/// Newton iteration on h = R + 1 from lambda0. Derivatives come from dual
/// numbers pushed through the same recursion that evaluates R.
inline ZeroSearchResult newton_zero(const ZeroTarget& target, Complex lambda0, const NewtonOptions& opt = {}) {
  detail::require(opt.tol > 0.0, "newton_zero: tol must be positive");
  detail::require(opt.max_iter >= 1, "newton_zero: max_iter must be at least 1");
  if (const auto* f = std::get_if<FamilyTarget>(&target))
    detail::require(f->d >= 1 && f->k >= 0 && f->m >= 0, "newton_zero: need d >= 1, k, m >= 0");

  std::optional<detail::GraphPolys> polys;
  if (const auto* g = std::get_if<GraphTarget>(&target)) polys = detail::graph_polys(g->graph, g->v);
  auto h_of = [&](Complex lam) -> std::pair<Complex, Complex> {
    if (!polys) return detail::ratio_plus_one(target, lam);
    using detail::CDual;
    const CDual x = CDual::variable(lam);
    const CDual zin = x * polys->minus_closed.evaluate<CDual>(x);
    const CDual zout = polys->minus_v.evaluate<CDual>(x);
    const CDual h = (zin + zout) / zout;
    return {h.value, h.deriv};
  };

  ZeroSearchResult res;
  Complex lam = lambda0;
  for (int it = 0; it <= opt.max_iter; ++it) {
    const auto [h, dh] = h_of(lam);
    res.lambda = lam;
    res.residual = std::abs(h);
    res.newton_iterations = it;
    if (!std::isfinite(res.residual)) break;
    if (res.residual < opt.tol) {
      res.converged = true;
      break;
    }
    if (it == opt.max_iter) break;
    if (std::abs(dh) == 0.0 || !std::isfinite(std::abs(dh))) {
      if (opt.throw_on_failure) throw ConvergenceError("newton_zero: derivative vanished at lambda = " + fmt17(lam.real()) + (lam.imag() < 0 ? "" : "+") + fmt17(lam.imag()) + "i");
      return res;
    }
    Complex step = h / dh;
    const double cap = opt.max_step * (1.0 + std::abs(lam));
    if (opt.max_step > 0.0 && std::abs(step) > cap) step *= cap / std::abs(step);
    lam -= step;
  }
  if (!res.converged) {
    if (opt.throw_on_failure)
      throw ConvergenceError("newton_zero: no convergence after " + std::to_string(res.newton_iterations) +
                             " iterations (residual " + fmt17(res.residual) + ")");
    return res;
  }
  if (target_vertex_count(target) <= opt.cross_check_vertices) {
    const auto [g, v] = target_graph(target);
    const auto p = polys ? *polys : detail::graph_polys(g, v);
    double scale = 0.0;
    for (auto it = p.whole.coefficients.rbegin(); it != p.whole.coefficients.rend(); ++it)
      scale = scale * std::abs(res.lambda) + it->convert_to<double>();
    res.z_residual = std::abs(p.whole.evaluate<Complex>(res.lambda)) / scale;
    res.z_minus_v_abs = std::abs(p.minus_v.evaluate<Complex>(res.lambda));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Zero-free segment scan

struct ZeroFreeScan {
  double min_distance = std::numeric_limits<double>::infinity();
  Complex closest_root{std::numeric_limits<double>::quiet_NaN(), 0.0};
  double delta = 0.0;
  bool zero_free = true;          // min_distance > delta
  double positive_axis_distance = std::numeric_limits<double>::infinity();
  std::size_t roots = 0;
};

inline double distance_to_segment(Complex z, double a, double b) {
  const double x = std::clamp(z.real(), a, b);
  return std::abs(z - Complex(x, 0.0));
}

/// Distance of every root of p to the real segment [0, lambda_star]; the tube
/// of radius delta is zero-free when the minimum exceeds delta.
inline ZeroFreeScan zero_free_scan(const IndependencePolynomial& p, double lambda_star, double delta, int precision_bits = 128) {
  detail::require(lambda_star >= 0.0 && std::isfinite(lambda_star), "zero_free_scan: lambda* must be finite and >= 0");
  detail::require(delta >= 0.0, "zero_free_scan: delta must be >= 0");
  ZeroFreeScan scan;
  scan.delta = delta;
  if (p.degree() < 1) return scan;
  const auto rs = poly_roots(p, precision_bits);
  scan.roots = rs.roots.size();
  for (const auto& r : rs.roots) {
    const double dist = distance_to_segment(r, 0.0, lambda_star);
    if (dist < scan.min_distance) {
      scan.min_distance = dist;
      scan.closest_root = r;
    }
    scan.positive_axis_distance = std::min(scan.positive_axis_distance, distance_to_segment(r, 0.0, std::numeric_limits<double>::max()));
  }
  scan.zero_free = scan.min_distance > delta;
  return scan;
}

// ---------------------------------------------------------------------------
// Accumulation at lambda_c(d+1)

struct AccumulationRow {
  int k = 0;
  int m = 0;
  Complex lambda{0.0, 0.0};
  double distance = 0.0;  // |lambda_k - lambda_c(d+1)|
  double residual = 0.0;
  bool converged = false;
};

struct AccumulationReport {
  std::string family = "T";
  int d = 2;
  double lambda_c = 0.0;
  double seed_angle = 0.0;
  std::vector<AccumulationRow> rows;
  bool monotone = false;               // distances strictly decreasing over converged rows
  std::optional<double> shrink_ratio;  // final / first distance (needs 2+ converged rows)
  std::optional<bool> pass;            // shrink_ratio <= 1/4
};

struct AccumulationOptions {
  NewtonOptions newton{1e-12, 200, false, 0, 0.5};
  double seed_radius_factor = 1.0;  // first seed lambda_c * factor * e^{i angle}
  // Tree depth shift: 0 for T_k, 1 for T'_k = T_{d^(k-1), 1^m(k)}, 2 for T''_k.
  int depth_shift = 0;
};

/// For each k, Newton from the previous zero (or from lambda_c e^{i angle} for
/// the first k) on T_{d^(k-shift), 1^m(k)}. Tracking is heuristic: each step
/// follows whichever zero Newton lands on.
inline AccumulationReport accumulation_experiment(int d, const std::vector<int>& k_values, const std::function<int(int)>& m_rule,
                                                  double seed_angle, const AccumulationOptions& opt = {}) {
  detail::require(d >= 2, "accumulation_experiment: d must be at least 2");
  detail::require(!k_values.empty(), "accumulation_experiment: empty k range");
  detail::require(std::is_sorted(k_values.begin(), k_values.end()), "accumulation_experiment: k range must be ascending");
  AccumulationReport rep;
  rep.family = opt.depth_shift == 0 ? "T" : opt.depth_shift == 1 ? "T'" : "T''";
  rep.d = d;
  rep.lambda_c = lambda_c(d + 1);
  rep.seed_angle = seed_angle;
  Complex seed = std::polar(rep.lambda_c * opt.seed_radius_factor, seed_angle);
  for (int k : k_values) {
    const int depth = k - opt.depth_shift;
    detail::require(depth >= 0, "accumulation_experiment: k smaller than the depth shift");
    const int m = m_rule(k);
    const auto res = newton_zero(FamilyTarget{d, depth, m}, seed, opt.newton);
    AccumulationRow row{k, m, res.lambda, std::abs(res.lambda - rep.lambda_c), res.residual, res.converged};
    rep.rows.push_back(row);
    if (res.converged) seed = res.lambda;
  }
  std::vector<double> dist;
  for (const auto& r : rep.rows)
    if (r.converged) dist.push_back(r.distance);
  rep.monotone = dist.size() >= 2;
  for (std::size_t i = 1; i < dist.size(); ++i) rep.monotone = rep.monotone && dist[i] < dist[i - 1];
  if (dist.size() >= 2) {
    rep.shrink_ratio = dist.back() / dist.front();
    rep.pass = *rep.shrink_ratio <= 0.25;
  }
  return rep;
}

/// The three families T, T', T'' for one m rule.
inline std::vector<AccumulationReport> accumulation_three_families(int d, const std::vector<int>& k_values,
                                                                   const std::function<int(int)>& m_rule, double seed_angle,
                                                                   AccumulationOptions opt = {}) {
  std::vector<AccumulationReport> out;
  for (int shift = 0; shift <= 2; ++shift) {
    std::vector<int> ks;
    for (int k : k_values)
      if (k - shift >= 0) ks.push_back(k);
    if (ks.empty()) continue;
    opt.depth_shift = shift;
    out.push_back(accumulation_experiment(d, ks, m_rule, seed_angle, opt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline void write_roots_csv(std::ostream& out, const std::vector<std::pair<int, RootSet>>& sets) {
  out << "re,im,k\n";
  for (const auto& [k, rs] : sets)
    for (const auto& r : rs.roots) out << fmt17(r.real()) << ',' << fmt17(r.imag()) << ',' << k << '\n';
}

inline nlohmann::json complex_json(Complex z) {
  return nlohmann::json::array({json_number<nlohmann::json>(z.real()), json_number<nlohmann::json>(z.imag())});
}

inline nlohmann::json to_json(const ZeroSearchResult& r) {
  nlohmann::json j;
  j["lambda"] = complex_json(r.lambda);
  j["residual"] = json_number<nlohmann::json>(r.residual);
  j["newton_iterations"] = r.newton_iterations;
  j["converged"] = r.converged;
  j["z_residual"] = r.z_residual ? json_number<nlohmann::json>(*r.z_residual) : nlohmann::json(nullptr);
  j["z_minus_v_abs"] = r.z_minus_v_abs ? json_number<nlohmann::json>(*r.z_minus_v_abs) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const AccumulationReport& r) {
  nlohmann::json j;
  j["family"] = r.family;
  j["d"] = r.d;
  j["lambda_c"] = json_number<nlohmann::json>(r.lambda_c);
  j["seed_angle"] = json_number<nlohmann::json>(r.seed_angle);
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"k", row.k},
                         {"m", row.m},
                         {"lambda", complex_json(row.lambda)},
                         {"distance", json_number<nlohmann::json>(row.distance)},
                         {"residual", json_number<nlohmann::json>(row.residual)},
                         {"converged", row.converged}});
  j["monotone"] = r.monotone;
  j["shrink_ratio"] = r.shrink_ratio ? json_number<nlohmann::json>(*r.shrink_ratio) : nlohmann::json(nullptr);
  j["pass"] = r.pass ? nlohmann::json(*r.pass) : nlohmann::json(nullptr);
  return j;
}

}  // namespace hardcore
