#pragma once

// Dynamics of f_lambda(z) = lambda / (1 + z) and f_{d,lambda}(z) = lambda / (1 + z)^d.
//
// Non-autonomous part: a finite sequence lambda_1..lambda_n, its forward
// compositions F_n, the anchor orbit w_0..w_n in (-1 - lambda_max, -1) obtained
// as a backward limit from -1, and the affine maps g_n = phi_n o f_n o phi_{n-1}^{-1}
// with phi_j(z) = 1 / (z - w_j).
//
// Autonomous part: fixed point and 2-cycle of f_{d,lambda}, the critical
// fugacity lambda_c, and the root ratio of T_{d^k, 1^m}.

#include "hardcore/arith.hpp"
#include "hardcore/dual.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/format.hpp"
#include "hardcore/projective.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hardcore {

struct MobiusSequence {
  std::vector<double> lambdas;  // lambda_1..lambda_n
  double lambda_max = 0.0;

  MobiusSequence() = default;
  MobiusSequence(std::vector<double> l, double cap) : lambdas(std::move(l)), lambda_max(cap) {
    detail::require(lambda_max > 0.0 && std::isfinite(lambda_max), "lambda_max must be positive");
    for (double x : lambdas)
      detail::require(x > 0.0 && x <= lambda_max, "sequence entries must lie in (0, lambda_max]");
  }

  static MobiusSequence constant(double lambda, int n) { return {std::vector<double>(static_cast<std::size_t>(n), lambda), lambda}; }

  int size() const { return static_cast<int>(lambdas.size()); }
  /// lambda_j for j = 1..n
  double at(int j) const { return lambdas[static_cast<std::size_t>(j - 1)]; }
};

/// z_0 = z, z_i = f_{lambda_i}(z_{i-1}).
template <class T>
std::vector<ProjectiveRatio<T>> compose_forward(const MobiusSequence& seq, ProjectiveRatio<T> z) {
  std::vector<ProjectiveRatio<T>> orbit{z};
  for (double l : seq.lambdas) {
    z = mobius_step(from_double<T>(l), z);
    orbit.push_back(z);
  }
  return orbit;
}

// ---------------------------------------------------------------------------
// Anchor orbit

struct AnchorOrbit {
  std::vector<double> w;  // w_0..w_n
  double lambda_max = 0.0;
  int padding = 0;        // tail steps used for the backward limit

  int size() const { return static_cast<int>(w.size()) - 1; }
  bool contained() const {
    return std::all_of(w.begin(), w.end(), [&](double x) { return x > -1.0 - lambda_max && x < -1.0; });
  }
};

struct AnchorOptions {
  std::optional<double> tail;  // padding fugacity; defaults to lambda_max
  double tol = 1e-14;
  int max_padding = 10000;
};

/// w_j = lim_m (f_m o ... o f_{j+1})^{-1}(-1), truncated: the sequence is padded
/// with a constant tail and the backward iteration from -1 is lengthened until
/// the whole orbit moves by less than tol.
inline AnchorOrbit anchor_orbit(const MobiusSequence& seq, const AnchorOptions& opt = {}) {
  const double tail = opt.tail.value_or(seq.lambda_max);
  detail::require(tail > 0.0 && tail <= seq.lambda_max, "anchor tail must lie in (0, lambda_max]");
  detail::require(opt.tol > 0.0, "anchor tolerance must be positive");
  const int n = seq.size();
  AnchorOrbit out;
  out.lambda_max = seq.lambda_max;
  std::vector<double> previous;
  double end = -1.0;  // backward image of -1 through the padding so far
  for (int pad = 1; pad <= opt.max_padding; ++pad) {
    end = tail / end - 1.0;
    std::vector<double> w(static_cast<std::size_t>(n + 1));
    w[static_cast<std::size_t>(n)] = end;
    for (int j = n - 1; j >= 0; --j) w[static_cast<std::size_t>(j)] = seq.at(j + 1) / w[static_cast<std::size_t>(j + 1)] - 1.0;
    if (!previous.empty()) {
      double change = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) change = std::max(change, std::abs(w[i] - previous[i]));
      if (change < opt.tol) {
        out.w = std::move(w);
        out.padding = pad;
        return out;
      }
    }
    previous = std::move(w);
  }
  throw ConvergenceError("anchor orbit did not converge within " + std::to_string(opt.max_padding) + " padding steps");
}

/// Closed form of the anchor for a constant sequence: the root of w^2 + w - lambda
/// below -1.
inline double constant_anchor(double lambda) { return (-1.0 - std::sqrt(1.0 + 4.0 * lambda)) / 2.0; }

/// max_j |w_j - (-1 + lambda_{j+1} / w_{j+1})|
inline double backward_consistency(const MobiusSequence& seq, const AnchorOrbit& orbit) {
  double worst = 0.0;
  for (int j = 0; j < orbit.size(); ++j)
    worst = std::max(worst, std::abs(orbit.w[static_cast<std::size_t>(j)] -
                                     (-1.0 + seq.at(j + 1) / orbit.w[static_cast<std::size_t>(j + 1)])));
  return worst;
}

/// Forward iteration from w_0 + eps, continued with the constant tail after the
/// sequence ends. Returns the first step at which the orbit leaves the open
/// left half-plane, or -1 if it stays for max_steps.
inline int uniqueness_probe(const MobiusSequence& seq, const AnchorOrbit& orbit, double eps, double tail,
                            int max_steps = 10000) {
  ProjectiveRatio<double> z = ProjectiveRatio<double>::finite(orbit.w.front() + eps);
  for (int step = 1; step <= max_steps; ++step) {
    const double l = step <= seq.size() ? seq.at(step) : tail;
    z = mobius_step(l, z);
    if (z.is_infinite()) continue;
    if (z.value() >= 0.0) return step;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Affine conjugates

struct AffineStep {
  Complex a;
  Complex b;
  Complex operator()(Complex zeta) const { return a * zeta + b; }
};

/// phi_j(z) = 1 / (z - w_j)
inline Complex phi(const AnchorOrbit& orbit, int j, Complex z) { return 1.0 / (z - orbit.w[static_cast<std::size_t>(j)]); }

/// g_1..g_n with g_j(zeta) = a_j zeta + b_j, a_j = -(w_{j-1} + 1) / w_j, b_j = -1 / w_j.
inline std::vector<AffineStep> affine_conjugates(const AnchorOrbit& orbit) {
  std::vector<AffineStep> g;
  for (int j = 1; j <= orbit.size(); ++j) {
    const double wj = orbit.w[static_cast<std::size_t>(j)], wp = orbit.w[static_cast<std::size_t>(j - 1)];
    g.push_back({Complex(-(wp + 1.0) / wj, 0.0), Complex(-1.0 / wj, 0.0)});
  }
  return g;
}

/// max_n |phi_n(F_n(z)) - G_n(phi_0(z))| over n = 1..len(seq).
inline double commutation_check(const MobiusSequence& seq, const AnchorOrbit& orbit, Complex z) {
  const auto g = affine_conjugates(orbit);
  Complex fz = z;
  Complex zeta = phi(orbit, 0, z);
  double worst = 0.0;
  for (int j = 1; j <= seq.size(); ++j) {
    fz = seq.at(j) / (1.0 + fz);
    zeta = g[static_cast<std::size_t>(j - 1)](zeta);
    worst = std::max(worst, std::abs(phi(orbit, j, fz) - zeta));
  }
  return worst;
}

/// G_n' = (-1)^n (w_0 + 1) / w_n * prod_{j=1}^{n-1} (w_j + 1) / w_j.
inline double G_derivative(const AnchorOrbit& orbit, int n = -1) {
  if (n < 0) n = orbit.size();
  detail::require(n >= 1 && n <= orbit.size(), "G_derivative: n out of range");
  const auto& w = orbit.w;
  double value = (n % 2 == 0 ? 1.0 : -1.0) * (w[0] + 1.0) / w[static_cast<std::size_t>(n)];
  for (int j = 1; j < n; ++j) value *= (w[static_cast<std::size_t>(j)] + 1.0) / w[static_cast<std::size_t>(j)];
  return value;
}

/// prod_{j<=n} a_j, the slope of G_n computed step by step.
inline double slope_product(const AnchorOrbit& orbit, int n = -1) {
  if (n < 0) n = orbit.size();
  const auto g = affine_conjugates(orbit);
  double p = 1.0;
  for (int j = 0; j < n; ++j) p *= g[static_cast<std::size_t>(j)].a.real();
  return p;
}

/// dG_n/dzeta at zeta by forward-mode duals through g_n o ... o g_1.
inline Complex G_derivative_dual(const AnchorOrbit& orbit, Complex zeta, int n = -1) {
  if (n < 0) n = orbit.size();
  using D = Dual<Complex>;
  const auto g = affine_conjugates(orbit);
  D x = D::variable(zeta);
  for (int j = 0; j < n; ++j) x = g[static_cast<std::size_t>(j)].a * x + g[static_cast<std::size_t>(j)].b;
  return x.deriv;
}

// ---------------------------------------------------------------------------
// Perturbation

struct PerturbationReport {
  std::vector<double> w_gap;             // |w_n - w^_n|, n = 0..N
  std::vector<double> scaled_gap;        // |w_n - w^_n| / alpha^n
  std::vector<double> derivative_ratio;  // max(|G'_n / G^'_n|, |G^'_n / G'_n|), n = 1..N
  double sup_scaled_gap = 0.0;
  double sup_derivative_ratio = 0.0;
  bool bounded = true;
};

namespace detail {

/// Finite, and the second half never exceeds twice the first half's maximum.
inline bool looks_bounded(const std::vector<double>& v) {
  if (v.empty()) return true;
  for (double x : v)
    if (!std::isfinite(x)) return false;
  const std::size_t half = v.size() / 2;
  if (half == 0) return true;
  const double first = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half));
  const double second = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(half), v.end());
  return second <= 2.0 * first + 1e-300;
}

}  // namespace detail

/// Compares the anchor orbits and conjugate slopes of two sequences whose
/// entries differ by at most C alpha^n. Both are padded with the same tail.
inline PerturbationReport perturbation_report(const MobiusSequence& a, const MobiusSequence& b, double C, double alpha,
                                              AnchorOptions opt = {}) {
  detail::require(a.size() == b.size(), "perturbation_report: sequences differ in length");
  detail::require(C >= 0.0 && alpha > 0.0 && alpha < 1.0, "perturbation_report: need C >= 0 and 0 < alpha < 1");
  for (int j = 1; j <= a.size(); ++j)
    detail::require(std::abs(a.at(j) - b.at(j)) <=
                        C * std::pow(alpha, j) * (1 + 1e-12) + 4e-16 * std::max(a.at(j), b.at(j)),
                    "perturbation_report: |lambda_n - lambda^_n| <= C alpha^n fails at n = " + std::to_string(j));
  const double cap = std::max(a.lambda_max, b.lambda_max);
  if (!opt.tail) opt.tail = cap;
  MobiusSequence aa(a.lambdas, cap), bb(b.lambdas, cap);
  const auto wa = anchor_orbit(aa, opt), wb = anchor_orbit(bb, opt);
  PerturbationReport rep;
  for (int j = 0; j <= a.size(); ++j) {
    const double gap = std::abs(wa.w[static_cast<std::size_t>(j)] - wb.w[static_cast<std::size_t>(j)]);
    rep.w_gap.push_back(gap);
    rep.scaled_gap.push_back(gap / std::pow(alpha, j));
    rep.sup_scaled_gap = std::max(rep.sup_scaled_gap, rep.scaled_gap.back());
  }
  for (int j = 1; j <= a.size(); ++j) {
    const double r = std::abs(G_derivative(wa, j) / G_derivative(wb, j));
    rep.derivative_ratio.push_back(std::max(r, 1.0 / r));
    rep.sup_derivative_ratio = std::max(rep.sup_derivative_ratio, rep.derivative_ratio.back());
  }
  rep.bounded = detail::looks_bounded(rep.scaled_gap) && detail::looks_bounded(rep.derivative_ratio);
  return rep;
}

// ---------------------------------------------------------------------------
// Autonomous dynamics of f_{d,lambda}

/// lambda_c(Delta) = (Delta - 1)^(Delta - 1) / (Delta - 2)^Delta, exact.
inline Rational lambda_c_exact(int delta) {
  detail::require(delta >= 3, "lambda_c requires Delta >= 3");
  return Rational(ipow(BigInt(delta - 1), static_cast<unsigned>(delta - 1)), ipow(BigInt(delta - 2), static_cast<unsigned>(delta)));
}

inline double lambda_c(int delta) { return lambda_c_exact(delta).convert_to<double>(); }

/// f_{d,lambda}(z) = lambda / (1 + z)^d on projective pairs.
template <class T>
ProjectiveRatio<T> family_step(int d, const T& lambda, const ProjectiveRatio<T>& z) {
  const T s = z.num() + z.den();
  ProjectiveRatio<T> out(lambda * ipow(z.den(), static_cast<unsigned>(d)), ipow(s, static_cast<unsigned>(d)));
  return out.normalize();
}

/// Root ratio of T_{d^k, 1^m}: f_{d,lambda}^k o f_{1,lambda}^m (lambda), i.e. the
/// path part starts from the single-vertex ratio lambda.
template <class T>
ProjectiveRatio<T> iterate_family_ratio(int d, int k, int m, const T& lambda) {
  detail::require(d >= 1 && k >= 0 && m >= 0, "iterate_family_ratio: need d >= 1, k, m >= 0");
  auto z = ProjectiveRatio<T>::finite(lambda);
  for (int i = 0; i < m; ++i) z = family_step(1, lambda, z);
  for (int i = 0; i < k; ++i) z = family_step(d, lambda, z);
  return z;
}

enum class FixedPointClass { Attracting, Parabolic, Repelling };

inline const char* to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::Attracting: return "attracting";
    case FixedPointClass::Parabolic: return "parabolic";
    case FixedPointClass::Repelling: return "repelling";
  }
  return "?";
}

struct TwoCycle {
  double x1 = 0.0;  // smaller point
  double x2 = 0.0;
  double multiplier = 0.0;  // (f o f)'(x1)
};

struct FixedPointReport {
  int d = 1;
  double lambda = 0.0;
  double x = 0.0;
  double multiplier = 0.0;
  FixedPointClass cls = FixedPointClass::Attracting;
  std::optional<TwoCycle> two_cycle;
};

namespace detail {

inline double family_map(int d, double lambda, double x) { return lambda / std::pow(1.0 + x, d); }
inline double family_derivative(int d, double lambda, double x) { return -d * family_map(d, lambda, x) / (1.0 + x); }

}  // namespace detail

/// Fixed point x_d(lambda) in (0, lambda) and, above lambda_c(d + 1), the
/// attracting 2-cycle reached from the seeds 0 and lambda.
inline FixedPointReport fixed_point_report(int d, double lambda, double parabolic_tol = 1e-9) {
  detail::require(d >= 1, "fixed_point_report: d must be at least 1");
  detail::require(lambda > 0.0 && std::isfinite(lambda), "fixed_point_report: lambda must be positive");
  FixedPointReport rep;
  rep.d = d;
  rep.lambda = lambda;
  // x (1 + x)^d is strictly increasing on (0, lambda)
  auto g = [&](double x) { return x * std::pow(1.0 + x, d) - lambda; };
  double lo = 0.0, hi = lambda;
  while (hi - lo > 1e-14 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double dg = std::pow(1.0 + x, d - 1) * (1.0 + (d + 1) * x);
    const double next = x - g(x) / dg;
    if (!(next > 0.0 && next < lambda)) break;
    x = next;
  }
  rep.x = x;
  rep.multiplier = -d * x / (1.0 + x);
  const double m = std::abs(rep.multiplier);
  rep.cls = std::abs(m - 1.0) < parabolic_tol ? FixedPointClass::Parabolic
            : m < 1.0                          ? FixedPointClass::Attracting
                                               : FixedPointClass::Repelling;

  if (d >= 2 && lambda > lambda_c(d + 1) && rep.cls == FixedPointClass::Repelling) {
    auto f2 = [&](double z) { return detail::family_map(d, lambda, detail::family_map(d, lambda, z)); };
    auto settle = [&](double z) {
      for (int i = 0; i < 5'000'000; ++i) {
        const double next = f2(z);
        if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z))) return next;
        z = next;
      }
      throw ConvergenceError("2-cycle iteration did not converge at lambda = " + fmt17(lambda));
    };
    double a = settle(0.0);
    double b = settle(lambda);
    // the seeds straddle x_d and land on the two cycle points
    if (a > b) std::swap(a, b);
    TwoCycle c;
    c.x1 = a;
    c.x2 = detail::family_map(d, lambda, a);
    c.multiplier = detail::family_derivative(d, lambda, c.x1) * detail::family_derivative(d, lambda, c.x2);
    if (std::abs(c.x2 - c.x1) > 1e-9) rep.two_cycle = c;
  }
  return rep;
}

/// CSV rows (lambda, x_d, multiplier, class, x1, x2, cycle_multiplier).
inline void write_fixed_point_csv(std::ostream& out, const std::vector<FixedPointReport>& rows) {
  out << "lambda,x_d,multiplier,class,x1,x2,cycle_multiplier\n";
  for (const auto& r : rows) {
    out << fmt17(r.lambda) << ',' << fmt17(r.x) << ',' << fmt17(r.multiplier) << ',' << to_string(r.cls) << ',';
    if (r.two_cycle) {
      out << fmt17(r.two_cycle->x1) << ',' << fmt17(r.two_cycle->x2) << ',' << fmt17(r.two_cycle->multiplier);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace hardcore
