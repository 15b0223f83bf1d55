#pragma once

// Ratio recursions on rooted trees.
//
//   R_u = lambda_u / prod_{c child of u} (1 + R_c)
//
// F_{T,n} evaluates the root ratio with the ratios of the non-leaf vertices at
// depth n supplied as inputs (leaves at depth n keep R_u = lambda_u). Inputs
// are indexed by T.inner_shell(n), i.e. in depth-first preorder.

#include "hardcore/arith.hpp"
#include "hardcore/dual.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/projective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hardcore {

namespace detail {

template <class T>
void require_tree_fugacity(const RootedTree& t, std::span<const T> fugacity) {
  require(fugacity.size() == static_cast<std::size_t>(t.size()),
          "expected " + std::to_string(t.size()) + " tree fugacities, got " + std::to_string(fugacity.size()));
}

/// R_u from the children's ratios: (lambda_u prod b_c : prod (a_c + b_c)).
template <class T>
ProjectiveRatio<T> combine_children(const T& fugacity, const RootedTree& t, Vertex u,
                                    const std::vector<ProjectiveRatio<T>>& values) {
  T num = fugacity;
  T den(1);
  for (Vertex c : t.children(u)) {
    const auto& r = values[static_cast<std::size_t>(c)];
    num = num * r.den();
    den = den * (r.num() + r.den());
    // keep floating pairs in range on wide vertices
    ProjectiveRatio<T> tmp(num, den);
    tmp.normalize();
    num = tmp.num();
    den = tmp.den();
  }
  return ProjectiveRatio<T>(num, den).normalize();
}

}  // namespace detail

/// Ratios R_u of every hanging subtree, computed bottom-up.
template <class T>
std::vector<ProjectiveRatio<T>> subtree_ratios(const RootedTree& t, std::span<const T> fugacity) {
  detail::require_tree_fugacity(t, fugacity);
  std::vector<ProjectiveRatio<T>> values(static_cast<std::size_t>(t.size()));
  for (Vertex u = t.size() - 1; u >= 0; --u)
    values[static_cast<std::size_t>(u)] = detail::combine_children(fugacity[static_cast<std::size_t>(u)], t, u, values);
  return values;
}

/// R_{T,root} with per-vertex fugacities.
template <class T>
ProjectiveRatio<T> tree_ratio(const RootedTree& t, std::span<const T> fugacity) {
  return subtree_ratios(t, fugacity)[0];
}

template <class T>
ProjectiveRatio<T> tree_ratio(const RootedTree& t, const std::vector<T>& fugacity) {
  return tree_ratio<T>(t, std::span<const T>(fugacity));
}

/// Ratios of all vertices at depth <= n under F_{T,n} with the given inputs;
/// entries for deeper vertices are left at their default.
template <class T>
std::vector<ProjectiveRatio<T>> depth_map_values(const RootedTree& t, int n, std::span<const ProjectiveRatio<T>> inputs,
                                                 std::span<const T> fugacity) {
  detail::require_tree_fugacity(t, fugacity);
  detail::require(n >= 0, "depth n must be non-negative");
  const auto free_vertices = t.inner_shell(n);
  detail::require(inputs.size() == free_vertices.size(),
                  "F_{T," + std::to_string(n) + "} takes " + std::to_string(free_vertices.size()) + " inputs, got " +
                      std::to_string(inputs.size()));
  std::vector<ProjectiveRatio<T>> values(static_cast<std::size_t>(t.size()));
  for (std::size_t i = 0; i < free_vertices.size(); ++i) values[static_cast<std::size_t>(free_vertices[i])] = inputs[i];
  for (Vertex u = t.size() - 1; u >= 0; --u) {
    const int d = t.depth(u);
    if (d > n || (d == n && !t.is_leaf(u))) continue;
    values[static_cast<std::size_t>(u)] = d == n ? ProjectiveRatio<T>::finite(fugacity[static_cast<std::size_t>(u)])
                                                 : detail::combine_children(fugacity[static_cast<std::size_t>(u)], t, u, values);
  }
  return values;
}

/// F_{T,n}(inputs).
template <class T>
ProjectiveRatio<T> eval_F(const RootedTree& t, int n, std::span<const ProjectiveRatio<T>> inputs,
                          std::span<const T> fugacity) {
  return depth_map_values(t, n, inputs, fugacity)[0];
}

template <class T>
ProjectiveRatio<T> eval_F(const RootedTree& t, int n, const std::vector<T>& inputs, const std::vector<T>& fugacity) {
  std::vector<ProjectiveRatio<T>> proj;
  proj.reserve(inputs.size());
  for (const auto& x : inputs) proj.push_back(ProjectiveRatio<T>::finite(x));
  return eval_F<T>(t, n, std::span<const ProjectiveRatio<T>>(proj), std::span<const T>(fugacity));
}

/// Inputs with every free vertex set to its own fugacity (all-OUT boundary
/// one level further down) or to 0 (all-IN).
template <class T>
std::vector<T> extremal_inputs(const RootedTree& t, int n, std::span<const T> fugacity, bool upper) {
  std::vector<T> out;
  for (Vertex u : t.inner_shell(n)) out.push_back(upper ? fugacity[static_cast<std::size_t>(u)] : T(0));
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

template <class T>
struct RatioBounds {
  T ell;  // lambda / (1 + lambda)^(Delta - 1)
  T r;    // lambda / (1 + ell)
};

template <class T>
RatioBounds<T> ratio_bounds(int max_degree, const T& lambda) {
  detail::require(max_degree >= 1, "ratio_bounds: Delta must be at least 1");
  const T ell = lambda / ipow(T(1) + lambda, static_cast<unsigned>(max_degree - 1));
  return {ell, lambda / (T(1) + ell)};
}

struct UpperBoundReport {
  double root_ratio = 0;
  double ell = 0;
  double r = 0;
  bool upper_ok = true;  // every non-leaf subtree ratio <= r
  bool lower_ok = true;  // every non-root subtree ratio >= ell
};

/// Checks R_{T,v} <= r_Delta(lambda) and the containment of the hanging
/// subtree ratios in [ell_Delta, r_Delta] at uniform fugacity lambda. The lower
/// bound is only asserted below the root, whose own degree may reach Delta.
inline UpperBoundReport assert_upper_bound(const RootedTree& t, double lambda, int max_degree = -1,
                                           double slack = 1e-12) {
  detail::require(t.size() >= 2, "assert_upper_bound: tree needs at least 2 vertices");
  detail::require(lambda > 0.0, "assert_upper_bound: lambda must be positive");
  const int delta = max_degree < 0 ? t.max_degree() : max_degree;
  detail::require(t.max_degree() <= delta, "assert_upper_bound: tree exceeds the given Delta");
  const auto bounds = ratio_bounds(std::max(delta, 2), lambda);
  const std::vector<double> fug(static_cast<std::size_t>(t.size()), lambda);
  const auto values = subtree_ratios<double>(t, fug);
  UpperBoundReport rep;
  rep.root_ratio = values[0].value();
  rep.ell = bounds.ell;
  rep.r = bounds.r;
  for (Vertex u = 0; u < t.size(); ++u) {
    const double x = values[static_cast<std::size_t>(u)].value();
    if (!t.is_leaf(u) && x > bounds.r * (1 + slack)) rep.upper_ok = false;
    if (u != t.root() && x < bounds.ell * (1 - slack)) rep.lower_ok = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Mobius decomposition of a single-coordinate restriction

/// lambda_1..lambda_n such that F_{T,n;u}(z) = f_{lambda_n} o ... o f_{lambda_1}(z),
/// where F_{T,n;u} varies the input at u in S*_T(root, n) and keeps the others
/// fixed. lambda_i belongs to the i-th vertex above u on the path to the root.
template <class T>
std::vector<T> mobius_decompose(const RootedTree& t, int n, Vertex u, std::span<const T> inputs,
                                std::span<const T> fugacity) {
  const auto free_vertices = t.inner_shell(n);
  const auto pos = std::find(free_vertices.begin(), free_vertices.end(), u);
  detail::require(pos != free_vertices.end(), "mobius_decompose: u is not a non-leaf vertex at depth n");
  std::vector<ProjectiveRatio<T>> proj;
  for (const auto& x : inputs) proj.push_back(ProjectiveRatio<T>::finite(x));
  const auto values = depth_map_values<T>(t, n, proj, fugacity);
  std::vector<T> lambdas;
  Vertex below = u;
  for (Vertex w = t.parent(u); w >= 0; below = w, w = t.parent(w)) {
    T factor(1);
    for (Vertex c : t.children(w)) {
      if (c == below) continue;
      const auto& r = values[static_cast<std::size_t>(c)];
      factor = factor * (r.num() + r.den()) / r.den();
    }
    lambdas.push_back(fugacity[static_cast<std::size_t>(w)] / factor);
  }
  return lambdas;
}

/// f_{lambda_n} o ... o f_{lambda_1}(z).
template <class T>
ProjectiveRatio<T> compose_mobius(std::span<const T> lambdas, ProjectiveRatio<T> z) {
  for (const auto& l : lambdas) z = mobius_step(l, z);
  return z;
}

// ---------------------------------------------------------------------------
// Epsilon increments

template <class T>
struct EpsilonReport {
  std::vector<T> epsilon;  // epsilon_i = F(delta^i) - F(delta^{i-1})
  T sum{0};
  T total{0};  // F(lambda vector) - F(0 vector)
  bool telescopes = true;
  bool same_sign = true;  // every epsilon_i has sign (-1)^n (or vanishes)
};

/// Staircase inputs delta^i: the first i free vertices (preorder) at their
/// fugacity, the rest at 0, so that F(delta^0) = F(0) and F(delta^|S*|) = F(lambda).
template <class T>
EpsilonReport<T> epsilon_increments(const RootedTree& t, int n, std::span<const T> fugacity) {
  static_assert(is_real_v<T>, "epsilon increments are defined for real fugacities");
  const auto free_vertices = t.inner_shell(n);
  const std::size_t k = free_vertices.size();
  EpsilonReport<T> rep;
  std::vector<ProjectiveRatio<T>> delta(k, ProjectiveRatio<T>::finite(T(0)));
  auto value = [&]() { return eval_F<T>(t, n, std::span<const ProjectiveRatio<T>>(delta), fugacity).value(); };
  T previous = value();
  const T at_zero = previous;
  const T sign = (n % 2 == 0) ? T(1) : T(-1);
  for (std::size_t i = 0; i < k; ++i) {
    delta[i] = ProjectiveRatio<T>::finite(fugacity[static_cast<std::size_t>(free_vertices[i])]);
    const T current = value();
    rep.epsilon.push_back(current - previous);
    rep.sum = rep.sum + rep.epsilon.back();
    if (sign * rep.epsilon.back() < T(0)) rep.same_sign = false;
    previous = current;
  }
  rep.total = previous - at_zero;
  if constexpr (is_exact_v<T>) {
    rep.telescopes = rep.sum == rep.total;
  } else {
    rep.telescopes = std::abs(to_double(rep.sum - rep.total)) <= 1e-12 * (1.0 + std::abs(to_double(rep.total)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gradient by forward-mode duals

template <class T>
struct Gradient {
  std::vector<T> partials;  // dF/d(input_i), preorder over S*
  double l1 = 0.0;
};

template <class T>
Gradient<T> gradient_F(const RootedTree& t, int n, std::span<const T> inputs, std::span<const T> fugacity) {
  using D = Dual<T>;
  std::vector<D> fug_d(fugacity.begin(), fugacity.end());
  Gradient<T> g;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<ProjectiveRatio<D>> x;
    x.reserve(inputs.size());
    for (std::size_t j = 0; j < inputs.size(); ++j)
      x.push_back(ProjectiveRatio<D>::finite(j == i ? D::variable(inputs[j]) : D(inputs[j])));
    const auto f = eval_F<D>(t, n, std::span<const ProjectiveRatio<D>>(x), std::span<const D>(fug_d));
    detail::require(!is_zero(f.den()), "gradient_F: F is infinite at the given inputs");
    const D value = f.num() / f.den();
    g.partials.push_back(value.deriv);
    g.l1 += magnitude(value.deriv);
  }
  return g;
}

/// Central finite differences of F with step h; the reference for gradient_F.
inline std::vector<double> finite_difference_F(const RootedTree& t, int n, std::span<const double> inputs,
                                               std::span<const double> fugacity, double h = 1e-6) {
  std::vector<double> out;
  std::vector<double> x(inputs.begin(), inputs.end());
  const std::vector<double> fug(fugacity.begin(), fugacity.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = eval_F<double>(t, n, x, fug).value();
    x[i] = keep - h;
    const double down = eval_F<double>(t, n, x, fug).value();
    x[i] = keep;
    out.push_back((up - down) / (2 * h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complex neighbourhood K of [ell_Delta, r_Delta]

/// Closed neighbourhood of the segment [ell, r] of the given radius. The
/// default radius is 10% of the segment length.
struct KNeighbourhood {
  double ell = 0;
  double r = 0;
  double radius = 0;

  static KNeighbourhood around(int max_degree, double lambda, double fraction = 0.1) {
    const auto b = ratio_bounds(max_degree, lambda);
    return {b.ell, b.r, fraction * (b.r - b.ell)};
  }

  double distance(Complex z) const {
    const double x = std::clamp(z.real(), ell, r);
    return std::abs(z - Complex(x, 0.0));
  }
  bool contains(Complex z) const { return distance(z) <= radius; }

  /// Points on the boundary of K (two half circles and two segments).
  std::vector<Complex> boundary(int samples) const {
    std::vector<Complex> pts;
    const double pi = std::acos(-1.0);
    for (int i = 0; i < samples; ++i) {
      const double s = static_cast<double>(i) / samples;
      pts.emplace_back(ell + s * (r - ell), radius);
      pts.emplace_back(ell + s * (r - ell), -radius);
      const double a = pi / 2 + pi * s;
      pts.push_back(Complex(ell, 0) + radius * Complex(std::cos(a), std::sin(a)));
      pts.push_back(Complex(r, 0) - radius * Complex(std::cos(a), std::sin(a)));
    }
    return pts;
  }
};

/// sup over the boundary of K of |F'_{T,n;u}(z)|; by the maximum principle this
/// is the sup over K when F_{T,n;u} is holomorphic there.
inline double derivative_sup_on_K(const RootedTree& t, int n, Vertex u, std::span<const double> inputs,
                                  std::span<const double> fugacity, const KNeighbourhood& k, int samples = 64) {
  const auto lambdas = mobius_decompose<double>(t, n, u, inputs, fugacity);
  double best = 0.0;
  for (Complex z : k.boundary(samples)) {
    using D = Dual<Complex>;
    ProjectiveRatio<D> w = ProjectiveRatio<D>::finite(D::variable(z));
    for (double l : lambdas) w = mobius_step(D(Complex(l, 0.0)), w);
    const D value = w.num() / w.den();
    best = std::max(best, std::abs(value.deriv));
  }
  return best;
}

}  // namespace hardcore
