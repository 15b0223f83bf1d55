#pragma once

// Spatial mixing measurements.
//
// vssm_gap compares the root ratio of SAW(G, v) under the two extremal
// boundary conditions at distance l (all OUT / all IN), which by the sandwich
// property bound every other boundary condition:
//
//   gap(l) = |F_{T,l-1}(lambda vector) - F_{T,l-1}(0 vector)|
//
// brute_force_extremes and ssm_gap enumerate boundary conditions explicitly
// and serve as oracles at small l.

#include "hardcore/errors.hpp"
#include "hardcore/format.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/partition.hpp"
#include "hardcore/saw_tree.hpp"
#include "hardcore/tree_ratio.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace hardcore {

// ---------------------------------------------------------------------------
// VSSM gaps on rooted trees and SAW trees

/// F_{T,l-1}(lambda) - F_{T,l-1}(0) at the root; sign (-1)^(l-1). Zero when no
/// non-leaf vertex sits at depth l-1.
template <class T>
T vssm_signed(const RootedTree& t, std::span<const T> fugacity, int ell) {
  detail::require(ell >= 1, "vssm: distance l must be at least 1");
  const int n = ell - 1;
  if (t.inner_shell(n).empty()) return T(0);
  const auto hi = extremal_inputs<T>(t, n, fugacity, true);
  const auto lo = extremal_inputs<T>(t, n, fugacity, false);
  const std::vector<T> fug(fugacity.begin(), fugacity.end());
  return eval_F<T>(t, n, hi, fug).value() - eval_F<T>(t, n, lo, fug).value();
}

template <class T>
double vssm_gap(const RootedTree& t, std::span<const T> fugacity, int ell) {
  return std::abs(to_double(vssm_signed<T>(t, fugacity, ell)));
}

/// gap(l) for l = 1..ell_max on one rooted tree.
inline std::vector<double> vssm_profile(const RootedTree& t, std::span<const double> fugacity, int ell_max) {
  std::vector<double> out;
  for (int ell = 1; ell <= ell_max; ++ell) out.push_back(vssm_gap<double>(t, fugacity, ell));
  return out;
}

/// gap(l) for (G, v) at uniform fugacity lambda via SAW(G, v).
inline double vssm_gap(const Graph& g, Vertex v, int ell, double lambda, std::size_t node_budget = 1'000'000) {
  detail::require(lambda > 0.0, "vssm_gap: lambda must be positive");
  const auto saw = build_saw_tree(g, v, node_budget);
  const std::vector<double> fug(static_cast<std::size_t>(saw.size()), lambda);
  return vssm_gap<double>(saw.tree, fug, ell);
}

inline std::vector<double> vssm_profile(const Graph& g, Vertex v, int ell_max, double lambda,
                                        std::size_t node_budget = 1'000'000) {
  detail::require(lambda > 0.0, "vssm_profile: lambda must be positive");
  const auto saw = build_saw_tree(g, v, node_budget);
  const std::vector<double> fug(static_cast<std::size_t>(saw.size()), lambda);
  return vssm_profile(saw.tree, fug, ell_max);
}

/// Tree rerooted at v (a tree is its own SAW tree).
inline RootedTree reroot(const RootedTree& t, Vertex v) {
  if (v == t.root()) return t;
  return RootedTree::from_graph(t.to_graph(), v);
}

/// sup over the vertices v of T of the gap profile of (T, v).
inline std::vector<double> vssm_sup_over_roots(const RootedTree& t, double lambda, int ell_max) {
  std::vector<double> best(static_cast<std::size_t>(ell_max), 0.0);
  const std::vector<double> fug(static_cast<std::size_t>(t.size()), lambda);
  for (Vertex v = 0; v < t.size(); ++v) {
    const auto prof = vssm_profile(reroot(t, v), fug, ell_max);
    for (int i = 0; i < ell_max; ++i) best[static_cast<std::size_t>(i)] = std::max(best[static_cast<std::size_t>(i)], prof[static_cast<std::size_t>(i)]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Explicit boundary enumeration

template <class T>
struct Extremes {
  T min{0};
  T max{0};
  T all_in{0};
  T all_out{0};
  std::size_t conditions = 0;
  bool extremal = false;  // {min, max} == {all_in, all_out}
};

/// Root ratio of T with the shell at depth ell pinned by `mask` (bit i = IN for
/// the i-th shell vertex in preorder).
template <class T>
ProjectiveRatio<T> pinned_root_ratio(const RootedTree& t, std::span<const T> fugacity, int ell,
                                     const std::vector<Vertex>& shell, std::uint32_t mask) {
  std::vector<ProjectiveRatio<T>> values(static_cast<std::size_t>(t.size()));
  for (std::size_t i = 0; i < shell.size(); ++i)
    values[static_cast<std::size_t>(shell[i])] = ((mask >> i) & 1U) ? ProjectiveRatio<T>::infinity()
                                                                     : ProjectiveRatio<T>::finite(T(0));
  for (Vertex u = t.size() - 1; u >= 0; --u) {
    if (t.depth(u) >= ell) continue;
    values[static_cast<std::size_t>(u)] = detail::combine_children(fugacity[static_cast<std::size_t>(u)], t, u, values);
  }
  return values[0];
}

/// Extremes of R_{(T,sigma),root} over all 2^|S| boundary conditions on
/// S_T(root, ell), compared with the all-IN / all-OUT values.
template <class T>
Extremes<T> brute_force_extremes(const RootedTree& t, std::span<const T> fugacity, int ell, std::size_t max_shell = 16) {
  static_assert(is_real_v<T>, "extremes need an ordered backend");
  detail::require(ell >= 1, "brute_force_extremes: l must be at least 1");
  const auto shell = t.shell(ell);
  if (shell.size() > max_shell)
    throw BudgetError("boundary shell has " + std::to_string(shell.size()) + " vertices, limit " + std::to_string(max_shell));
  Extremes<T> ex;
  const std::uint32_t all = shell.empty() ? 0U : ((1U << shell.size()) - 1U);
  bool first = true;
  for (std::uint64_t mask = 0; mask <= all; ++mask) {
    const T r = pinned_root_ratio<T>(t, fugacity, ell, shell, static_cast<std::uint32_t>(mask)).value();
    if (first || r < ex.min) ex.min = r;
    if (first || r > ex.max) ex.max = r;
    first = false;
    ++ex.conditions;
  }
  ex.all_out = pinned_root_ratio<T>(t, fugacity, ell, shell, 0U).value();
  ex.all_in = pinned_root_ratio<T>(t, fugacity, ell, shell, all).value();
  const T lo = std::min(ex.all_in, ex.all_out), hi = std::max(ex.all_in, ex.all_out);
  ex.extremal = ex.min == lo && ex.max == hi;
  return ex;
}

/// max over pairs of valid boundary conditions on S_G(v, ell) of
/// |R_{(G,sigma),v} - R_{(G,tau),v}|, by enumeration on G itself.
template <class T>
T ssm_gap(const Graph& g, Vertex v, int ell, std::span<const T> fugacity, std::size_t max_shell = 16) {
  static_assert(is_real_v<T>, "ssm_gap needs an ordered backend");
  detail::require(ell >= 1, "ssm_gap: l must be at least 1");
  const auto shell = sphere(g, v, ell);
  if (shell.empty()) return T(0);
  if (shell.size() > max_shell)
    throw BudgetError("boundary shell has " + std::to_string(shell.size()) + " vertices, limit " + std::to_string(max_shell));
  bool first = true;
  T lo(0), hi(0);
  for (std::uint32_t mask = 0; mask < (1U << shell.size()); ++mask) {
    BoundaryCondition sigma;
    for (std::size_t i = 0; i < shell.size(); ++i) sigma.pin(shell[i], ((mask >> i) & 1U) ? Spin::In : Spin::Out);
    if (!sigma.is_valid_on(g)) continue;
    const T r = conditional_ratio<T>(g, sigma, v, fugacity).value();
    if (first || r < lo) lo = r;
    if (first || r > hi) hi = r;
    first = false;
  }
  return hi - lo;
}

inline double ssm_gap(const Graph& g, Vertex v, int ell, double lambda) {
  const auto fug = uniform_fugacity(g, lambda);
  return ssm_gap<double>(g, v, ell, std::span<const double>(fug));
}

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
  double C = 0.0;
  double alpha = 0.0;  // exp(slope); not clamped, values above 1 mean growth
  int used = 0;
  bool truncated = false;  // some gaps fell below the floor and were dropped
};

/// Least squares of log gap(l) against l over the entries above `floor`;
/// gaps[i] belongs to l = first_ell + i.
inline DecayFit fit_decay(std::span<const double> gaps, int first_ell = 1, double floor = 1e-13) {
  std::vector<double> xs, ys;
  DecayFit fit;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    detail::require(gaps[i] >= 0.0 && !std::isnan(gaps[i]), "fit_decay: gaps must be non-negative");
    if (gaps[i] > floor) {
      xs.push_back(first_ell + static_cast<double>(i));
      ys.push_back(std::log(gaps[i]));
    } else {
      fit.truncated = true;
    }
  }
  detail::require(xs.size() >= 2, "fit_decay: fewer than 2 gaps above the floor");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  fit.alpha = std::exp(slope);
  fit.C = std::exp(my - slope * mx);
  fit.used = static_cast<int>(xs.size());
  return fit;
}

inline DecayFit fit_decay(const std::vector<double>& gaps, int first_ell = 1, double floor = 1e-13) {
  return fit_decay(std::span<const double>(gaps), first_ell, floor);
}

struct DecayReport {
  std::string graph_id;
  std::vector<double> gaps;  // gaps[i] at l = i + 1
  DecayFit fit;
  bool fitted = false;
};

inline DecayReport decay_report(std::string id, std::vector<double> gaps, int fit_from = 1, double floor = 1e-13) {
  DecayReport rep{std::move(id), std::move(gaps), {}, false};
  if (fit_from >= 1 && fit_from <= static_cast<int>(rep.gaps.size())) {
    const std::span<const double> tail(rep.gaps.data() + (fit_from - 1), rep.gaps.size() - static_cast<std::size_t>(fit_from - 1));
    std::size_t above = 0;
    for (double x : tail) above += x > floor ? 1 : 0;
    if (above >= 2) {
      rep.fit = fit_decay(tail, fit_from, floor);
      rep.fitted = true;
    } else {
      rep.fit.truncated = true;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// phi-VSSM probe over a family

struct FamilyMember {
  std::string id;
  Graph graph;
};

struct PhiVssmMember {
  std::string id;
  int n = 0;
  int phi = 0;                // first distance at which decay is required
  std::vector<double> gaps;   // sup over sampled (H, v), l = 1..ell_max
  DecayFit tail_fit;          // fit over l >= phi
  bool tail_fitted = false;
  std::size_t subgraphs = 0;  // induced subgraphs examined
};

struct PhiVssmReport {
  double lambda = 0.0;
  std::vector<PhiVssmMember> members;
  DecayFit common_fit;  // pooled fit over every member's l >= phi(n) tail
  bool common_fitted = false;
  bool tail_decays = false;  // common alpha < 1
};

struct PhiVssmOptions {
  int exhaustive_up_to = 8;  // all induced subgraphs when n <= this
  int samples = 200;         // random induced subgraphs otherwise (the full graph is always included)
  std::uint64_t seed = 0;
  std::size_t node_budget = 1'000'000;
  double floor = 1e-13;
};

/// For each member, sup over induced subgraphs H and vertices v of the VSSM
/// gap profile; rates are fitted only from l >= phi(|V|). Induced subgraphs
/// are enumerated for small members and sampled otherwise.
inline PhiVssmReport phi_vssm_probe(const std::vector<FamilyMember>& family, const std::function<int(int)>& phi_of_n,
                                    double lambda, int ell_max, const PhiVssmOptions& opt = {}) {
  detail::require(lambda > 0.0, "phi_vssm_probe: lambda must be positive");
  detail::require(ell_max >= 1, "phi_vssm_probe: ell_max must be at least 1");
  PhiVssmReport rep;
  rep.lambda = lambda;
  std::mt19937_64 rng(opt.seed);
  std::vector<double> pooled_x, pooled_y;
  for (const auto& m : family) {
    const int n = m.graph.vertex_count();
    PhiVssmMember out;
    out.id = m.id;
    out.n = n;
    out.phi = std::max(1, phi_of_n(n));
    out.gaps.assign(static_cast<std::size_t>(ell_max), 0.0);
    auto absorb = [&](const std::vector<bool>& keep) {
      const auto h = m.graph.induced_subgraph(keep);
      ++out.subgraphs;
      for (Vertex v = 0; v < h.vertex_count(); ++v) {
        const auto prof = vssm_profile(h, v, ell_max, lambda, opt.node_budget);
        for (int i = 0; i < ell_max; ++i)
          out.gaps[static_cast<std::size_t>(i)] = std::max(out.gaps[static_cast<std::size_t>(i)], prof[static_cast<std::size_t>(i)]);
      }
    };
    if (n <= opt.exhaustive_up_to) {
      for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
        std::vector<bool> keep(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) keep[static_cast<std::size_t>(i)] = ((mask >> i) & 1U) != 0;
        absorb(keep);
      }
    } else {
      absorb(std::vector<bool>(static_cast<std::size_t>(n), true));
      for (int s = 0; s < opt.samples; ++s) {
        std::vector<bool> keep(static_cast<std::size_t>(n));
        const double p = 0.5 + 0.5 * detail::unit_uniform(rng);
        for (int i = 0; i < n; ++i) keep[static_cast<std::size_t>(i)] = detail::unit_uniform(rng) < p;
        absorb(keep);
      }
    }
    const auto r = decay_report(out.id, out.gaps, out.phi, opt.floor);
    out.tail_fit = r.fit;
    out.tail_fitted = r.fitted;
    for (int ell = out.phi; ell <= ell_max; ++ell) {
      const double gap = out.gaps[static_cast<std::size_t>(ell - 1)];
      if (gap > opt.floor) {
        pooled_x.push_back(ell);
        pooled_y.push_back(gap);
      }
    }
    rep.members.push_back(std::move(out));
  }
  if (pooled_x.size() >= 2) {
    // pooled fit: regress every (l, gap) sample together
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < pooled_x.size(); ++i) {
      mx += pooled_x[i];
      my += std::log(pooled_y[i]);
    }
    mx /= static_cast<double>(pooled_x.size());
    my /= static_cast<double>(pooled_x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < pooled_x.size(); ++i) {
      sxy += (pooled_x[i] - mx) * (std::log(pooled_y[i]) - my);
      sxx += (pooled_x[i] - mx) * (pooled_x[i] - mx);
    }
    if (sxx > 0) {
      const double slope = sxy / sxx;
      rep.common_fit = {std::exp(my - slope * mx), std::exp(slope), static_cast<int>(pooled_x.size()), false};
      rep.common_fitted = true;
      rep.tail_decays = rep.common_fit.alpha < 1.0;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Output

/// CSV rows (graph_id, v, l, gap).
struct GapRow {
  std::string graph_id;
  Vertex v = 0;
  int ell = 0;
  double gap = 0.0;
};

inline void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "graph_id,v,l,gap\n";
  for (const auto& r : rows) out << r.graph_id << ',' << r.v << ',' << r.ell << ',' << fmt17(r.gap) << '\n';
}

inline nlohmann::json to_json(const DecayReport& r) {
  nlohmann::json j;
  j["graph_id"] = r.graph_id;
  j["gaps"] = nlohmann::json::array();
  for (double g : r.gaps) j["gaps"].push_back(json_number<nlohmann::json>(g));
  j["fitted"] = r.fitted;
  j["C"] = r.fitted ? json_number<nlohmann::json>(r.fit.C) : nlohmann::json(nullptr);
  j["alpha"] = r.fitted ? json_number<nlohmann::json>(r.fit.alpha) : nlohmann::json(nullptr);
  j["floor_truncated"] = r.fit.truncated;
  return j;
}

}  // namespace hardcore
