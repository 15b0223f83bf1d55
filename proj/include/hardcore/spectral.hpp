#pragma once

// Pairwise influence matrices and their spectra.
//
//   Psi(u -> v) = Pr[v in I | u in I] - Pr[v in I | u not in I]

#include "hardcore/errors.hpp"
#include "hardcore/format.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/partition.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace hardcore {

namespace detail {

// Pr[v in I] on the free set `free` (v in free).
template <class T>
T occupation_on(Eliminator<FieldAlgebra<T>>& engine, const VertexSet& free, Vertex v, const T& fug_v) {
  if (!free.test(v)) return T(0);
  auto out_set = free;
  out_set.reset(v);
  const T z_in = fug_v * engine.compute(engine.without_closed_neighborhood(free, v));
  const T z_out = engine.compute(out_set);
  return z_in / (z_in + z_out);
}

}  // namespace detail

/// Psi_{G,lambda}(u -> v) with both conditionals computed exactly from
/// conditional partition functions.
template <class T>
T influence(const Graph& g, const T& lambda, Vertex u, Vertex v, PartitionOptions options = {}) {
  detail::require(g.contains(u) && g.contains(v), "influence: vertex not in graph");
  detail::require(u != v, "influence: u and v must differ");
  detail::require(lambda > T(0), "influence: lambda must be positive");
  const auto fug = uniform_fugacity(g, lambda);
  const BoundaryCondition in{{u, Spin::In}}, out{{u, Spin::Out}};
  return conditional_occupation<T>(g, in, v, std::span<const T>(fug), options) -
         conditional_occupation<T>(g, out, v, std::span<const T>(fug), options);
}

/// Full matrix, entry (u, v) = Psi(u -> v), zero diagonal. One elimination
/// memo is shared by all n^2 conditionals.
template <class T>
std::vector<std::vector<T>> influence_entries(const Graph& g, const T& lambda, PartitionOptions options = {}) {
  detail::require(lambda > T(0), "influence_matrix: lambda must be positive");
  const int n = g.vertex_count();
  const auto fug = uniform_fugacity(g, lambda);
  detail::Eliminator<detail::FieldAlgebra<T>> engine(g, {std::span<const T>(fug)}, options);
  std::vector<std::vector<T>> m(static_cast<std::size_t>(n), std::vector<T>(static_cast<std::size_t>(n), T(0)));
  for (Vertex u = 0; u < n; ++u) {
    const auto free_in = engine.without_closed_neighborhood(engine.full(), u);
    auto free_out = engine.full();
    free_out.reset(u);
    for (Vertex v = 0; v < n; ++v) {
      if (v == u) continue;
      m[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
          detail::occupation_on<T>(engine, free_in, v, lambda) - detail::occupation_on<T>(engine, free_out, v, lambda);
    }
  }
  return m;
}

struct InfluenceMatrix {
  Eigen::MatrixXd entries;
  double lambda = 0.0;
  int size() const { return static_cast<int>(entries.rows()); }
};

inline InfluenceMatrix influence_matrix(const Graph& g, double lambda, PartitionOptions options = {}) {
  const auto e = influence_entries<double>(g, lambda, options);
  const int n = g.vertex_count();
  InfluenceMatrix m{Eigen::MatrixXd::Zero(n, n), lambda};
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) m.entries(u, v) = e[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
  return m;
}

struct SpectralReport {
  std::vector<Complex> eigenvalues;  // sorted by descending real part
  double max_real = 0.0;
  double spectral_radius = 0.0;
  double max_abs_imag = 0.0;
  bool real_spectrum = true;      // max |Im| < 1e-9 (1 + spectral radius)
  bool has_negative = false;      // some eigenvalue with real part < -1e-12
};

inline SpectralReport spectral_report(const Eigen::MatrixXd& m) {
  SpectralReport rep;
  if (m.rows() == 0) return rep;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("spectral_report: eigenvalue solver did not converge");
  const auto ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) rep.eigenvalues.push_back(ev[i]);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  rep.max_real = rep.eigenvalues.front().real();
  for (const auto& z : rep.eigenvalues) {
    rep.spectral_radius = std::max(rep.spectral_radius, std::abs(z));
    rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(z.imag()));
    rep.has_negative = rep.has_negative || z.real() < -1e-12;
  }
  rep.real_spectrum = rep.max_abs_imag < 1e-9 * (1.0 + rep.spectral_radius);
  return rep;
}

inline SpectralReport spectral_report(const Graph& g, double lambda, PartitionOptions options = {}) {
  return spectral_report(influence_matrix(g, lambda, options).entries);
}

/// Spectra of every non-empty induced subgraph (n <= 8).
struct SubgraphSweep {
  std::size_t subgraphs = 0;
  double max_eigenvalue = 0.0;       // sup over H of the largest real part
  std::uint32_t argmax_mask = 0;     // vertex mask of a maximising H
  double worst_imag_ratio = 0.0;     // max |Im| / (1 + spectral radius)
  bool all_real = true;
  std::size_t with_negative = 0;
};

inline SubgraphSweep induced_subgraph_sweep(const Graph& g, double lambda, int max_vertices = 8) {
  const int n = g.vertex_count();
  detail::require(n <= max_vertices, "induced_subgraph_sweep: graph has " + std::to_string(n) + " vertices, limit " +
                                         std::to_string(max_vertices));
  SubgraphSweep sw;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    std::vector<bool> keep(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) keep[static_cast<std::size_t>(i)] = ((mask >> i) & 1U) != 0;
    const auto rep = spectral_report(g.induced_subgraph(keep), lambda);
    ++sw.subgraphs;
    if (sw.subgraphs == 1 || rep.max_real > sw.max_eigenvalue) {
      sw.max_eigenvalue = rep.max_real;
      sw.argmax_mask = mask;
    }
    sw.worst_imag_ratio = std::max(sw.worst_imag_ratio, rep.max_abs_imag / (1.0 + rep.spectral_radius));
    sw.all_real = sw.all_real && rep.real_spectrum;
    sw.with_negative += rep.has_negative ? 1 : 0;
  }
  return sw;
}

/// Largest eigenvalue on T_{(Delta-1)^k} for each k; an empirical table.
struct FamilySpectrumRow {
  int k = 0;
  int vertices = 0;
  double max_eigenvalue = 0.0;
  bool real_spectrum = true;
};

inline std::vector<FamilySpectrumRow> spectral_family_probe(int max_degree, const std::vector<int>& ks, double lambda) {
  detail::require(max_degree >= 3, "spectral_family_probe: max degree must be at least 3");
  std::vector<FamilySpectrumRow> rows;
  for (int k : ks) {
    const auto g = build_cayley_path_tree(max_degree - 1, k, 0).to_graph();
    const auto rep = spectral_report(g, lambda);
    rows.push_back({k, g.vertex_count(), rep.max_real, rep.real_spectrum});
  }
  return rows;
}

inline nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json j;
  j["eigenvalues"] = nlohmann::json::array();
  for (const auto& z : r.eigenvalues)
    j["eigenvalues"].push_back(nlohmann::json::array({json_number<nlohmann::json>(z.real()), json_number<nlohmann::json>(z.imag())}));
  j["max_real"] = json_number<nlohmann::json>(r.max_real);
  j["spectral_radius"] = json_number<nlohmann::json>(r.spectral_radius);
  j["max_abs_imag"] = json_number<nlohmann::json>(r.max_abs_imag);
  j["real_spectrum"] = r.real_spectrum;
  j["has_negative"] = r.has_negative;
  return j;
}

}  // namespace hardcore
