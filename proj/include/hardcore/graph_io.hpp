#pragma once

// Edge-list text format and its JSON mirror.
//
//   n m
//   u v            (m lines, 0-based)
//   fug v re im    (optional, any number of lines)
//
// JSON: {"n": 3, "edges": [[0,1],[1,2]], "fugacities": [[v, re, im], ...]}

#include "hardcore/graph.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace hardcore {

inline Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  detail::require(next_line(), "edge list: missing header line");
  long long n = -1, m = -1;
  {
    std::istringstream header(line);
    detail::require(static_cast<bool>(header >> n >> m) && n >= 0 && m >= 0, "edge list: bad header '" + line + "'");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    detail::require(next_line(), "edge list: expected " + std::to_string(m) + " edges");
    std::istringstream row(line);
    long long u = -1, v = -1;
    detail::require(static_cast<bool>(row >> u >> v), "edge list: bad edge line '" + line + "'");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  Graph g(static_cast<int>(n), edges);
  std::vector<Complex> fug;
  bool any_fugacity = false;
  while (next_line()) {
    std::istringstream row(line);
    std::string tag;
    long long v = -1;
    double re = 0, im = 0;
    detail::require(static_cast<bool>(row >> tag >> v >> re >> im) && tag == "fug",
                    "edge list: bad trailing line '" + line + "'");
    detail::require(v >= 0 && v < n, "edge list: fugacity vertex out of range");
    if (!any_fugacity) fug.assign(static_cast<std::size_t>(n), Complex(1.0, 0.0));
    any_fugacity = true;
    fug[static_cast<std::size_t>(v)] = Complex(re, im);
  }
  if (any_fugacity) return g.with_fugacities(std::move(fug));
  return g;
}

inline Graph read_edge_list_string(const std::string& text) {
  std::istringstream in(text);
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  const auto edges = g.edges();
  out << g.vertex_count() << ' ' << edges.size() << '\n';
  for (const auto& [u, v] : edges) out << u << ' ' << v << '\n';
  if (g.fugacities()) {
    char buf[96];
    for (std::size_t v = 0; v < g.fugacities()->size(); ++v) {
      const Complex z = (*g.fugacities())[v];
      std::snprintf(buf, sizeof buf, "fug %zu %.17g %.17g\n", v, z.real(), z.imag());
      out << buf;
    }
  }
}

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["n"] = g.vertex_count();
  j["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
  if (g.fugacities()) {
    j["fugacities"] = nlohmann::json::array();
    for (std::size_t v = 0; v < g.fugacities()->size(); ++v) {
      const Complex z = (*g.fugacities())[v];
      j["fugacities"].push_back({v, z.real(), z.imag()});
    }
  }
  return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    Graph g(n, edges);
    if (j.contains("fugacities")) {
      std::vector<Complex> fug(static_cast<std::size_t>(n), Complex(1.0, 0.0));
      for (const auto& f : j.at("fugacities")) {
        const int v = f.at(0).get<int>();
        detail::require(v >= 0 && v < n, "json graph: fugacity vertex out of range");
        fug[static_cast<std::size_t>(v)] = Complex(f.at(1).get<double>(), f.at(2).get<double>());
      }
      return g.with_fugacities(std::move(fug));
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("json graph: ") + e.what());
  }
}

/// Loads a graph from a file; `.json` files use the JSON mirror.
inline Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot open graph file '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      return graph_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("json graph: ") + e.what());
    }
  }
  return read_edge_list(in);
}

}  // namespace hardcore
