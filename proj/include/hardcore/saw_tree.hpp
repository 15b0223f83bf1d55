#pragma once

// Tree of self-avoiding walks.
//
// For a vertex x of the current graph H with neighbours x_1 < ... < x_d, the
// children of x are SAW(H_i, x_i) where H_i = H - {x, x_1, ..., x_{i-1}}.
// Every tree vertex remembers the graph vertex it came from; its fugacity is
// the fugacity of that origin.

#include "hardcore/errors.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/partition.hpp"
#include "hardcore/tree_ratio.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace hardcore {

struct SawTree {
  RootedTree tree;
  std::vector<Vertex> origin;  // tree vertex -> graph vertex

  int size() const { return tree.size(); }
};

namespace detail {

class SawBuilder {
 public:
  SawBuilder(const Graph& g, std::size_t budget) : g_(g), budget_(budget), removed_(static_cast<std::size_t>(g.vertex_count()), false) {}

  void visit(Vertex x, Vertex tree_parent) {
    if (parent_.size() >= budget_)
      throw BudgetError("SAW tree exceeds node budget of " + std::to_string(budget_) + " vertices");
    const Vertex id = static_cast<Vertex>(parent_.size());
    parent_.push_back(tree_parent);
    origin_.push_back(x);

    std::vector<Vertex> live;
    for (Vertex w : g_.neighbors(x))
      if (!removed_[static_cast<std::size_t>(w)]) live.push_back(w);

    removed_[static_cast<std::size_t>(x)] = true;
    for (std::size_t i = 0; i < live.size(); ++i) {
      visit(live[i], id);
      removed_[static_cast<std::size_t>(live[i])] = true;
    }
    // restore the caller's graph
    removed_[static_cast<std::size_t>(x)] = false;
    for (Vertex w : live) removed_[static_cast<std::size_t>(w)] = false;
  }

  SawTree finish() {
    // ids were assigned in depth-first order with children in increasing id,
    // which is exactly RootedTree's preorder numbering
    return {RootedTree(parent_), std::move(origin_)};
  }

 private:
  const Graph& g_;
  std::size_t budget_;
  std::vector<bool> removed_;
  std::vector<Vertex> parent_;
  std::vector<Vertex> origin_;
};

}  // namespace detail

inline SawTree build_saw_tree(const Graph& g, Vertex v, std::size_t node_budget = 1'000'000) {
  detail::require(g.contains(v), "build_saw_tree: vertex " + std::to_string(v) + " not in graph");
  detail::SawBuilder builder(g, node_budget);
  builder.visit(v, -1);
  return builder.finish();
}

/// Per-tree-vertex fugacities pulled back from the graph.
template <class T>
std::vector<T> saw_fugacities(const SawTree& s, std::span<const T> graph_fugacity) {
  std::vector<T> out;
  out.reserve(s.origin.size());
  for (Vertex o : s.origin) out.push_back(graph_fugacity[static_cast<std::size_t>(o)]);
  return out;
}

/// The hanging subtree at u, origins preserved.
inline SawTree subtree_view(const SawTree& s, Vertex u) {
  detail::require(u >= 0 && u < s.size(), "subtree_view: vertex not in tree");
  std::vector<Vertex> local;
  SawTree out{s.tree.subtree(u, &local), {}};
  for (Vertex w : local) out.origin.push_back(s.origin[static_cast<std::size_t>(w)]);
  return out;
}

/// True iff every root-to-vertex path visits distinct graph vertices and
/// consecutive origins are adjacent in g.
inline bool projects_to_walks(const SawTree& s, const Graph& g) {
  for (Vertex u = 1; u < s.size(); ++u) {
    const Vertex o = s.origin[static_cast<std::size_t>(u)];
    if (!g.has_edge(o, s.origin[static_cast<std::size_t>(s.tree.parent(u))])) return false;
    for (Vertex w = s.tree.parent(u); w >= 0; w = s.tree.parent(w))
      if (s.origin[static_cast<std::size_t>(w)] == o) return false;
  }
  return true;
}

template <class T>
struct WeitzCheck {
  bool equal = false;
  ProjectiveRatio<T> graph_ratio;
  ProjectiveRatio<T> tree_ratio;
  double chordal_gap = 0.0;
};

/// Compares R_{G,v} (elimination on G) with the root ratio of SAW(G, v).
/// Exact backends compare exactly; floating ones up to `tol` in chordal metric.
template <class T>
WeitzCheck<T> verify_weitz(const Graph& g, Vertex v, std::span<const T> fugacity, double tol = 1e-12,
                           std::size_t node_budget = 1'000'000) {
  const auto saw = build_saw_tree(g, v, node_budget);
  const auto tree_fug = saw_fugacities(saw, fugacity);
  WeitzCheck<T> out;
  out.graph_ratio = ratio<T>(g, v, fugacity);
  out.tree_ratio = tree_ratio<T>(saw.tree, std::span<const T>(tree_fug));
  out.chordal_gap = out.graph_ratio.chordal_distance(out.tree_ratio);
  if constexpr (is_exact_v<T>) {
    out.equal = out.graph_ratio.equals(out.tree_ratio);
  } else {
    out.equal = out.chordal_gap <= tol;
  }
  return out;
}

template <class T>
WeitzCheck<T> verify_weitz(const Graph& g, Vertex v, const std::vector<T>& fugacity, double tol = 1e-12) {
  return verify_weitz<T>(g, v, std::span<const T>(fugacity), tol);
}

/// Graphviz dump; nodes are labelled "tree id / origin".
inline void write_dot(std::ostream& out, const SawTree& s) {
  out << "digraph saw {\n";
  for (Vertex u = 0; u < s.size(); ++u)
    out << "  n" << u << " [label=\"" << u << "/" << s.origin[static_cast<std::size_t>(u)] << "\"];\n";
  for (Vertex u = 1; u < s.size(); ++u) out << "  n" << s.tree.parent(u) << " -> n" << u << ";\n";
  out << "}\n";
}

}  // namespace hardcore
