#pragma once

// Graph and rooted-tree value types, boundary conditions, and the builders for
// the graph corpora used throughout (named graphs, seeded Erdos-Renyi graphs,
// and the Cayley-tree-with-paths family).

#include "hardcore/arith.hpp"
#include "hardcore/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hardcore {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph on vertices 0..n-1 with sorted neighbour lists and
/// optional per-vertex complex fugacities. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Rejects self-loops, parallel edges and
  /// out-of-range endpoints.
  Graph(int vertex_count, std::span<const Edge> edges) : adjacency_(static_cast<std::size_t>(vertex_count)) {
    detail::require(vertex_count >= 0, "vertex count must be non-negative");
    for (const auto& [u, v] : edges) {
      detail::require(u >= 0 && u < vertex_count && v >= 0 && v < vertex_count,
                      "edge endpoint out of range: " + std::to_string(u) + " " + std::to_string(v));
      detail::require(u != v, "self-loop at vertex " + std::to_string(u));
      adjacency_[static_cast<std::size_t>(u)].push_back(v);
      adjacency_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nbrs : adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      detail::require(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end(), "parallel edge");
    }
  }

  Graph(int vertex_count, std::initializer_list<Edge> edges)
      : Graph(vertex_count, std::span<const Edge>(edges.begin(), edges.size())) {}

  int vertex_count() const { return static_cast<int>(adjacency_.size()); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nbrs : adjacency_) twice += nbrs.size();
    return twice / 2;
  }

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[static_cast<std::size_t>(v)]; }

  int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

  int max_degree() const {
    int best = 0;
    for (Vertex v = 0; v < vertex_count(); ++v) best = std::max(best, degree(v));
    return best;
  }

  bool has_edge(Vertex u, Vertex v) const {
    const auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
  }

  bool contains(Vertex v) const { return v >= 0 && v < vertex_count(); }

  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < vertex_count(); ++u)
      for (Vertex v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  const std::optional<std::vector<Complex>>& fugacities() const { return fugacities_; }

  /// Copy of this graph carrying explicit per-vertex fugacities.
  Graph with_fugacities(std::vector<Complex> fugacities) const {
    detail::require(static_cast<int>(fugacities.size()) == vertex_count(), "fugacity vector size mismatch");
    Graph copy = *this;
    copy.fugacities_ = std::move(fugacities);
    return copy;
  }

  /// Per-vertex fugacities: the stored vector if any, else `scalar` everywhere.
  std::vector<Complex> fugacities_or(Complex scalar) const {
    if (fugacities_) return *fugacities_;
    return std::vector<Complex>(static_cast<std::size_t>(vertex_count()), scalar);
  }

  /// Induced subgraph on the vertices with keep[v] set. Vertices keep their
  /// relative order; `old_to_new` (if given) receives the relabelling, -1 for
  /// removed vertices.
  Graph induced_subgraph(const std::vector<bool>& keep, std::vector<Vertex>* old_to_new = nullptr) const {
    std::vector<Vertex> relabel(static_cast<std::size_t>(vertex_count()), -1);
    int count = 0;
    for (Vertex v = 0; v < vertex_count(); ++v)
      if (keep[static_cast<std::size_t>(v)]) relabel[static_cast<std::size_t>(v)] = count++;
    std::vector<Edge> kept;
    for (const auto& [u, v] : edges()) {
      const Vertex a = relabel[static_cast<std::size_t>(u)], b = relabel[static_cast<std::size_t>(v)];
      if (a >= 0 && b >= 0) kept.emplace_back(a, b);
    }
    Graph sub(count, kept);
    if (fugacities_) {
      std::vector<Complex> fug;
      for (Vertex v = 0; v < vertex_count(); ++v)
        if (keep[static_cast<std::size_t>(v)]) fug.push_back((*fugacities_)[static_cast<std::size_t>(v)]);
      sub.fugacities_ = std::move(fug);
    }
    if (old_to_new != nullptr) *old_to_new = std::move(relabel);
    return sub;
  }

  /// Same graph with vertex v renamed to order[v]; `order` must be a permutation.
  Graph relabeled(const std::vector<Vertex>& order) const {
    std::vector<Edge> mapped;
    for (const auto& [u, v] : edges())
      mapped.emplace_back(order[static_cast<std::size_t>(u)], order[static_cast<std::size_t>(v)]);
    Graph out(vertex_count(), mapped);
    if (fugacities_) {
      std::vector<Complex> fug(fugacities_->size());
      for (std::size_t v = 0; v < fug.size(); ++v) fug[static_cast<std::size_t>(order[v])] = (*fugacities_)[v];
      out.fugacities_ = std::move(fug);
    }
    return out;
  }

  bool operator==(const Graph& o) const { return adjacency_ == o.adjacency_ && fugacities_ == o.fugacities_; }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::optional<std::vector<Complex>> fugacities_;
};

enum class Spin : std::uint8_t { Out = 0, In = 1 };

/// Partial pinning of vertices to IN/OUT. Valid on a graph when the IN-set is
/// independent there.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  BoundaryCondition(std::initializer_list<std::pair<const Vertex, Spin>> init) : pins_(init) {}

  void pin(Vertex v, Spin s) { pins_[v] = s; }
  bool is_pinned(Vertex v) const { return pins_.count(v) != 0; }
  std::optional<Spin> spin(Vertex v) const {
    const auto it = pins_.find(v);
    if (it == pins_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<Vertex, Spin>& pins() const { return pins_; }
  std::size_t size() const { return pins_.size(); }

  std::vector<Vertex> in_set() const {
    std::vector<Vertex> out;
    for (const auto& [v, s] : pins_)
      if (s == Spin::In) out.push_back(v);
    return out;
  }

  bool is_valid_on(const Graph& g) const {
    for (const auto& [v, s] : pins_) {
      if (!g.contains(v)) return false;
      if (s != Spin::In) continue;
      for (Vertex w : g.neighbors(v))
        if (spin(w) == Spin::In) return false;
    }
    return true;
  }

 private:
  std::map<Vertex, Spin> pins_;
};

/// Rooted tree with vertices numbered in depth-first preorder (root = 0,
/// children in their given order). Preorder numbering makes "sorted by id"
/// coincide with depth-first discovery order.
class RootedTree {
 public:
  RootedTree() : RootedTree(std::vector<Vertex>{-1}) {}

  /// From a parent array (parent[root] == -1, exactly one root). Children keep
  /// the order of their ids; vertices are renumbered to preorder.
  explicit RootedTree(const std::vector<Vertex>& parent) {
    const auto n = parent.size();
    detail::require(n > 0, "a rooted tree needs at least one vertex");
    std::vector<std::vector<Vertex>> kids(n);
    Vertex root = -1;
    for (std::size_t v = 0; v < n; ++v) {
      const Vertex p = parent[v];
      if (p < 0) {
        detail::require(root < 0, "rooted tree has more than one root");
        root = static_cast<Vertex>(v);
      } else {
        detail::require(static_cast<std::size_t>(p) < n, "parent out of range");
        kids[static_cast<std::size_t>(p)].push_back(static_cast<Vertex>(v));
      }
    }
    detail::require(root >= 0, "rooted tree has no root");
    build_preorder(root, kids);
    detail::require(parent_.size() == n, "parent array is not a connected acyclic tree");
  }

  /// From adjacency lists of an arbitrary tree and a chosen root.
  static RootedTree from_graph(const Graph& g, Vertex root, std::vector<Vertex>* preorder_origin = nullptr) {
    detail::require(g.contains(root), "root not in graph");
    detail::require(g.edge_count() + 1 == static_cast<std::size_t>(g.vertex_count()), "graph is not a tree");
    std::vector<Vertex> parent(static_cast<std::size_t>(g.vertex_count()), -2);
    parent[static_cast<std::size_t>(root)] = -1;
    std::vector<Vertex> stack{root};
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(u)) {
        if (parent[static_cast<std::size_t>(w)] != -2) continue;
        parent[static_cast<std::size_t>(w)] = u;
        stack.push_back(w);
      }
    }
    for (Vertex p : parent) detail::require(p != -2, "graph is not connected");
    RootedTree t(parent);
    if (preorder_origin != nullptr) *preorder_origin = t.origin_;
    return t;
  }

  int size() const { return static_cast<int>(parent_.size()); }
  Vertex root() const { return 0; }
  Vertex parent(Vertex v) const { return parent_[static_cast<std::size_t>(v)]; }
  std::span<const Vertex> children(Vertex v) const { return children_[static_cast<std::size_t>(v)]; }
  int depth(Vertex v) const { return depth_[static_cast<std::size_t>(v)]; }
  bool is_leaf(Vertex v) const { return children(v).empty(); }

  /// Graph degree of v inside the tree.
  int degree(Vertex v) const { return static_cast<int>(children(v).size()) + (v == root() ? 0 : 1); }

  int max_degree() const {
    int best = 0;
    for (Vertex v = 0; v < size(); ++v) best = std::max(best, degree(v));
    return best;
  }

  int height() const { return *std::max_element(depth_.begin(), depth_.end()); }

  /// S_T(root, l): vertices at depth l, in preorder.
  std::vector<Vertex> shell(int depth) const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < size(); ++v)
      if (depth_[static_cast<std::size_t>(v)] == depth) out.push_back(v);
    return out;
  }

  /// S*_T(root, l): the non-leaf members of shell(l), in preorder.
  std::vector<Vertex> inner_shell(int depth) const {
    std::vector<Vertex> out;
    for (Vertex v : shell(depth))
      if (!is_leaf(v)) out.push_back(v);
    return out;
  }

  /// Subtree hanging at u (u and all its descendants), re-rooted at u.
  /// `origin` (if given) maps the new ids to ids in this tree.
  RootedTree subtree(Vertex u, std::vector<Vertex>* origin = nullptr) const {
    // In preorder the subtree of u is the contiguous id range [u, u + size).
    Vertex end = u + 1;
    while (end < size() && depth(end) > depth(u)) ++end;
    std::vector<Vertex> parent;
    parent.reserve(static_cast<std::size_t>(end - u));
    for (Vertex w = u; w < end; ++w) parent.push_back(w == u ? -1 : this->parent(w) - u);
    if (origin != nullptr) {
      origin->clear();
      for (Vertex w = u; w < end; ++w) origin->push_back(w);
    }
    return RootedTree(parent);
  }

  /// The underlying undirected graph (vertex ids unchanged).
  Graph to_graph() const {
    std::vector<Edge> edges;
    for (Vertex v = 1; v < size(); ++v) edges.emplace_back(parent(v), v);
    return Graph(size(), edges);
  }

  const std::vector<Vertex>& parents() const { return parent_; }

  bool operator==(const RootedTree& o) const { return parent_ == o.parent_; }

 private:
  void build_preorder(Vertex root, const std::vector<std::vector<Vertex>>& kids) {
    const auto n = kids.size();
    std::vector<Vertex> new_id(n, -1);
    origin_.clear();
    parent_.clear();
    depth_.clear();
    // Explicit stack; children pushed in reverse so they pop in order.
    std::vector<std::pair<Vertex, Vertex>> stack{{root, -1}};
    while (!stack.empty()) {
      const auto [old, new_parent] = stack.back();
      stack.pop_back();
      detail::require(new_id[static_cast<std::size_t>(old)] < 0, "parent array contains a cycle");
      const Vertex id = static_cast<Vertex>(origin_.size());
      new_id[static_cast<std::size_t>(old)] = id;
      origin_.push_back(old);
      parent_.push_back(new_parent);
      depth_.push_back(new_parent < 0 ? 0 : depth_[static_cast<std::size_t>(new_parent)] + 1);
      const auto& ch = kids[static_cast<std::size_t>(old)];
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, id);
    }
    children_.assign(parent_.size(), {});
    for (Vertex v = 1; v < static_cast<Vertex>(parent_.size()); ++v)
      children_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])].push_back(v);
  }

  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<int> depth_;
  std::vector<Vertex> origin_;  // preorder id -> id in the constructor's input
};

// ---------------------------------------------------------------------------
// Builders

enum class NamedKind { Path, Cycle, Complete, Star, Random };

struct NamedGraph {
  NamedKind kind = NamedKind::Path;
  int n = 0;
  double p = 0.0;          // Random only
  std::uint64_t seed = 0;  // Random only
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

}  // namespace detail

/// path(n), cycle(n), complete(n), star(n) on n vertices; random(n, p, seed)
/// is Erdos-Renyi with pairs decided in lexicographic order. cycle(n) for
/// n < 3 degenerates to path(n); star(n) has centre 0 and n-1 leaves.
inline Graph build_named(const NamedGraph& spec) {
  const int n = spec.n;
  detail::require(n >= 0, "graph size must be non-negative");
  std::vector<Edge> edges;
  switch (spec.kind) {
    case NamedKind::Path:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case NamedKind::Cycle:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n >= 3) edges.emplace_back(0, n - 1);
      break;
    case NamedKind::Complete:
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
      break;
    case NamedKind::Star:
      for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case NamedKind::Random: {
      detail::require(spec.p >= 0.0 && spec.p <= 1.0, "edge probability must lie in [0, 1]");
      std::mt19937_64 rng(spec.seed);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (detail::unit_uniform(rng) < spec.p) edges.emplace_back(u, v);
      break;
    }
  }
  return Graph(n, edges);
}

inline Graph path_graph(int n) { return build_named({NamedKind::Path, n}); }
inline Graph cycle_graph(int n) { return build_named({NamedKind::Cycle, n}); }
inline Graph complete_graph(int n) { return build_named({NamedKind::Complete, n}); }
inline Graph star_graph(int n) { return build_named({NamedKind::Star, n}); }
inline Graph random_graph(int n, double p, std::uint64_t seed) {
  return build_named({NamedKind::Random, n, p, seed});
}

/// T_{d^k, 1^m}: a root whose descendants branch d-fold for k levels, with a
/// path of m further vertices hanging below each depth-k vertex.
inline RootedTree build_cayley_path_tree(int d, int k, int m) {
  detail::require(d >= 1, "branching d must be at least 1");
  detail::require(k >= 0 && m >= 0, "k and m must be non-negative");
  std::vector<Vertex> parent{-1};
  std::vector<Vertex> frontier{0};
  for (int level = 0; level < k; ++level) {
    std::vector<Vertex> next;
    for (Vertex p : frontier)
      for (int c = 0; c < d; ++c) {
        parent.push_back(p);
        next.push_back(static_cast<Vertex>(parent.size()) - 1);
      }
    frontier = std::move(next);
  }
  for (Vertex leaf : frontier) {
    Vertex tail = leaf;
    for (int i = 0; i < m; ++i) {
      parent.push_back(tail);
      tail = static_cast<Vertex>(parent.size()) - 1;
    }
  }
  return RootedTree(parent);
}

/// Uniformly grown random tree: vertex i attaches to a random earlier vertex
/// whose degree is still below max_degree.
inline RootedTree random_tree(int n, int max_degree, std::uint64_t seed) {
  detail::require(n >= 1, "random tree needs at least one vertex");
  detail::require(max_degree >= 2 || n <= 2, "max degree too small");
  std::mt19937_64 rng(seed);
  std::vector<Vertex> parent{-1};
  std::vector<int> degree{0};
  for (int i = 1; i < n; ++i) {
    std::vector<Vertex> open;
    for (Vertex v = 0; v < i; ++v)
      if (degree[static_cast<std::size_t>(v)] < max_degree) open.push_back(v);
    const auto pick = open[static_cast<std::size_t>(rng() % open.size())];
    parent.push_back(pick);
    degree.push_back(1);
    ++degree[static_cast<std::size_t>(pick)];
  }
  return RootedTree(parent);
}

// ---------------------------------------------------------------------------
// Spheres

/// BFS distances from v; unreachable vertices get -1.
inline std::vector<int> bfs_distances(const Graph& g, Vertex v) {
  detail::require(g.contains(v), "vertex not in graph");
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
  std::queue<Vertex> queue;
  dist[static_cast<std::size_t>(v)] = 0;
  queue.push(v);
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop();
    for (Vertex w : g.neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] >= 0) continue;
      dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
      queue.push(w);
    }
  }
  return dist;
}

/// S_G(v, l): vertices at graph distance exactly l from v, sorted.
inline std::vector<Vertex> sphere(const Graph& g, Vertex v, int distance) {
  detail::require(distance >= 0, "sphere radius must be non-negative");
  const auto dist = bfs_distances(g, v);
  std::vector<Vertex> out;
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (dist[static_cast<std::size_t>(u)] == distance) out.push_back(u);
  return out;
}

/// Sphere around an arbitrary vertex of a rooted tree (tree distance).
inline std::vector<Vertex> sphere(const RootedTree& t, Vertex v, int distance) {
  if (v == t.root()) return t.shell(distance);
  return sphere(t.to_graph(), v, distance);
}

}  // namespace hardcore
