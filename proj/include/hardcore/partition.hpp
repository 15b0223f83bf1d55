#pragma once

// Partition functions of the hard-core model.
//
// Z_G is computed by vertex elimination, Z_G = lambda_v Z_{G \ N[v]} + Z_{G - v},
// pivoting on a highest-degree vertex, factorising over connected components,
// and memoising on the vertex set of each connected sub-instance. The same
// engine yields exact integer polynomials and numeric evaluations in any
// backend. z_brute_force is an independent subset-enumeration oracle.

#include "hardcore/arith.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/projective.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hardcore {

struct PartitionOptions {
  std::size_t memo_budget = 5'000'000;  // maximum memoised sub-instances per call
};

/// Exact independence polynomial; coefficients[i] counts independent sets of size i.
struct IndependencePolynomial {
  std::vector<BigInt> coefficients{BigInt(1)};

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }

  template <class T>
  T evaluate(const T& x) const {
    T acc(0);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + from_bigint<T>(*it);
    return acc;
  }

  /// Number of independent sets, Z_G(1).
  BigInt total() const {
    BigInt sum = 0;
    for (const auto& c : coefficients) sum += c;
    return sum;
  }

  std::vector<std::string> decimal_strings() const {
    std::vector<std::string> out;
    for (const auto& c : coefficients) out.push_back(c.str());
    return out;
  }

  bool operator==(const IndependencePolynomial&) const = default;

  template <class T>
  static T from_bigint(const BigInt& c) {
    if constexpr (std::is_same_v<T, Rational>) {
      return Rational(c);
    } else {
      return T(c.convert_to<double>());
    }
  }
};

namespace detail {

/// Dense bitset over graph vertices; used as the memo key.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int n, bool full = false)
      : words_((static_cast<std::size_t>(n) + 63) / 64, full ? ~std::uint64_t{0} : 0), n_(n) {
    if (full && n % 64 != 0) words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
  }

  bool test(Vertex v) const { return (words_[static_cast<std::size_t>(v) / 64] >> (v % 64)) & 1U; }
  void set(Vertex v) { words_[static_cast<std::size_t>(v) / 64] |= std::uint64_t{1} << (v % 64); }
  void reset(Vertex v) { words_[static_cast<std::size_t>(v) / 64] &= ~(std::uint64_t{1} << (v % 64)); }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w != 0) {
        const int bit = std::countr_zero(w);
        f(static_cast<Vertex>(i * 64 + static_cast<std::size_t>(bit)));
        w &= w - 1;
      }
    }
  }

  bool operator==(const VertexSet& o) const { return words_ == o.words_; }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  int universe() const { return n_; }

 private:
  std::vector<std::uint64_t> words_;
  int n_ = 0;
};

struct VertexSetHash {
  std::size_t operator()(const VertexSet& s) const { return s.hash(); }
};

/// Numeric evaluation with per-vertex fugacities.
template <class T>
struct FieldAlgebra {
  using Value = T;
  std::span<const T> fugacity;

  Value one() const { return T(1); }
  Value add(const Value& a, const Value& b) const { return a + b; }
  Value mul(const Value& a, const Value& b) const { return a * b; }
  Value weighted(Vertex v, const Value& x) const { return fugacity[static_cast<std::size_t>(v)] * x; }
};

/// Exact integer polynomial in a single variable.
struct PolynomialAlgebra {
  using Value = std::vector<BigInt>;

  Value one() const { return {BigInt(1)}; }
  Value add(const Value& a, const Value& b) const {
    Value out(std::max(a.size(), b.size()), BigInt(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
  }
  Value mul(const Value& a, const Value& b) const {
    Value out(a.size() + b.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  Value weighted(Vertex, const Value& x) const {
    Value out(x.size() + 1, BigInt(0));
    for (std::size_t i = 0; i < x.size(); ++i) out[i + 1] = x[i];
    return out;
  }
};

/// Vertex-elimination engine over an arbitrary algebra. Memo entries are keyed
/// by the vertex set of a connected sub-instance and live for the engine's
/// lifetime only.
template <class Algebra>
class Eliminator {
 public:
  using Value = typename Algebra::Value;

  Eliminator(const Graph& g, Algebra algebra, PartitionOptions options)
      : graph_(g), algebra_(std::move(algebra)), options_(options) {}

  Value compute(const VertexSet& set) {
    Value result = algebra_.one();
    for (const auto& component : components(set)) result = algebra_.mul(result, connected(component));
    return result;
  }

  VertexSet full() const { return VertexSet(graph_.vertex_count(), true); }

  VertexSet without_closed_neighborhood(VertexSet set, Vertex v) const {
    set.reset(v);
    for (Vertex w : graph_.neighbors(v)) set.reset(w);
    return set;
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  std::vector<VertexSet> components(const VertexSet& set) const {
    std::vector<VertexSet> out;
    VertexSet seen(graph_.vertex_count());
    std::vector<Vertex> stack;
    set.for_each([&](Vertex start) {
      if (seen.test(start)) return;
      VertexSet comp(graph_.vertex_count());
      seen.set(start);
      stack.push_back(start);
      while (!stack.empty()) {
        const Vertex u = stack.back();
        stack.pop_back();
        comp.set(u);
        for (Vertex w : graph_.neighbors(u)) {
          if (!set.test(w) || seen.test(w)) continue;
          seen.set(w);
          stack.push_back(w);
        }
      }
      out.push_back(std::move(comp));
    });
    return out;
  }

  Value connected(const VertexSet& set) {
    if (auto it = memo_.find(set); it != memo_.end()) return it->second;

    // Highest degree inside the sub-instance; ties go to the smallest id.
    Vertex pivot = -1;
    int best = -1;
    set.for_each([&](Vertex v) {
      int d = 0;
      for (Vertex w : graph_.neighbors(v)) d += set.test(w) ? 1 : 0;
      if (d > best) {
        best = d;
        pivot = v;
      }
    });

    Value result;
    if (best == 0) {
      result = algebra_.add(algebra_.one(), algebra_.weighted(pivot, algebra_.one()));
    } else {
      VertexSet out_set = set;
      out_set.reset(pivot);
      const Value out_part = compute(out_set);
      const Value in_part = compute(without_closed_neighborhood(set, pivot));
      result = algebra_.add(out_part, algebra_.weighted(pivot, in_part));
    }
    if (memo_.size() >= options_.memo_budget)
      throw BudgetError("partition memo budget exceeded (" + std::to_string(options_.memo_budget) + " entries)");
    memo_.emplace(set, result);
    return result;
  }

  const Graph& graph_;
  Algebra algebra_;
  PartitionOptions options_;
  std::unordered_map<VertexSet, Value, VertexSetHash> memo_;
};

template <class T>
void require_fugacity_size(const Graph& g, std::span<const T> fugacity) {
  require(fugacity.size() == static_cast<std::size_t>(g.vertex_count()),
          "expected " + std::to_string(g.vertex_count()) + " fugacities, got " + std::to_string(fugacity.size()));
}

}  // namespace detail

/// Uniform fugacity vector for g.
template <class T>
std::vector<T> uniform_fugacity(const Graph& g, const T& lambda) {
  return std::vector<T>(static_cast<std::size_t>(g.vertex_count()), lambda);
}

/// Exact independence polynomial Z_G.
inline IndependencePolynomial z_poly(const Graph& g, PartitionOptions options = {}) {
  detail::Eliminator<detail::PolynomialAlgebra> engine(g, {}, options);
  IndependencePolynomial p;
  p.coefficients = engine.compute(engine.full());
  while (p.coefficients.size() > 1 && p.coefficients.back() == 0) p.coefficients.pop_back();
  return p;
}

/// Multivariate Z_G(lambda_v) = sum over independent I of prod_{v in I} lambda_v.
template <class T>
T z_eval(const Graph& g, std::span<const T> fugacity, PartitionOptions options = {}) {
  detail::require_fugacity_size(g, fugacity);
  detail::Eliminator<detail::FieldAlgebra<T>> engine(g, {fugacity}, options);
  return engine.compute(engine.full());
}

template <class T>
T z_eval(const Graph& g, const std::vector<T>& fugacity, PartitionOptions options = {}) {
  return z_eval<T>(g, std::span<const T>(fugacity), options);
}

/// Direct sum over all vertex subsets; the oracle for z_eval.
template <class T>
T z_brute_force(const Graph& g, std::span<const T> fugacity, int max_vertices = 25) {
  detail::require_fugacity_size(g, fugacity);
  const int n = g.vertex_count();
  if (n > max_vertices || n > 40)
    throw BudgetError("brute force limited to " + std::to_string(max_vertices) + " vertices, graph has " +
                      std::to_string(n));
  std::vector<std::uint64_t> nbr_mask(static_cast<std::size_t>(n), 0);
  for (Vertex v = 0; v < n; ++v)
    for (Vertex w : g.neighbors(v)) nbr_mask[static_cast<std::size_t>(v)] |= std::uint64_t{1} << w;
  T total(0);
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    bool independent = true;
    T weight(1);
    for (Vertex v = 0; v < n && independent; ++v) {
      if (((mask >> v) & 1U) == 0) continue;
      if ((nbr_mask[static_cast<std::size_t>(v)] & mask) != 0) independent = false;
      weight = weight * fugacity[static_cast<std::size_t>(v)];
    }
    if (independent) total = total + weight;
  }
  return total;
}

template <class T>
T z_brute_force(const Graph& g, const std::vector<T>& fugacity, int max_vertices = 25) {
  return z_brute_force<T>(g, std::span<const T>(fugacity), max_vertices);
}

/// R_{G,v} = (lambda_v Z_{G \ N[v]} : Z_{G - v}).
template <class T>
ProjectiveRatio<T> ratio(const Graph& g, Vertex v, std::span<const T> fugacity, PartitionOptions options = {}) {
  detail::require(g.contains(v), "ratio: vertex not in graph");
  detail::require_fugacity_size(g, fugacity);
  detail::Eliminator<detail::FieldAlgebra<T>> engine(g, {fugacity}, options);
  auto out_set = engine.full();
  out_set.reset(v);
  const T z_in = fugacity[static_cast<std::size_t>(v)] * engine.compute(engine.without_closed_neighborhood(engine.full(), v));
  const T z_out = engine.compute(out_set);
  return ProjectiveRatio<T>(z_in, z_out);
}

template <class T>
ProjectiveRatio<T> ratio(const Graph& g, Vertex v, const std::vector<T>& fugacity, PartitionOptions options = {}) {
  return ratio<T>(g, v, std::span<const T>(fugacity), options);
}

/// R_{(G, sigma), v} by graph surgery: OUT-pinned vertices are deleted, IN-pinned
/// vertices are deleted with their neighbourhoods (their weights cancel in the
/// ratio). If v is adjacent to an IN-pinned vertex the ratio is 0.
template <class T>
ProjectiveRatio<T> conditional_ratio(const Graph& g, const BoundaryCondition& sigma, Vertex v,
                                     std::span<const T> fugacity, PartitionOptions options = {}) {
  detail::require(g.contains(v), "conditional_ratio: vertex not in graph");
  detail::require(!sigma.is_pinned(v), "conditional_ratio: vertex " + std::to_string(v) + " is pinned");
  detail::require(sigma.is_valid_on(g), "conditional_ratio: boundary condition IN-set is not independent");
  detail::require_fugacity_size(g, fugacity);

  detail::Eliminator<detail::FieldAlgebra<T>> engine(g, {fugacity}, options);
  auto free = engine.full();
  for (const auto& [u, s] : sigma.pins()) {
    if (s == Spin::Out) {
      free.reset(u);
    } else {
      free = engine.without_closed_neighborhood(free, u);
    }
  }
  if (!free.test(v)) return ProjectiveRatio<T>(T(0), T(1));
  auto out_set = free;
  out_set.reset(v);
  const T z_in = fugacity[static_cast<std::size_t>(v)] * engine.compute(engine.without_closed_neighborhood(free, v));
  const T z_out = engine.compute(out_set);
  return ProjectiveRatio<T>(z_in, z_out);
}

template <class T>
ProjectiveRatio<T> conditional_ratio(const Graph& g, const BoundaryCondition& sigma, Vertex v,
                                     const std::vector<T>& fugacity, PartitionOptions options = {}) {
  return conditional_ratio<T>(g, sigma, v, std::span<const T>(fugacity), options);
}

/// Pr[v in I | sigma] = R / (1 + R), for positive fugacities.
template <class T>
T conditional_occupation(const Graph& g, const BoundaryCondition& sigma, Vertex v, std::span<const T> fugacity,
                         PartitionOptions options = {}) {
  const auto r = conditional_ratio<T>(g, sigma, v, fugacity, options);
  return r.num() / (r.num() + r.den());
}

/// Lower bound lambda / (lambda + (1 + lambda)^(Delta + 1)) on the occupation
/// probability of any vertex in a graph of maximum degree Delta.
inline double occupation_lower_bound(int max_degree, double lambda) {
  return lambda / (lambda + std::pow(1.0 + lambda, max_degree + 1));
}

/// Pr[v in I] at uniform positive fugacity. Throws std::logic_error if the
/// result violates occupation_lower_bound, which would indicate a bug.
inline double occupation_probability(const Graph& g, Vertex v, double lambda, PartitionOptions options = {}) {
  detail::require(lambda > 0.0, "occupation_probability: lambda must be positive");
  const auto fug = uniform_fugacity(g, lambda);
  const auto r = ratio<double>(g, v, std::span<const double>(fug), options);
  const double p = r.num() / (r.num() + r.den());
  if (p < occupation_lower_bound(g.max_degree(), lambda) * (1.0 - 1e-12))
    throw std::logic_error("occupation probability below the degree lower bound");
  return p;
}

}  // namespace hardcore
