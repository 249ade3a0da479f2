#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lognull/errors.hpp"

namespace lognull {

using Vertex = std::size_t;
using Community = std::size_t;

struct Edge {
  Vertex u;
  Vertex v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Vertex vertex;
  double weight;
};

/// x * log(x) with the 0 * log 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Weighted undirected multigraph with loops.
///
/// A loop of weight w adds 2w to the degree of its endpoint and w to the total
/// weight, so the degrees always sum to twice the total weight. Vertices of a
/// contracted graph carry the number of original vertices they stand for.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from weighted edges. Parallel edges are merged by summing
  /// weights; loops are kept. `sizes` defaults to 1 per vertex.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::vector<std::size_t> sizes = {}) {
    Graph g;
    g.sizes_ = sizes.empty() ? std::vector<std::size_t>(n, 1) : std::move(sizes);
    if (g.sizes_.size() != n) throw ValidationError("size vector does not match vertex count");
    for (auto& e : edges) {
      if (e.u >= n || e.v >= n) throw ValidationError("edge endpoint out of range");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ValidationError("edge weight must be positive and finite");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (const auto& e : edges) {
      if (!g.edges_.empty() && g.edges_.back().u == e.u && g.edges_.back().v == e.v)
        g.edges_.back().weight += e.weight;
      else
        g.edges_.push_back(e);
    }
    g.build_index(n);
    g.degree_log_sum_ = 0.0;
    for (double d : g.degree_) g.degree_log_sum_ += xlogx(d);
    return g;
  }

  std::size_t vertex_count() const noexcept { return degree_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double total_weight() const noexcept { return total_weight_; }

  double degree(Vertex i) const { return degree_[i]; }
  double loop_weight(Vertex i) const { return loop_[i]; }
  std::size_t size(Vertex i) const { return sizes_[i]; }
  std::size_t total_size() const noexcept { return total_size_; }

  std::span<const double> degrees() const noexcept { return degree_; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Neighbors of `i` other than `i` itself.
  std::span<const Neighbor> neighbors(Vertex i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  /// Weight of the edge {u, v} (0 if absent).
  double weight(Vertex u, Vertex v) const {
    if (u == v) return loop_[u];
    for (const auto& nb : neighbors(u))
      if (nb.vertex == v) return nb.weight;
    return 0.0;
  }

  /// Sum over the original vertices of d log d. Contraction carries the value
  /// of the base graph forward so that likelihood constants survive levels.
  double degree_log_sum() const noexcept { return degree_log_sum_; }

  /// Original labels of a graph read from text; empty for synthetic graphs.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<std::string> labels) {
    if (!labels.empty() && labels.size() != vertex_count())
      throw ValidationError("label count does not match vertex count");
    labels_ = std::move(labels);
  }
  std::string label(Vertex i) const { return labels_.empty() ? std::to_string(i) : labels_[i]; }

 private:
  friend Graph contract_with_constant(std::size_t, std::vector<Edge>, std::vector<std::size_t>, double);

  void build_index(std::size_t n) {
    degree_.assign(n, 0.0);
    loop_.assign(n, 0.0);
    offsets_.assign(n + 1, 0);
    total_weight_ = 0.0;
    for (const auto& e : edges_) {
      total_weight_ += e.weight;
      if (e.u == e.v) {
        loop_[e.u] += e.weight;
        degree_[e.u] += 2.0 * e.weight;
      } else {
        degree_[e.u] += e.weight;
        degree_[e.v] += e.weight;
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
      }
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      if (e.u == e.v) continue;
      adjacency_[fill[e.u]++] = {e.v, e.weight};
      adjacency_[fill[e.v]++] = {e.u, e.weight};
    }
    total_size_ = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
  }

  std::vector<Edge> edges_;
  std::vector<double> degree_;
  std::vector<double> loop_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<std::string> labels_;
  double total_weight_ = 0.0;
  double degree_log_sum_ = 0.0;
  std::size_t total_size_ = 0;
};

inline Graph contract_with_constant(std::size_t n, std::vector<Edge> edges,
                                    std::vector<std::size_t> sizes, double degree_log_sum) {
  Graph g = Graph::from_edges(n, std::move(edges), std::move(sizes));
  g.degree_log_sum_ = degree_log_sum;
  return g;
}

/// Assignment of every vertex to exactly one community.
///
/// Community ids are renumbered densely in order of first appearance, so two
/// partitions compare equal exactly when they group vertices identically.
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<Community> assignment) : assignment_(std::move(assignment)) {
    std::unordered_map<Community, Community> remap;
    for (auto& c : assignment_) {
      auto [it, inserted] = remap.try_emplace(c, remap.size());
      c = it->second;
    }
    community_count_ = remap.size();
  }

  static Partition singletons(std::size_t n) {
    std::vector<Community> a(n);
    std::iota(a.begin(), a.end(), Community{0});
    return Partition(std::move(a));
  }

  static Partition single_community(std::size_t n) { return Partition(std::vector<Community>(n, 0)); }

  std::size_t vertex_count() const noexcept { return assignment_.size(); }
  std::size_t community_count() const noexcept { return community_count_; }
  Community operator[](Vertex v) const { return assignment_[v]; }
  const std::vector<Community>& assignment() const noexcept { return assignment_; }

  std::vector<std::size_t> community_sizes() const {
    std::vector<std::size_t> sizes(community_count_, 0);
    for (auto c : assignment_) ++sizes[c];
    return sizes;
  }

  std::vector<std::vector<Vertex>> members() const {
    std::vector<std::vector<Vertex>> out(community_count_);
    for (Vertex v = 0; v < assignment_.size(); ++v) out[assignment_[v]].push_back(v);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Community> assignment_;
  std::size_t community_count_ = 0;
};

inline void require_cover(const Graph& graph, const Partition& partition) {
  if (partition.vertex_count() != graph.vertex_count())
    throw ValidationError("partition covers " + std::to_string(partition.vertex_count()) +
                          " vertices but the graph has " + std::to_string(graph.vertex_count()));
}

/// Replaces every community by a supervertex. Inter-community weight becomes
/// edge weight between supervertices, intra-community weight becomes a loop,
/// and supervertex sizes add up the sizes of their members.
inline Graph contract(const Graph& graph, const Partition& partition) {
  require_cover(graph, partition);
  const std::size_t k = partition.community_count();
  std::vector<std::size_t> sizes(k, 0);
  for (Vertex v = 0; v < graph.vertex_count(); ++v) sizes[partition[v]] += graph.size(v);
  std::vector<Edge> edges;
  edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) edges.push_back({partition[e.u], partition[e.v], e.weight});
  return contract_with_constant(k, std::move(edges), std::move(sizes), graph.degree_log_sum());
}

}  // namespace lognull
