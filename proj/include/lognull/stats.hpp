#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "lognull/graph.hpp"

namespace lognull {

/// Sufficient statistics of a (graph, partition) pair. Every quality function
/// and likelihood in the library is a function of these fields alone.
struct PartitionStats {
  double vertex_count = 0;   // original vertices (sum of supervertex sizes)
  double total_weight = 0;   // m
  double intra_weight = 0;   // m_in
  double cut_weight = 0;     // m_out
  double pairs = 0;          // P = n(n-1)/2
  double intra_pairs = 0;    // P_in
  double inter_pairs = 0;    // P_out
  double degree_log_sum = 0; // sum_i d(i) log d(i)
  double squared_degree_sum = 0;  // sum_C D(C)^2

  std::vector<double> community_size;          // |C|
  std::vector<double> community_degree;        // D(C)
  std::vector<double> community_intra_degree;  // D_in(C), twice the intra weight

  /// Weight between communities q <= r; the diagonal holds D_in.
  std::map<std::pair<Community, Community>, double> blocks;

  std::size_t community_count() const noexcept { return community_size.size(); }

  double block_weight(Community q, Community r) const {
    if (q > r) std::swap(q, r);
    auto it = blocks.find({q, r});
    return it == blocks.end() ? 0.0 : it->second;
  }
};

inline double pair_count(double size) { return size * (size - 1.0) / 2.0; }

inline PartitionStats compute_stats(const Graph& graph, const Partition& partition) {
  require_cover(graph, partition);
  PartitionStats s;
  const std::size_t k = partition.community_count();
  s.community_size.assign(k, 0.0);
  s.community_degree.assign(k, 0.0);
  s.community_intra_degree.assign(k, 0.0);

  for (Vertex v = 0; v < graph.vertex_count(); ++v) {
    s.community_size[partition[v]] += static_cast<double>(graph.size(v));
    s.community_degree[partition[v]] += graph.degree(v);
  }
  for (const auto& e : graph.edges()) {
    Community q = partition[e.u], r = partition[e.v];
    if (q == r) {
      s.intra_weight += e.weight;
      s.community_intra_degree[q] += 2.0 * e.weight;
      s.blocks[{q, q}] += 2.0 * e.weight;
    } else {
      s.blocks[std::minmax(q, r)] += e.weight;
    }
  }
  s.total_weight = graph.total_weight();
  s.cut_weight = s.total_weight - s.intra_weight;
  s.vertex_count = static_cast<double>(graph.total_size());
  s.pairs = pair_count(s.vertex_count);
  for (double size : s.community_size) s.intra_pairs += pair_count(size);
  s.inter_pairs = s.pairs - s.intra_pairs;
  for (double d : s.community_degree) s.squared_degree_sum += d * d;
  s.degree_log_sum = graph.degree_log_sum();
  return s;
}

}  // namespace lognull
