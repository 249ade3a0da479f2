#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"
#include "lognull/null_models.hpp"
#include "lognull/stats.hpp"

namespace lognull {

/// Working partition of one Louvain level together with the per-community
/// aggregates that make a move's quality change computable in O(deg).
class LouvainState {
 public:
  LouvainState(const Graph& graph, QualityModel model)
      : LouvainState(graph, model, Partition::singletons(graph.vertex_count())) {}

  LouvainState(const Graph& graph, QualityModel model, const Partition& initial)
      : graph_(&graph), model_(model) {
    model_.validate();
    require_cover(graph, initial);
    if (!(graph.total_weight() > 0.0)) throw DomainError("graph has no edges");
    const std::size_t n = graph.vertex_count();
    community_ = initial.assignment();
    size_.assign(n, 0.0);
    degree_.assign(n, 0.0);
    intra_degree_.assign(n, 0.0);
    for (Vertex v = 0; v < n; ++v) {
      size_[community_[v]] += static_cast<double>(graph.size(v));
      degree_[community_[v]] += graph.degree(v);
    }
    for (const auto& e : graph.edges())
      if (community_[e.u] == community_[e.v]) {
        intra_weight_ += e.weight;
        intra_degree_[community_[e.u]] += 2.0 * e.weight;
      }
    const double m = graph.total_weight();
    const double total = static_cast<double>(graph.total_size());
    pairs_ = pair_count(total);
    switch (model_.kind) {
      case ModelKind::SimpleModularity:
        intra_coef_ = 1.0 / m;
        pair_coef_ = pairs_ > 0.0 ? -model_.gamma / pairs_ : 0.0;
        break;
      case ModelKind::Modularity:
        intra_coef_ = 1.0 / m;
        square_coef_ = -model_.gamma / (4.0 * m * m);
        break;
      case ModelKind::PPM:
        intra_coef_ = std::log(model_.p_in) - std::log(model_.p_out);
        pair_coef_ = -(model_.p_in - model_.p_out);
        break;
      case ModelKind::DCPPM:
        intra_coef_ = std::log(model_.p_in) - std::log(model_.p_out);
        square_coef_ = -(model_.p_in - model_.p_out) / (4.0 * m);
        break;
      case ModelKind::ILFR:
        intra_coef_ = std::log(2.0 * m) - std::log(model_.mu);
        break;
      case ModelKind::ILFRS:
        intra_coef_ = std::log(1.0 - model_.mu) - std::log(model_.mu) + std::log(2.0 * m);
        break;
    }
    scratch_weight_.assign(n, 0.0);
  }

  const Graph& graph() const noexcept { return *graph_; }
  const QualityModel& model() const noexcept { return model_; }
  Community community_of(Vertex v) const { return community_[v]; }
  std::size_t community_slots() const noexcept { return size_.size(); }
  bool is_empty(Community c) const { return size_[c] == 0.0; }

  /// Weight between `v` and the members of `c` other than `v` itself.
  double weight_to(Vertex v, Community c) const {
    double w = 0.0;
    for (const auto& nb : graph_->neighbors(v))
      if (community_[nb.vertex] == c) w += nb.weight;
    return w;
  }

  /// Quality change of moving `vertex` into `target`, which may be a
  /// neighboring community or an empty slot. Zero when `target` is the
  /// vertex's own community.
  double move_gain(Vertex vertex, Community target) const {
    if (vertex >= graph_->vertex_count()) throw DomainError("unknown vertex");
    if (target >= size_.size()) throw DomainError("unknown community");
    const Community source = community_[vertex];
    if (target == source) return 0.0;
    return gain(vertex, source, weight_to(vertex, source), target, weight_to(vertex, target));
  }

  /// Moves `vertex` into `target` and updates the cached aggregates.
  void move(Vertex vertex, Community target) {
    if (vertex >= graph_->vertex_count()) throw DomainError("unknown vertex");
    if (target >= size_.size()) throw DomainError("unknown community");
    const Community source = community_[vertex];
    if (target == source) return;
    const double w_source = weight_to(vertex, source);
    const double w_target = weight_to(vertex, target);
    apply(vertex, source, w_source, target, w_target);
  }

  /// Runs local-move passes in random order until a pass accepts no move.
  /// Returns the number of accepted moves.
  template <class Rng>
  std::size_t optimize_level(Rng& rng) {
    const std::size_t n = graph_->vertex_count();
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::vector<Community> touched;
    std::size_t total_moves = 0;
    for (;;) {
      std::shuffle(order.begin(), order.end(), rng);
      std::size_t moves = 0;
      double pass_gain = 0.0;
      for (Vertex v : order) {
        const Community source = community_[v];
        touched.clear();
        for (const auto& nb : graph_->neighbors(v)) {
          const Community c = community_[nb.vertex];
          if (scratch_weight_[c] == 0.0) touched.push_back(c);
          scratch_weight_[c] += nb.weight;
        }
        const double w_source = scratch_weight_[source];
        std::sort(touched.begin(), touched.end());
        Community best = source;
        double best_gain = 0.0;
        for (Community c : touched) {
          if (c == source) continue;
          const double g = gain(v, source, w_source, c, scratch_weight_[c]);
          if (g > best_gain) best_gain = g, best = c;
        }
        if (best != source && best_gain > kMinGain) {
          apply(v, source, w_source, best, scratch_weight_[best]);
          ++moves;
          pass_gain += best_gain;
        }
        for (Community c : touched) scratch_weight_[c] = 0.0;
      }
      total_moves += moves;
      if (moves == 0) break;
      if (pass_gain <= kMinPassImprovement * std::max(1.0, std::abs(quality()))) break;
    }
    return total_moves;
  }

  /// Current partition with dense community ids.
  Partition partition() const { return Partition(community_); }

  /// Statistics assembled from the cached aggregates (not recomputed from edges).
  PartitionStats cached_stats() const {
    PartitionStats s;
    // Same numbering as partition(): order of first appearance.
    constexpr Community kUnset = static_cast<Community>(-1);
    std::vector<Community> remap(size_.size(), kUnset);
    for (Vertex v = 0; v < community_.size(); ++v) {
      const Community c = community_[v];
      if (remap[c] != kUnset) continue;
      remap[c] = static_cast<Community>(s.community_size.size());
      s.community_size.push_back(size_[c]);
      s.community_degree.push_back(degree_[c]);
      s.community_intra_degree.push_back(intra_degree_[c]);
      s.squared_degree_sum += degree_[c] * degree_[c];
      s.intra_pairs += pair_count(size_[c]);
      if (intra_degree_[c] != 0.0) s.blocks[{remap[c], remap[c]}] = intra_degree_[c];
    }
    for (const auto& e : graph_->edges()) {
      Community q = remap[community_[e.u]], r = remap[community_[e.v]];
      if (q != r) s.blocks[std::minmax(q, r)] += e.weight;
    }
    s.vertex_count = static_cast<double>(graph_->total_size());
    s.total_weight = graph_->total_weight();
    s.intra_weight = intra_weight_;
    s.cut_weight = s.total_weight - intra_weight_;
    s.pairs = pairs_;
    s.inter_pairs = pairs_ - s.intra_pairs;
    s.degree_log_sum = graph_->degree_log_sum();
    return s;
  }

  /// Full value of the model's quality function for the current partition.
  double quality() const { return evaluate(model_, cached_stats()); }

  static constexpr double kMinGain = 1e-10;
  static constexpr double kMinPassImprovement = 1e-9;

 private:
  double community_term(double intra_degree, double degree) const {
    if (model_.kind == ModelKind::ILFR)
      return ilfr_community_term(intra_degree, degree, model_.mu, graph_->total_weight());
    if (model_.kind == ModelKind::ILFRS) return ilfrs_community_term(intra_degree, degree);
    return 0.0;
  }

  double gain(Vertex v, Community source, double w_source, Community target, double w_target) const {
    const double s = static_cast<double>(graph_->size(v));
    const double d = graph_->degree(v);
    const double loop = graph_->loop_weight(v);
    const double d_intra = w_target - w_source;
    double g = intra_coef_ * d_intra;
    if (pair_coef_ != 0.0) g += pair_coef_ * s * (size_[target] - (size_[source] - s));
    if (square_coef_ != 0.0) g += square_coef_ * 2.0 * d * (degree_[target] - degree_[source] + d);
    if (model_.kind == ModelKind::ILFR || model_.kind == ModelKind::ILFRS) {
      const double src_in = intra_degree_[source] - 2.0 * (w_source + loop);
      const double dst_in = intra_degree_[target] + 2.0 * (w_target + loop);
      g += community_term(src_in, degree_[source] - d) - community_term(intra_degree_[source], degree_[source]);
      g += community_term(dst_in, degree_[target] + d) - community_term(intra_degree_[target], degree_[target]);
    }
    return g;
  }

  void apply(Vertex v, Community source, double w_source, Community target, double w_target) {
    const double s = static_cast<double>(graph_->size(v));
    const double d = graph_->degree(v);
    const double loop = graph_->loop_weight(v);
    intra_weight_ += w_target - w_source;
    size_[source] -= s, size_[target] += s;
    degree_[source] -= d, degree_[target] += d;
    intra_degree_[source] -= 2.0 * (w_source + loop);
    intra_degree_[target] += 2.0 * (w_target + loop);
    community_[v] = target;
  }

  const Graph* graph_;
  QualityModel model_;
  std::vector<Community> community_;
  std::vector<double> size_;
  std::vector<double> degree_;
  std::vector<double> intra_degree_;
  double intra_weight_ = 0.0;
  double pairs_ = 0.0;
  // The quality change of a move is intra_coef * dm_in + pair_coef * dP_in
  // + square_coef * d(sum D^2) + change in the per-community terms.
  double intra_coef_ = 0.0;
  double pair_coef_ = 0.0;
  double square_coef_ = 0.0;
  std::vector<double> scratch_weight_;
};

struct LouvainResult {
  Partition partition;
  double quality = 0.0;                 // on the input graph
  std::vector<double> level_quality;    // after each level's local moves
  std::size_t levels = 0;
};

/// Multi-level Louvain optimization of a fixed-parameter quality function.
/// Deterministic for a given (graph, model, seed).
inline LouvainResult run_louvain(const Graph& graph, const QualityModel& model, std::uint64_t seed) {
  model.validate();
  std::mt19937_64 rng(seed);
  std::vector<Community> flat(graph.vertex_count());
  std::iota(flat.begin(), flat.end(), Community{0});

  LouvainResult result;
  std::optional<Graph> owned;
  const Graph* level = &graph;
  for (;;) {
    LouvainState state(*level, model);
    const double before = state.quality();
    const std::size_t moves = state.optimize_level(rng);
    if (moves == 0) break;
    const double after = state.quality();
    result.level_quality.push_back(after);
    ++result.levels;
    const Partition level_partition = state.partition();
    for (auto& c : flat) c = level_partition[c];
    if (after - before <= LouvainState::kMinPassImprovement * std::max(1.0, std::abs(before))) break;
    if (level_partition.community_count() == level->vertex_count()) break;
    owned = contract(*level, level_partition);
    level = &*owned;
  }
  result.partition = Partition(std::move(flat));
  result.quality = evaluate(model, compute_stats(graph, result.partition));
  return result;
}

inline Partition louvain(const Graph& graph, const QualityModel& model, std::uint64_t seed) {
  return run_louvain(graph, model, seed).partition;
}

}  // namespace lognull
