#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string_view>
#include <vector>

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"
#include "lognull/louvain.hpp"
#include "lognull/null_models.hpp"
#include "lognull/stats.hpp"

namespace lognull {

/// splitmix64 step; used to derive independent per-run seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class StopReason { Converged, Cycle, MaxIterations, ConvergedDegenerate, GridExhausted };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::Cycle: return "cycle";
    case StopReason::MaxIterations: return "max-iters";
    case StopReason::ConvergedDegenerate: return "converged-degenerate";
    case StopReason::GridExhausted: return "grid-exhausted";
  }
  return "?";
}

struct IterativeConfig {
  std::size_t max_iterations = 50;
  double tolerance = 1e-4;
  bool detect_cycles = true;

  void validate() const {
    if (max_iterations < 1) throw ConfigError("iteration limit must be at least 1");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  }
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return out;
}

inline std::vector<double> default_mu_grid() {
  std::vector<double> out;
  for (int i = 1; i <= 39; ++i) out.push_back(0.025 * i);
  return out;
}

struct GridConfig {
  std::vector<double> gamma_grid = log_grid(0.1, 10.0, 40);
  std::vector<double> mu_grid = default_mu_grid();
  std::size_t seeds_per_point = 1;

  void validate() const {
    if (gamma_grid.empty() || mu_grid.empty()) throw ConfigError("empty parameter grid");
    if (seeds_per_point < 1) throw ConfigError("need at least one seed per grid point");
    for (double g : gamma_grid)
      if (!(g > 0.0)) throw ConfigError("resolution grid values must be positive");
    for (double mu : mu_grid)
      if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mixing grid values must lie in (0, 1)");
  }
};

struct StrategyResult {
  Partition partition;
  EstimatedParams params;          // fitted to `partition`
  double search_parameter = 0.0;   // gamma or mu handed to Louvain for `partition`
  double log_likelihood = 0.0;
  std::size_t evaluations = 0;     // iterations or grid runs
  StopReason stop_reason = StopReason::Converged;
  double best_seen_log_likelihood = -std::numeric_limits<double>::infinity();
  std::vector<double> parameter_trace;  // search parameter of every run, in order
};

inline bool is_planted(ModelKind kind) { return kind == ModelKind::PPM || kind == ModelKind::DCPPM; }

inline void require_likelihood_kind(ModelKind kind) {
  if (kind == ModelKind::SimpleModularity || kind == ModelKind::Modularity)
    throw ConfigError("strategies take ppm, dcppm, ilfr or ilfrs");
}

/// Fixed-parameter quality function optimized by Louvain for a given search
/// parameter: simple modularity for PPM, modularity for DCPPM (both at
/// resolution `param`), the ILFR / ILFRS likelihoods at mu = `param`.
inline QualityModel search_model(ModelKind kind, double param) {
  switch (kind) {
    case ModelKind::PPM: return QualityModel::simple_modularity(param);
    case ModelKind::DCPPM: return QualityModel::modularity(param);
    case ModelKind::ILFR: return QualityModel::ilfr(param);
    case ModelKind::ILFRS: return QualityModel::ilfrs(param);
    default: throw ConfigError("strategies take ppm, dcppm, ilfr or ilfrs");
  }
}

struct Reestimate {
  FittedLikelihood fit;
  double next_parameter = 0.0;
  bool degenerate = false;
};

/// Closed-form (or numeric, for ILFR) re-estimation after a Louvain run. A
/// degenerate partition gets floor-clamped parameters instead of an error.
inline Reestimate reestimate(ModelKind kind, const PartitionStats& s, double current) {
  Reestimate r;
  if (!is_planted(kind)) {
    r.fit = fit_likelihood(kind, s);
    r.next_parameter = r.fit.params.mu;
    return r;
  }
  try {
    r.fit = fit_likelihood(kind, s);
  } catch (const DegeneratePartitionError&) {
    r.degenerate = true;
    const double lo = parameter_floor(s.total_weight);
    EstimatedParams p;
    p.kind = kind;
    if (kind == ModelKind::PPM) {
      p.p_in = s.intra_pairs > 0.0 ? std::clamp(s.intra_weight / s.intra_pairs, lo, 1.0) : lo;
      p.p_out = s.inter_pairs > 0.0 ? std::clamp(s.cut_weight / s.inter_pairs, lo, 1.0) : lo;
      if (p.p_in != p.p_out) p.gamma = gamma_ppm(p.p_in, p.p_out, s.total_weight, s.pairs);
      r.fit = {p, loglik_ppm(s, p.p_in, p.p_out)};
    } else {
      const double rest = 4.0 * s.total_weight * s.total_weight - s.squared_degree_sum;
      p.p_in = std::max(4.0 * s.total_weight * s.intra_weight / s.squared_degree_sum, lo);
      p.p_out = rest > 0.0 ? std::max(4.0 * s.total_weight * s.cut_weight / rest, lo) : lo;
      if (p.p_in != p.p_out) p.gamma = gamma_dcppm(p.p_in, p.p_out);
      r.fit = {p, loglik_dcppm(s, p.p_in, p.p_out)};
    }
  }
  if (!r.fit.params.gamma) r.degenerate = true;
  r.next_parameter = r.fit.params.gamma.value_or(current);
  return r;
}

/// Alternates Louvain with parameter re-estimation, starting from gamma = 1
/// (PPM, DCPPM) or mu = 0.5 (ILFR, ILFRS). Stops when the parameter moves by
/// less than the tolerance, when it repeats an earlier value (rounded to six
/// decimals), or after the iteration limit. Returns the last partition.
inline StrategyResult run_iterative(const Graph& graph, ModelKind kind, const IterativeConfig& config,
                                    std::uint64_t seed) {
  require_likelihood_kind(kind);
  config.validate();
  auto rounded = [](double x) { return std::llround(x * 1e6); };
  double param = is_planted(kind) ? 1.0 : 0.5;
  std::set<long long> seen;
  std::size_t degenerate_streak = 0;
  StrategyResult result;
  result.stop_reason = StopReason::MaxIterations;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    Partition partition = louvain(graph, search_model(kind, param), mix_seed(seed, it));
    const Reestimate next = reestimate(kind, compute_stats(graph, partition), param);
    result.partition = std::move(partition);
    result.params = next.fit.params;
    result.search_parameter = param;
    result.log_likelihood = next.fit.log_likelihood;
    result.evaluations = it + 1;
    result.parameter_trace.push_back(param);
    result.best_seen_log_likelihood = std::max(result.best_seen_log_likelihood, next.fit.log_likelihood);

    degenerate_streak = next.degenerate ? degenerate_streak + 1 : 0;
    if (degenerate_streak >= 2) {
      result.stop_reason = StopReason::ConvergedDegenerate;
      break;
    }
    if (std::abs(param - next.next_parameter) < config.tolerance) {
      result.stop_reason = StopReason::Converged;
      break;
    }
    if (config.detect_cycles && seen.contains(rounded(next.next_parameter))) {
      result.stop_reason = StopReason::Cycle;
      break;
    }
    seen.insert(rounded(next.next_parameter));
    param = next.next_parameter;
  }
  return result;
}

/// Grid search over the search parameter: every grid point's Louvain partition
/// is scored by the model likelihood at its fitted parameters, and the best
/// partition wins (first one on ties).
inline StrategyResult run_maximization(const Graph& graph, ModelKind kind, const GridConfig& config,
                                       std::uint64_t seed) {
  require_likelihood_kind(kind);
  config.validate();
  const auto& grid = is_planted(kind) ? config.gamma_grid : config.mu_grid;
  StrategyResult best;
  bool found = false;
  std::size_t run = 0;
  for (double param : grid) {
    for (std::size_t rep = 0; rep < config.seeds_per_point; ++rep, ++run) {
      best.parameter_trace.push_back(param);
      Partition partition = louvain(graph, search_model(kind, param), mix_seed(seed, run));
      FittedLikelihood fit;
      try {
        fit = fit_likelihood(kind, compute_stats(graph, partition));
      } catch (const DegeneratePartitionError&) {
        continue;
      }
      if (!found || fit.log_likelihood > best.log_likelihood) {
        found = true;
        best.partition = std::move(partition);
        best.params = fit.params;
        best.search_parameter = param;
        best.log_likelihood = fit.log_likelihood;
      }
    }
  }
  if (!found) throw DomainError("no valid partition on the parameter grid");
  best.evaluations = run;
  best.stop_reason = StopReason::GridExhausted;
  best.best_seen_log_likelihood = best.log_likelihood;
  return best;
}

}  // namespace lognull
