#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"
#include "lognull/stats.hpp"

namespace lognull {

enum class ModelKind { SimpleModularity, Modularity, PPM, DCPPM, ILFR, ILFRS };

inline constexpr std::array kAllModelKinds = {ModelKind::SimpleModularity, ModelKind::Modularity,
                                              ModelKind::PPM,   ModelKind::DCPPM,
                                              ModelKind::ILFR,  ModelKind::ILFRS};

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::SimpleModularity: return "simple";
    case ModelKind::Modularity: return "modularity";
    case ModelKind::PPM: return "ppm";
    case ModelKind::DCPPM: return "dcppm";
    case ModelKind::ILFR: return "ilfr";
    case ModelKind::ILFRS: return "ilfrs";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
  for (auto kind : kAllModelKinds)
    if (to_string(kind) == name) return kind;
  throw DomainError("unknown model '" + std::string(name) + "'");
}

/// A quality function with its parameters fixed: gamma for the two modularity
/// variants, (p_in, p_out) for the planted partition models, mu for ILFR/ILFRS.
struct QualityModel {
  ModelKind kind = ModelKind::Modularity;
  double gamma = 1.0;
  double p_in = 1.0;
  double p_out = 1.0;
  double mu = 0.5;

  static QualityModel simple_modularity(double gamma) { return {ModelKind::SimpleModularity, gamma}; }
  static QualityModel modularity(double gamma) { return {ModelKind::Modularity, gamma}; }
  static QualityModel ppm(double p_in, double p_out) { return {ModelKind::PPM, 1.0, p_in, p_out}; }
  static QualityModel dcppm(double p_in, double p_out) { return {ModelKind::DCPPM, 1.0, p_in, p_out}; }
  static QualityModel ilfr(double mu) { return {ModelKind::ILFR, 1.0, 1.0, 1.0, mu}; }
  static QualityModel ilfrs(double mu) { return {ModelKind::ILFRS, 1.0, 1.0, 1.0, mu}; }

  void validate() const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    switch (kind) {
      case ModelKind::SimpleModularity:
      case ModelKind::Modularity:
        if (!positive(gamma)) throw DomainError("resolution must be positive");
        break;
      case ModelKind::PPM:
        if (!positive(p_in) || !positive(p_out) || p_in > 1.0 || p_out > 1.0)
          throw DomainError("PPM probabilities must lie in (0, 1]");
        break;
      case ModelKind::DCPPM:
        if (!positive(p_in) || !positive(p_out)) throw DomainError("DCPPM rates must be positive");
        break;
      case ModelKind::ILFR:
      case ModelKind::ILFRS:
        if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mixing parameter must lie in (0, 1)");
        break;
    }
  }
};

struct PlantedParams {
  double p_in;
  double p_out;
};

/// Parameters fitted to a partition. Unused slots stay NaN; `gamma` is the
/// equivalent resolution and is only set for PPM and DCPPM.
struct EstimatedParams {
  ModelKind kind = ModelKind::PPM;
  double p_in = std::numeric_limits<double>::quiet_NaN();
  double p_out = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> gamma;
};

/// Lower clamp for p_in, p_out and mu: a cut of less than a quarter edge is
/// below what the models can resolve.
inline double parameter_floor(double total_weight) { return 1.0 / (4.0 * total_weight); }

namespace detail {

inline void require_edges(const PartitionStats& s) {
  if (!(s.total_weight > 0.0)) throw DomainError("graph has no edges");
}

inline void require_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mixing parameter must lie in (0, 1)");
}

inline void require_positive(double p_in, double p_out) {
  if (!(p_in > 0.0) || !(p_out > 0.0)) throw DomainError("parameters must be positive");
}

/// a * log(b) with a == 0 giving 0 even for b == 0.
inline double xlogy(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Modularity

/// Simple modularity: Erdos-Renyi null model, expected intra weight P_in m / P.
inline double simple_modularity(const PartitionStats& s, double gamma) {
  detail::require_edges(s);
  const double expected = s.pairs > 0.0 ? s.intra_pairs * s.total_weight / s.pairs : 0.0;
  return (s.intra_weight - gamma * expected) / s.total_weight;
}

/// Standard (configuration model) modularity with resolution gamma.
inline double modularity(const PartitionStats& s, double gamma) {
  detail::require_edges(s);
  const double m = s.total_weight;
  return s.intra_weight / m - gamma * s.squared_degree_sum / (4.0 * m * m);
}

// ---------------------------------------------------------------------------
// Planted partition model (Poisson form)

inline double loglik_ppm(const PartitionStats& s, double p_in, double p_out) {
  detail::require_positive(p_in, p_out);
  return s.intra_weight * std::log(p_in) + s.cut_weight * std::log(p_out) - s.intra_pairs * p_in -
         s.inter_pairs * p_out;
}

inline PlantedParams estimate_ppm(const PartitionStats& s) {
  detail::require_edges(s);
  if (!(s.intra_pairs > 0.0)) throw DegeneratePartitionError("no intra-community pairs");
  if (!(s.inter_pairs > 0.0)) throw DegeneratePartitionError("no inter-community pairs");
  const double lo = parameter_floor(s.total_weight);
  return {std::clamp(s.intra_weight / s.intra_pairs, lo, 1.0),
          std::clamp(s.cut_weight / s.inter_pairs, lo, 1.0)};
}

/// Resolution at which simple modularity ranks partitions like the PPM likelihood.
inline double gamma_ppm(double p_in, double p_out, double total_weight, double pairs) {
  detail::require_positive(p_in, p_out);
  if (p_in == p_out) throw DomainError("resolution undefined for p_in == p_out");
  return pairs * (p_in - p_out) / (total_weight * (std::log(p_in) - std::log(p_out)));
}

// ---------------------------------------------------------------------------
// Degree-corrected planted partition model

inline double loglik_dcppm(const PartitionStats& s, double p_in, double p_out) {
  detail::require_positive(p_in, p_out);
  detail::require_edges(s);
  const double m = s.total_weight;
  return s.intra_weight * (std::log(p_in) - std::log(p_out)) -
         (p_in - p_out) / (4.0 * m) * s.squared_degree_sum + s.degree_log_sum + m * std::log(p_out) -
         m * p_out - m * std::log(2.0 * m);
}

inline PlantedParams estimate_dcppm(const PartitionStats& s) {
  detail::require_edges(s);
  const double m = s.total_weight;
  const double rest = 4.0 * m * m - s.squared_degree_sum;
  if (!(rest > 0.0)) throw DegeneratePartitionError("all edge ends lie in one community");
  const double lo = parameter_floor(m);
  return {std::max(4.0 * m * s.intra_weight / s.squared_degree_sum, lo),
          std::max(4.0 * m * s.cut_weight / rest, lo)};
}

/// Resolution at which modularity ranks partitions like the DCPPM likelihood.
inline double gamma_dcppm(double p_in, double p_out) {
  detail::require_positive(p_in, p_out);
  if (p_in == p_out) throw DomainError("resolution undefined for p_in == p_out");
  return (p_in - p_out) / (std::log(p_in) - std::log(p_out));
}

// ---------------------------------------------------------------------------
// Independent LFR model and its simplification

/// Contribution of one community to the ILFR log-likelihood.
inline double ilfr_community_term(double intra_degree, double degree, double mu, double total_weight) {
  if (intra_degree == 0.0) return 0.0;
  return intra_degree / 2.0 * std::log((1.0 - mu) / degree + mu / (2.0 * total_weight));
}

/// Contribution of one community to the ILFRS log-likelihood.
inline double ilfrs_community_term(double intra_degree, double degree) {
  return intra_degree == 0.0 ? 0.0 : -intra_degree / 2.0 * std::log(degree);
}

inline double loglik_ilfr(const PartitionStats& s, double mu) {
  detail::require_mu(mu);
  detail::require_edges(s);
  const double m = s.total_weight;
  double value = 0.0;
  for (std::size_t c = 0; c < s.community_count(); ++c)
    value += ilfr_community_term(s.community_intra_degree[c], s.community_degree[c], mu, m);
  return value + detail::xlogy(s.cut_weight, mu) + s.degree_log_sum -
         s.cut_weight * std::log(2.0 * m) - m;
}

inline double loglik_ilfrs(const PartitionStats& s, double mu) {
  detail::require_mu(mu);
  detail::require_edges(s);
  const double m = s.total_weight;
  double value = detail::xlogy(s.intra_weight, 1.0 - mu) + detail::xlogy(s.cut_weight, mu) -
                 s.cut_weight * std::log(2.0 * m);
  for (std::size_t c = 0; c < s.community_count(); ++c)
    value += ilfrs_community_term(s.community_intra_degree[c], s.community_degree[c]);
  return value + s.degree_log_sum - m;
}

inline double estimate_mu_ilfrs(const PartitionStats& s) {
  detail::require_edges(s);
  const double lo = parameter_floor(s.total_weight);
  return std::clamp(s.cut_weight / s.total_weight, lo, 1.0 - lo);
}

/// Maximizes the ILFR likelihood over mu on [floor, 1 - floor]: a 200-point scan
/// picks the bracket, golden-section search refines it to 1e-6.
inline double estimate_mu_ilfr(const PartitionStats& s) {
  detail::require_edges(s);
  const double lo = parameter_floor(s.total_weight);
  const double hi = 1.0 - lo;
  if (!(lo < hi)) return 0.5;
  auto f = [&](double mu) { return loglik_ilfr(s, mu); };

  constexpr int kScan = 200;
  std::vector<double> xs(kScan);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    xs[i] = lo + (hi - lo) * i / (kScan - 1);
    double v = f(xs[i]);
    if (v > best_value) best_value = v, best = static_cast<std::size_t>(i);
  }
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[best + 1 == xs.size() ? best : best + 1];

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-6) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - ratio * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + ratio * (b - a), fd = f(d);
    }
  }
  double arg = (a + b) / 2.0;
  double value = f(arg);
  for (double x : {a, b, xs[best]}) {
    double v = f(x);
    if (v > value) value = v, arg = x;
  }
  return arg;
}

// ---------------------------------------------------------------------------
// Likelihoods with the parameters profiled out

inline double loglik_ppm_nonparametric(const PartitionStats& s) {
  if (!(s.intra_weight > 0.0 && s.cut_weight > 0.0 && s.intra_pairs > 0.0 && s.inter_pairs > 0.0))
    throw DegeneratePartitionError("PPM profile likelihood needs intra and inter edges and pairs");
  return s.intra_weight * std::log(s.intra_weight / s.intra_pairs) +
         s.cut_weight * std::log(s.cut_weight / s.inter_pairs) - s.total_weight;
}

inline double loglik_dcppm_nonparametric(const PartitionStats& s) {
  detail::require_edges(s);
  const double m = s.total_weight, m_in = s.intra_weight, m_out = s.cut_weight;
  const double sq = s.squared_degree_sum;
  const double rest = 4.0 * m * m - sq;
  if (!(m_in > 0.0 && m_out > 0.0 && rest > 0.0))
    throw DegeneratePartitionError("DCPPM profile likelihood needs intra and inter edges");
  return m_in * std::log(m_in * rest / (m_out * sq)) - (m_in - m_out * sq / rest) + s.degree_log_sum +
         m * std::log(4.0 * m * m_out / rest) - 4.0 * m * m * m_out / rest - m * std::log(2.0 * m);
}

/// ILFRS likelihood at mu = m_out / m, using 0 log 0 = 0 at the boundary.
inline double loglik_ilfrs_nonparametric(const PartitionStats& s) {
  detail::require_edges(s);
  const double m = s.total_weight;
  double value = detail::xlogy(s.intra_weight, s.intra_weight / m) +
                 detail::xlogy(s.cut_weight, s.cut_weight / m) - m - s.cut_weight * std::log(2.0 * m);
  for (std::size_t c = 0; c < s.community_count(); ++c)
    value += ilfrs_community_term(s.community_intra_degree[c], s.community_degree[c]);
  return value + s.degree_log_sum;
}

// ---------------------------------------------------------------------------
// Dispatch

/// Value of the model's quality function on the given statistics.
inline double evaluate(const QualityModel& model, const PartitionStats& s) {
  switch (model.kind) {
    case ModelKind::SimpleModularity: return simple_modularity(s, model.gamma);
    case ModelKind::Modularity: return modularity(s, model.gamma);
    case ModelKind::PPM: return loglik_ppm(s, model.p_in, model.p_out);
    case ModelKind::DCPPM: return loglik_dcppm(s, model.p_in, model.p_out);
    case ModelKind::ILFR: return loglik_ilfr(s, model.mu);
    case ModelKind::ILFRS: return loglik_ilfrs(s, model.mu);
  }
  return 0.0;
}

struct FittedLikelihood {
  EstimatedParams params;
  double log_likelihood;
};

/// Fits the model's optimal parameters to a partition and returns the
/// likelihood there. Only the four likelihood models are accepted.
inline FittedLikelihood fit_likelihood(ModelKind kind, const PartitionStats& s) {
  EstimatedParams p;
  p.kind = kind;
  switch (kind) {
    case ModelKind::PPM: {
      auto [p_in, p_out] = estimate_ppm(s);
      p.p_in = p_in, p.p_out = p_out;
      if (p_in != p_out) p.gamma = gamma_ppm(p_in, p_out, s.total_weight, s.pairs);
      return {p, loglik_ppm(s, p_in, p_out)};
    }
    case ModelKind::DCPPM: {
      auto [p_in, p_out] = estimate_dcppm(s);
      p.p_in = p_in, p.p_out = p_out;
      if (p_in != p_out) p.gamma = gamma_dcppm(p_in, p_out);
      return {p, loglik_dcppm(s, p_in, p_out)};
    }
    case ModelKind::ILFR:
      p.mu = estimate_mu_ilfr(s);
      return {p, loglik_ilfr(s, p.mu)};
    case ModelKind::ILFRS:
      p.mu = estimate_mu_ilfrs(s);
      return {p, loglik_ilfrs(s, p.mu)};
    default:
      throw DomainError("model '" + std::string(to_string(kind)) + "' has no likelihood");
  }
}

// ---------------------------------------------------------------------------
// Null-model expectations and sampling

/// Expected degree of every vertex in a graph drawn from the null model.
inline std::vector<double> expected_degrees(const Graph& graph, const Partition& partition,
                                            const QualityModel& model) {
  model.validate();
  const PartitionStats s = compute_stats(graph, partition);
  const double two_m = 2.0 * s.total_weight;
  std::vector<double> mass(s.community_count(), 0.0);
  double total_mass = 0.0;
  for (Vertex j = 0; j < graph.vertex_count(); ++j) {
    mass[partition[j]] += graph.degree(j);
    total_mass += graph.degree(j);
  }
  std::vector<double> out(graph.vertex_count());
  for (Vertex i = 0; i < graph.vertex_count(); ++i) {
    const Community c = partition[i];
    const double d = graph.degree(i);
    const double own_degree = s.community_degree[c];
    switch (model.kind) {
      case ModelKind::PPM:
        out[i] = model.p_in * (s.community_size[c] - 1.0) +
                 model.p_out * (s.vertex_count - s.community_size[c]);
        break;
      case ModelKind::DCPPM:
        out[i] = d / two_m * (own_degree * (model.p_in - model.p_out) + two_m * model.p_out);
        break;
      case ModelKind::ILFR:
        // Rates summed over all partners j (the loop at half rate counts twice).
        out[i] = own_degree > 0.0 ? (1.0 - model.mu) * d * mass[c] / own_degree + model.mu * d * total_mass / two_m
                                  : 0.0;
        break;
      default:
        throw DomainError("expected degrees are defined for PPM, DCPPM and ILFR only");
    }
  }
  return out;
}

/// Block rates 2m m(C_q, C_r) / (D(C_q) D(C_r)) that make the general
/// degree-corrected block model reproduce the observed degrees.
inline std::vector<std::vector<double>> dcsbm_degree_preserving_rates(const PartitionStats& s) {
  const std::size_t k = s.community_count();
  std::vector<std::vector<double>> rates(k, std::vector<double>(k, 0.0));
  for (Community q = 0; q < k; ++q)
    for (Community r = 0; r < k; ++r) {
      const double denom = s.community_degree[q] * s.community_degree[r];
      rates[q][r] = denom > 0.0 ? 2.0 * s.total_weight * s.block_weight(q, r) / denom : 0.0;
    }
  return rates;
}

/// Expected degrees under a degree-corrected block model with the given block rates.
inline std::vector<double> expected_degrees_dcsbm(const Graph& graph, const Partition& partition,
                                                  const std::vector<std::vector<double>>& rates) {
  const PartitionStats s = compute_stats(graph, partition);
  const double two_m = 2.0 * s.total_weight;
  std::vector<double> out(graph.vertex_count());
  for (Vertex i = 0; i < graph.vertex_count(); ++i) {
    double sum = 0.0;
    for (Community c = 0; c < s.community_count(); ++c) sum += rates[partition[i]][c] * s.community_degree[c];
    out[i] = graph.degree(i) / two_m * sum;
  }
  return out;
}

/// Draws a multigraph from the null model: independent Poisson multiplicities
/// for every pair, loops at half the pair rate (PPM has no loops). `degrees`
/// supplies d(i) for the degree-corrected models.
inline Graph sample_null_model(std::span<const double> degrees, const Partition& partition,
                               const QualityModel& model, std::uint64_t seed) {
  model.validate();
  if (model.kind != ModelKind::PPM && model.kind != ModelKind::DCPPM && model.kind != ModelKind::ILFR)
    throw DomainError("sampling is defined for PPM, DCPPM and ILFR only");
  const std::size_t n = degrees.size();
  if (partition.vertex_count() != n) throw ValidationError("partition does not match degree sequence");
  double two_m = 0.0;
  std::vector<double> community_degree(partition.community_count(), 0.0);
  for (Vertex i = 0; i < n; ++i) {
    two_m += degrees[i];
    community_degree[partition[i]] += degrees[i];
  }
  auto rate = [&](Vertex i, Vertex j) {
    const bool same = partition[i] == partition[j];
    switch (model.kind) {
      case ModelKind::PPM: return same ? model.p_in : model.p_out;
      case ModelKind::DCPPM: return degrees[i] * degrees[j] * (same ? model.p_in : model.p_out) / two_m;
      default: {
        double r = model.mu * degrees[i] * degrees[j] / two_m;
        if (same) r += (1.0 - model.mu) * degrees[i] * degrees[j] / community_degree[partition[i]];
        return r;
      }
    }
  };
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i; j < n; ++j) {
      double r = rate(i, j);
      if (i == j) {
        if (model.kind == ModelKind::PPM) continue;
        r /= 2.0;
      }
      if (!(r > 0.0)) continue;
      auto count = std::poisson_distribution<long long>(r)(rng);
      if (count > 0) edges.push_back({i, j, static_cast<double>(count)});
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace lognull
