#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace lognull;

namespace {

PartitionStats karate_stats() {
  static const Graph g = oracle::karate();
  static const PartitionStats s = compute_stats(g, oracle::karate_truth(g));
  return s;
}

PartitionStats triangles_stats() { return compute_stats(oracle::two_triangles(), oracle::triangle_split()); }

double rel_close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST(SimpleModularity, Examples) {
  EXPECT_NEAR(simple_modularity(triangles_stats(), 1.0), 0.6, 1e-12);
  EXPECT_NEAR(simple_modularity(triangles_stats(), 2.5), 0.0, 1e-12);
  Graph g = oracle::karate();
  EXPECT_DOUBLE_EQ(simple_modularity(compute_stats(g, Partition::singletons(34)), 3.0), 0.0);
}

TEST(Modularity, Examples) {
  EXPECT_NEAR(modularity(triangles_stats(), 1.0), 0.5, 1e-12);
  EXPECT_NEAR(modularity(karate_stats(), 1.0), 0.3715, 0.00005);
  Graph g = oracle::karate();
  EXPECT_NEAR(modularity(compute_stats(g, Partition::single_community(34)), 1.0), 0.0, 1e-12);
}

TEST(Ppm, Examples) {
  auto [p_in, p_out] = estimate_ppm(karate_stats());
  EXPECT_NEAR(loglik_ppm(karate_stats(), p_in, p_out), -206.12, 0.005);
  for (double p_out_value : {0.01, 0.3, 1.0})
    EXPECT_NEAR(loglik_ppm(triangles_stats(), 1.0, p_out_value), -6 - 9 * p_out_value, 1e-12);
  EXPECT_THROW(loglik_ppm(triangles_stats(), 0.0, 0.5), DomainError);
}

TEST(Ppm, Estimator) {
  auto t = estimate_ppm(triangles_stats());
  EXPECT_DOUBLE_EQ(t.p_in, 1.0);
  EXPECT_DOUBLE_EQ(t.p_out, parameter_floor(6));
  auto k = estimate_ppm(karate_stats());
  EXPECT_NEAR(gamma_ppm(k.p_in, k.p_out, 78, karate_stats().pairs), 0.78, 0.005);
  Graph g = oracle::karate();
  EXPECT_THROW(estimate_ppm(compute_stats(g, Partition::single_community(34))), DegeneratePartitionError);
  EXPECT_THROW(estimate_ppm(compute_stats(g, Partition::singletons(34))), DegeneratePartitionError);
}

TEST(Ppm, GammaIdentity) {
  const double m = 10, pairs = 100;
  const double p_out = m / (pairs * (std::exp(1.0) - 1));
  EXPECT_NEAR(gamma_ppm(std::exp(1.0) * p_out, p_out, m, pairs), 1.0, 1e-12);
  EXPECT_THROW(gamma_ppm(0.3, 0.3, m, pairs), DomainError);
}

TEST(Dcppm, Examples) {
  auto [p_in, p_out] = estimate_dcppm(karate_stats());
  EXPECT_NEAR(loglik_dcppm(karate_stats(), p_in, p_out), -168.65, 0.005);
  EXPECT_NEAR(gamma_dcppm(p_in, p_out), 0.78, 0.005);
  EXPECT_THROW(loglik_dcppm(karate_stats(), -1, 1), DomainError);
}

TEST(Dcppm, EqualRatesIgnorePartition) {
  Graph g = oracle::karate();
  const double p = 0.7;
  auto s = compute_stats(g, Partition::single_community(34));
  const double expected = s.degree_log_sum + 78 * std::log(p) - 78 * p - 78 * std::log(156.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto q = compute_stats(g, oracle::random_partition(34, 5, rng));
    EXPECT_NEAR(loglik_dcppm(q, p, p), expected, 1e-9);
  }
}

TEST(Dcppm, Estimator) {
  auto t = estimate_dcppm(triangles_stats());
  EXPECT_DOUBLE_EQ(t.p_in, 2.0);
  EXPECT_DOUBLE_EQ(t.p_out, parameter_floor(6));
  Graph g = oracle::karate();
  EXPECT_THROW(estimate_dcppm(compute_stats(g, Partition::single_community(34))), DegeneratePartitionError);
  EXPECT_DOUBLE_EQ(gamma_dcppm(2.0, 0.5), gamma_dcppm(0.5, 2.0));
  EXPECT_THROW(gamma_dcppm(1.0, 1.0), DomainError);
}

TEST(Ilfr, Examples) {
  const double mu = estimate_mu_ilfr(karate_stats());
  EXPECT_NEAR(loglik_ilfr(karate_stats(), mu), -168.63, 0.05);
  // m_out = 0: only the intra terms and the constants remain.
  const double lo = parameter_floor(6);
  const double limit = 6 * std::log(1.0 / 6) + 12 * std::log(2.0) - 6;
  EXPECT_NEAR(loglik_ilfr(triangles_stats(), lo), limit, 6 * lo + 1e-9);
  EXPECT_THROW(loglik_ilfr(karate_stats(), 1.0), DomainError);
  EXPECT_THROW(loglik_ilfr(karate_stats(), 0.0), DomainError);
}

TEST(Ilfr, EstimatorAtFloorWithoutCut) { EXPECT_NEAR(estimate_mu_ilfr(triangles_stats()), parameter_floor(6), 1e-6); }

TEST(Ilfr, EstimatorNearIlfrsWhenCommunitiesAreSmall) {
  LfrConfig c;
  c.n = 1000;
  c.mean_degree = 20;
  c.max_degree = 40;
  c.min_community = 40;
  c.max_community = 60;
  c.mixing = 0.3;
  c.seed = 4;
  auto b = generate(c);
  auto s = compute_stats(b.graph, b.partition);
  EXPECT_NEAR(estimate_mu_ilfr(s), s.cut_weight / s.total_weight, 0.05);
}

TEST(Ilfrs, Examples) {
  EXPECT_NEAR(loglik_ilfrs(karate_stats(), 0.128), -176, 0.5);
  EXPECT_NEAR(estimate_mu_ilfrs(karate_stats()), 0.128, 0.0005);
  EXPECT_DOUBLE_EQ(estimate_mu_ilfrs(triangles_stats()), parameter_floor(6));
  Graph g = oracle::karate();
  auto s = compute_stats(g, Partition::singletons(34));
  const double mu = 0.3;
  EXPECT_NEAR(loglik_ilfrs(s, mu), 78 * std::log(mu) - 78 * std::log(156.0) + s.degree_log_sum - 78, 1e-9);
}

TEST(Nonparametric, Examples) {
  EXPECT_NEAR(loglik_ilfrs_nonparametric(karate_stats()), -176, 0.5);
  EXPECT_NEAR(loglik_ppm_nonparametric(karate_stats()), -206.12, 0.005);
  EXPECT_NEAR(loglik_ilfrs_nonparametric(triangles_stats()), -6 * std::log(6.0) + 12 * std::log(2.0) - 6, 1e-12);
  Graph g = oracle::karate();
  EXPECT_THROW(loglik_ppm_nonparametric(compute_stats(g, Partition::singletons(34))), DegeneratePartitionError);
  EXPECT_THROW(loglik_dcppm_nonparametric(compute_stats(g, Partition::single_community(34))),
               DegeneratePartitionError);
}

TEST(Nonparametric, MatchesComposition) {
  std::mt19937_64 rng(17);
  int ppm_checked = 0, dcppm_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 20;
    Graph g = oracle::random_graph(n, 0.3, rng);
    auto s = compute_stats(g, oracle::random_partition(n, 2 + rng() % 4, rng));
    if (s.cut_weight > 0 && s.intra_weight > 0) {
      auto [a, b] = estimate_ppm(s);
      if (a < 1 && b < 1) {
        EXPECT_TRUE(rel_close(loglik_ppm_nonparametric(s), loglik_ppm(s, a, b)));
        ++ppm_checked;
      }
      auto [c, d] = estimate_dcppm(s);
      EXPECT_TRUE(rel_close(loglik_dcppm_nonparametric(s), loglik_dcppm(s, c, d)));
      ++dcppm_checked;
      EXPECT_TRUE(rel_close(loglik_ilfrs_nonparametric(s), loglik_ilfrs(s, estimate_mu_ilfrs(s))));
    }
  }
  EXPECT_GT(ppm_checked, 50);
  EXPECT_GT(dcppm_checked, 50);
}

TEST(Likelihoods, MatchPairwisePoissonSums) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 10;
    Graph g = oracle::random_graph(n, 0.4, rng);
    Partition p = oracle::random_partition(n, 1 + rng() % 4, rng);
    auto s = compute_stats(g, p);
    const double a = 0.05 + 0.9 * std::uniform_real_distribution<>()(rng);
    const double b = 0.05 + 0.9 * std::uniform_real_distribution<>()(rng);
    EXPECT_TRUE(rel_close(loglik_ppm(s, a, b), oracle::ppm_pairwise(g, p, a, b)));
    EXPECT_TRUE(rel_close(loglik_dcppm(s, 3 * a, b), oracle::dcppm_pairwise(g, p, 3 * a, b)));
    EXPECT_TRUE(rel_close(loglik_ilfr(s, a), oracle::ilfr_pairwise(g, p, a)));
  }
}

TEST(Likelihoods, ConstantTermsArePartitionIndependent) {
  Graph g = oracle::karate();
  std::mt19937_64 rng(2);
  const double first = compute_stats(g, Partition::singletons(34)).degree_log_sum;
  double direct = 0;
  for (Vertex v = 0; v < 34; ++v) direct += g.degree(v) * std::log(g.degree(v));
  EXPECT_NEAR(first, direct, 1e-9);
  for (int i = 0; i < 20; ++i) {
    auto s = compute_stats(g, oracle::random_partition(34, 6, rng));
    EXPECT_DOUBLE_EQ(s.degree_log_sum, first);
    EXPECT_DOUBLE_EQ(s.total_weight, 78.0);
  }
}

TEST(Properties, EstimatorsMaximizeOverGrid) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 12;
    Graph g = oracle::random_graph(n, 0.35, rng);
    auto s = compute_stats(g, oracle::random_partition(n, 2 + rng() % 3, rng));
    if (!(s.intra_pairs > 0 && s.inter_pairs > 0 && s.intra_weight > 0 && s.cut_weight > 0)) continue;
    const double lo = parameter_floor(s.total_weight);
    auto [pa, pb] = estimate_ppm(s);
    auto [da, db] = estimate_dcppm(s);
    const double best_ppm = loglik_ppm(s, pa, pb), best_dcppm = loglik_dcppm(s, da, db);
    const double mu_s = estimate_mu_ilfrs(s), best_ilfrs = loglik_ilfrs(s, mu_s);
    const double mu_f = estimate_mu_ilfr(s), best_ilfr = loglik_ilfr(s, mu_f);
    for (int i = 0; i <= 60; ++i) {
      const double x = lo + (1 - lo) * i / 60.0;
      for (int j = 0; j <= 60; ++j) {
        const double y = lo + (1 - lo) * j / 60.0;
        EXPECT_GE(best_ppm + 1e-9, loglik_ppm(s, x, y));
        EXPECT_GE(best_dcppm + 1e-9, loglik_dcppm(s, 5 * x, 5 * y));
      }
      const double mu = lo + (1 - 2 * lo) * i / 60.0;
      EXPECT_GE(best_ilfrs + 1e-9, loglik_ilfrs(s, mu));
    }
    for (int i = 0; i <= 2000; ++i) {
      const double mu = lo + (1 - 2 * lo) * i / 2000.0;
      EXPECT_GE(best_ilfr + 1e-6, loglik_ilfr(s, mu));
    }
  }
}

TEST(Properties, ModularityEquivalence) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 20;
    Graph g = oracle::random_graph(n, 0.3, rng);
    auto s1 = compute_stats(g, oracle::random_partition(n, 4, rng));
    auto s2 = compute_stats(g, oracle::random_partition(n, 4, rng));
    std::uniform_real_distribution<> u(0.05, 0.95);
    const double a = u(rng), b = u(rng);
    if (a == b) continue;
    const double m = s1.total_weight, log_ratio = std::log(a) - std::log(b);

    const double g1 = gamma_dcppm(a, b);
    const double lhs1 = loglik_dcppm(s1, a, b) - loglik_dcppm(s2, a, b);
    const double rhs1 = m * log_ratio * (modularity(s1, g1) - modularity(s2, g1));
    EXPECT_NEAR(lhs1, rhs1, 1e-9 * std::max(1.0, std::abs(lhs1)));

    const double g0 = gamma_ppm(a, b, m, s1.pairs);
    const double lhs0 = loglik_ppm(s1, a, b) - loglik_ppm(s2, a, b);
    const double rhs0 = m * log_ratio * (simple_modularity(s1, g0) - simple_modularity(s2, g0));
    EXPECT_NEAR(lhs0, rhs0, 1e-9 * std::max(1.0, std::abs(lhs0)));
  }
}

TEST(Properties, IlfrsApproximationBound) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 15;
    Graph g = oracle::random_graph(n, 0.4, rng);
    auto s = compute_stats(g, oracle::random_partition(n, 1 + rng() % 4, rng));
    const double mu = std::uniform_real_distribution<>(0.01, 0.99)(rng);
    double bound = 0;
    for (std::size_t c = 0; c < s.community_count(); ++c)
      if (s.community_degree[c] > 0)
        bound += s.community_intra_degree[c] / 2 * (mu * s.community_degree[c] / ((1 - mu) * 2 * s.total_weight));
    const double gap = std::abs(loglik_ilfr(s, mu) - loglik_ilfrs(s, mu));
    EXPECT_LE(gap, bound + 1e-9);
  }
}

TEST(ExpectedDegrees, IlfrPreservesDegreesExactly) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    Graph g = oracle::random_graph(n, 0.3, rng);
    Partition p = oracle::random_partition(n, 1 + rng() % 5, rng);
    const double mu = std::uniform_real_distribution<>(0.01, 0.99)(rng);
    auto e = expected_degrees(g, p, QualityModel::ilfr(mu));
    for (Vertex v = 0; v < n; ++v) EXPECT_NEAR(e[v], g.degree(v), 1e-12 * std::max(1.0, g.degree(v)));
  }
}

TEST(ExpectedDegrees, DcppmViolatesOnKarate) {
  Graph g = oracle::karate();
  Partition p = oracle::karate_truth(g);
  auto [a, b] = estimate_dcppm(compute_stats(g, p));
  auto e = expected_degrees(g, p, QualityModel::dcppm(a, b));
  double worst = 0;
  for (Vertex v = 0; v < 34; ++v) worst = std::max(worst, std::abs(e[v] - g.degree(v)));
  EXPECT_GT(worst, 0.1);
  auto same = expected_degrees(g, p, QualityModel::dcppm(1, 1));
  for (Vertex v = 0; v < 34; ++v) EXPECT_NEAR(same[v], g.degree(v), 1e-12);
}

TEST(ExpectedDegrees, DegreeCorrectedBlockRatesPreserveDegrees) {
  Graph g = oracle::karate();
  std::mt19937_64 rng(43);
  Partition p = oracle::random_partition(34, 4, rng);
  auto e = expected_degrees_dcsbm(g, p, dcsbm_degree_preserving_rates(compute_stats(g, p)));
  for (Vertex v = 0; v < 34; ++v) EXPECT_NEAR(e[v], g.degree(v), 1e-9);
}

TEST(ExpectedDegrees, UnsupportedKind) {
  Graph g = oracle::karate();
  EXPECT_THROW(expected_degrees(g, Partition::singletons(34), QualityModel::modularity(1)), DomainError);
  EXPECT_THROW(expected_degrees(g, Partition::singletons(34), QualityModel::ilfrs(0.5)), DomainError);
}

TEST(SampleNullModel, IlfrKeepsDegreesOnAverage) {
  Graph g = oracle::karate();
  Partition p = oracle::karate_truth(g);
  std::vector<double> d(g.degrees().begin(), g.degrees().end());
  const int samples = 10000;
  std::vector<double> sum(34, 0.0), sum_sq(34, 0.0);
  for (int i = 0; i < samples; ++i) {
    Graph h = sample_null_model(d, p, QualityModel::ilfr(0.128), 1000 + i);
    for (Vertex v = 0; v < 34; ++v) sum[v] += h.degree(v), sum_sq[v] += h.degree(v) * h.degree(v);
  }
  for (Vertex v = 0; v < 34; ++v) {
    const double mean = sum[v] / samples;
    const double var = sum_sq[v] / samples - mean * mean;
    EXPECT_LE(std::abs(mean - d[v]), 3 * std::sqrt(var / samples)) << "vertex " << v;
  }
}

TEST(SampleNullModel, PpmEdgeCount) {
  const std::size_t n = 30;
  const double p = 0.1, pairs = n * (n - 1) / 2.0;
  std::vector<double> d(n, 1.0);
  std::mt19937_64 rng(5);
  Partition part = oracle::random_partition(n, 3, rng);
  const int samples = 2000;
  double sum = 0;
  for (int i = 0; i < samples; ++i) sum += sample_null_model(d, part, QualityModel::ppm(p, p), i).total_weight();
  EXPECT_LE(std::abs(sum / samples - pairs * p), 3 * std::sqrt(pairs * p / samples));
}

TEST(SampleNullModel, VanishingCutAtFloor) {
  Graph g = oracle::two_triangles();
  std::vector<double> d(g.degrees().begin(), g.degrees().end());
  double cut = 0;
  for (int i = 0; i < 200; ++i) {
    Graph h = sample_null_model(d, oracle::triangle_split(), QualityModel::ilfr(parameter_floor(6)), i);
    for (const auto& e : h.edges())
      if ((e.u < 3) != (e.v < 3)) cut += e.weight;
  }
  // 9 inter pairs at rate mu * 2 * 2 / 12 each: 0.125 expected cut edges.
  EXPECT_LT(cut / 200, 0.5);
}
