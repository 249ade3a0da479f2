#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace lognull;

namespace {

double full_quality(const Graph& g, const QualityModel& model, std::vector<Community> assignment) {
  return evaluate(model, compute_stats(g, Partition(std::move(assignment))));
}

std::vector<Community> assignment_of(const LouvainState& s) {
  std::vector<Community> a(s.graph().vertex_count());
  for (Vertex v = 0; v < a.size(); ++v) a[v] = s.community_of(v);
  return a;
}

QualityModel random_model(ModelKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<> u(0.05, 0.95);
  switch (kind) {
    case ModelKind::SimpleModularity: return QualityModel::simple_modularity(4 * u(rng));
    case ModelKind::Modularity: return QualityModel::modularity(4 * u(rng));
    case ModelKind::PPM: return QualityModel::ppm(u(rng), u(rng));
    case ModelKind::DCPPM: return QualityModel::dcppm(3 * u(rng), u(rng));
    case ModelKind::ILFR: return QualityModel::ilfr(u(rng));
    case ModelKind::ILFRS: return QualityModel::ilfrs(u(rng));
  }
  return {};
}

}  // namespace

TEST(MoveGain, OwnCommunityIsZero) {
  Graph g = oracle::karate();
  LouvainState s(g, QualityModel::ilfr(0.3), oracle::karate_truth(g));
  for (Vertex v = 0; v < 34; ++v) EXPECT_EQ(s.move_gain(v, s.community_of(v)), 0.0);
}

TEST(MoveGain, TwoTrianglesIlfrs) {
  Graph g = oracle::two_triangles();
  const auto model = QualityModel::ilfrs(0.3);
  LouvainState s(g, model);
  const double expected = full_quality(g, model, {1, 1, 2, 3, 4, 5}) - full_quality(g, model, {0, 1, 2, 3, 4, 5});
  EXPECT_NEAR(s.move_gain(0, s.community_of(1)), expected, 1e-12);
}

TEST(MoveGain, KarateBestFirstMove) {
  Graph g = oracle::karate();
  const auto model = QualityModel::modularity(1.0);
  LouvainState s(g, model);
  double best = -1e300;
  Vertex bv = 0;
  Community bc = 0;
  for (Vertex v = 0; v < 34; ++v)
    for (const auto& nb : g.neighbors(v)) {
      const double gain = s.move_gain(v, s.community_of(nb.vertex));
      if (gain > best) best = gain, bv = v, bc = s.community_of(nb.vertex);
    }
  auto after = assignment_of(s);
  after[bv] = bc;
  EXPECT_NEAR(best, full_quality(g, model, after) - s.quality(), 1e-12);
}

TEST(MoveGain, UnknownCommunity) {
  Graph g = oracle::two_triangles();
  LouvainState s(g, QualityModel::modularity(1.0));
  EXPECT_THROW(s.move_gain(0, 6), DomainError);
  EXPECT_THROW(s.move(0, 99), DomainError);
  EXPECT_THROW(s.move_gain(6, 0), DomainError);
}

TEST(MoveGain, ConsistentWithFullEvaluation) {
  std::mt19937_64 rng(101);
  for (ModelKind kind : kAllModelKinds) {
    int checked = 0;
    for (int trial = 0; checked < 1000; ++trial) {
      const std::size_t n = 3 + rng() % 10;
      Graph base = oracle::random_graph(n, 0.4, rng);
      // Half of the instances run on a contracted graph with loops and sizes.
      Graph g = trial % 2 ? contract(base, oracle::random_partition(n, n - 1, rng)) : base;
      const auto model = random_model(kind, rng);
      LouvainState s(g, model, oracle::random_partition(g.vertex_count(), 4, rng));
      for (int step = 0; step < 10; ++step, ++checked) {
        const Vertex v = rng() % g.vertex_count();
        const Community target = rng() % s.community_slots();
        auto after = assignment_of(s);
        after[v] = target;
        const double before_q = full_quality(g, model, assignment_of(s));
        const double expected = full_quality(g, model, after) - before_q;
        const double gain = s.move_gain(v, target);
        EXPECT_NEAR(gain, expected, 1e-8 * std::max({1.0, std::abs(expected), std::abs(before_q) * 1e-3}))
            << to_string(kind) << " trial " << trial;
        if (rng() % 2) s.move(v, target);
      }
    }
  }
}

TEST(LouvainState, CachedAggregatesAndGainSums) {
  std::mt19937_64 rng(7);
  for (ModelKind kind : kAllModelKinds) {
    Graph g = oracle::random_graph(12, 0.35, rng);
    const auto model = random_model(kind, rng);
    LouvainState s(g, model);
    const double start = s.quality();
    double total = 0;
    for (int step = 0; step < 200; ++step) {
      const Vertex v = rng() % 12;
      const Community c = rng() % 12;
      total += s.move_gain(v, c);
      s.move(v, c);
      auto cached = s.cached_stats();
      auto fresh = compute_stats(g, s.partition());
      ASSERT_NEAR(cached.intra_weight, fresh.intra_weight, 1e-12);
      ASSERT_NEAR(cached.intra_pairs, fresh.intra_pairs, 1e-12);
      ASSERT_NEAR(cached.squared_degree_sum, fresh.squared_degree_sum, 1e-9);
      ASSERT_EQ(cached.community_degree, fresh.community_degree);
      ASSERT_EQ(cached.community_intra_degree, fresh.community_intra_degree);
    }
    EXPECT_NEAR(s.quality() - start, total, 1e-6);
  }
}

TEST(Louvain, TwoTrianglesModularity) {
  Graph g = oracle::two_triangles();
  double best = -1e300;
  oracle::for_each_partition(6, [&](const Partition& p) { best = std::max(best, modularity(compute_stats(g, p), 1.0)); });
  EXPECT_NEAR(best, 0.5, 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto r = run_louvain(g, QualityModel::modularity(1.0), seed);
    EXPECT_EQ(r.partition, oracle::triangle_split());
    EXPECT_NEAR(r.quality, 0.5, 1e-12);
  }
}

TEST(Louvain, KarateModularity) {
  Graph g = oracle::karate();
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) sum += run_louvain(g, QualityModel::modularity(1.0), seed).quality;
  EXPECT_NEAR(sum / 10, 0.4188, 0.003);
}

TEST(Louvain, SingleEdge) {
  Graph g = Graph::from_edges(2, {{0, 1, 1}});
  EXPECT_EQ(louvain(g, QualityModel::modularity(1.0), 3).community_count(), 1u);
}

TEST(Louvain, LevelsImproveAndFlattenExactly) {
  std::mt19937_64 rng(13);
  for (ModelKind kind : kAllModelKinds)
    for (int trial = 0; trial < 10; ++trial) {
      Graph g = oracle::random_graph(40, 0.1, rng);
      const auto model = random_model(kind, rng);
      auto r = run_louvain(g, model, trial);
      const double start = evaluate(model, compute_stats(g, Partition::singletons(40)));
      double prev = start;
      for (double q : r.level_quality) {
        EXPECT_GE(q, prev - 1e-9);
        prev = q;
      }
      if (!r.level_quality.empty()) EXPECT_NEAR(r.quality, r.level_quality.back(), 1e-6 * std::max(1.0, std::abs(r.quality)));
    }
}

TEST(Louvain, Deterministic) {
  Graph g = oracle::karate();
  for (ModelKind kind : kAllModelKinds) {
    std::mt19937_64 rng(1);
    const auto model = random_model(kind, rng);
    EXPECT_EQ(louvain(g, model, 42), louvain(g, model, 42));
  }
}

TEST(Louvain, NeverBeatsExhaustiveOptimum) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = oracle::random_graph(7, 0.45, rng);
    const auto model = random_model(kAllModelKinds[trial % kAllModelKinds.size()], rng);
    double best = -1e300;
    oracle::for_each_partition(7, [&](const Partition& p) { best = std::max(best, evaluate(model, compute_stats(g, p))); });
    EXPECT_LE(run_louvain(g, model, trial).quality, best + 1e-9);
  }
}
