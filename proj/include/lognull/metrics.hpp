#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"

namespace lognull {

/// Pair counts and contingency table of two partitions of the same vertex set.
/// n11: together in both; n10: together in the first only; n01: together in
/// the second only; n00: apart in both.
struct ConfusionCounts {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  std::vector<double> sizes_a;
  std::vector<double> sizes_b;
  std::map<std::pair<Community, Community>, double> table;

  double total_pairs() const { return n11 + n10 + n01 + n00; }
};

inline ConfusionCounts confusion(const Partition& a, const Partition& b) {
  if (a.vertex_count() != b.vertex_count()) throw DomainError("partitions cover different vertex sets");
  ConfusionCounts c;
  c.sizes_a.assign(a.community_count(), 0.0);
  c.sizes_b.assign(b.community_count(), 0.0);
  for (Vertex v = 0; v < a.vertex_count(); ++v) {
    ++c.sizes_a[a[v]];
    ++c.sizes_b[b[v]];
    ++c.table[{a[v], b[v]}];
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double same_a = 0, same_b = 0;
  for (double x : c.sizes_a) same_a += pairs(x);
  for (double x : c.sizes_b) same_b += pairs(x);
  for (const auto& [key, count] : c.table) c.n11 += pairs(count);
  c.n10 = same_a - c.n11;
  c.n01 = same_b - c.n11;
  c.n00 = pairs(static_cast<double>(a.vertex_count())) - c.n11 - c.n10 - c.n01;
  return c;
}

/// 2 I(A, B) / (H(A) + H(B)); 1 when both entropies vanish.
inline double nmi(const Partition& a, const Partition& b) {
  const ConfusionCounts c = confusion(a, b);
  const double n = static_cast<double>(a.vertex_count());
  if (n == 0) return 1.0;
  auto entropy = [n](const std::vector<double>& sizes) {
    double h = 0;
    for (double x : sizes)
      if (x > 0) h -= x / n * std::log(x / n);
    return h;
  };
  const double ha = entropy(c.sizes_a), hb = entropy(c.sizes_b);
  if (ha + hb == 0.0) return 1.0;
  double mutual = 0;
  for (const auto& [key, count] : c.table)
    mutual += count / n * std::log(count * n / (c.sizes_a[key.first] * c.sizes_b[key.second]));
  return std::clamp(2.0 * mutual / (ha + hb), 0.0, 1.0);
}

/// Fraction of vertex pairs classified the same way by both partitions.
inline double rand_index(const Partition& a, const Partition& b) {
  const ConfusionCounts c = confusion(a, b);
  const double total = c.total_pairs();
  return total > 0 ? (c.n11 + c.n00) / total : 1.0;
}

/// Pairs together in both partitions over pairs together in at least one.
inline double jaccard_index(const Partition& a, const Partition& b) {
  const ConfusionCounts c = confusion(a, b);
  const double denom = c.n11 + c.n10 + c.n01;
  return denom > 0 ? c.n11 / denom : 1.0;
}

}  // namespace lognull
