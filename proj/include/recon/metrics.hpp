#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recon/errors.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

/// Adjusted Rand index from the contingency table. Returns 1 when the
/// chance-corrected denominator vanishes (both partitions trivial and equal).
inline double ari(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("ari: partitions cover " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " nodes");
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<CommunityId, CommunityId>, double> table;
  std::vector<double> rows(a.num_communities(), 0.0);
  std::vector<double> cols(b.num_communities(), 0.0);
  for (std::size_t v = 0; v < a.size(); ++v) {
    table[{a[v], b[v]}] += 1.0;
    rows[a[v]] += 1.0;
    cols[b[v]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : table) index += choose2(count);
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (double r : rows) sum_a += choose2(r);
  for (double c : cols) sum_b += choose2(c);
  const double total = choose2(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

enum class ModularityVariant {
  positive,  ///< Newman Q on the positive-edge subgraph
  signed_difference,  ///< Q+ - Q- (Q- is 0 without negative edges)
};

namespace detail {

inline std::optional<double> newman_q(const SignedGraph& g, const Partition& p, int sign) {
  double m = 0.0;
  std::vector<double> intra(p.num_communities(), 0.0);
  std::vector<double> degree(p.num_communities(), 0.0);
  for (const Edge& e : g.edges()) {
    if (e.sign != sign) continue;
    m += 1.0;
    degree[p[e.u]] += 1.0;
    degree[p[e.v]] += 1.0;
    if (p[e.u] == p[e.v]) intra[p[e.u]] += 1.0;
  }
  if (m == 0.0) return std::nullopt;
  double q = 0.0;
  for (std::size_t k = 0; k < p.num_communities(); ++k) {
    const double frac = degree[k] / (2.0 * m);
    q += intra[k] / m - frac * frac;
  }
  return q;
}

}  // namespace detail

/// Throws UndefinedMetric when the graph has no positive edge.
inline double modularity(const SignedGraph& g, const Partition& p,
                         ModularityVariant variant = ModularityVariant::positive) {
  check_covers(g, p);
  auto q_pos = detail::newman_q(g, p, 1);
  if (!q_pos) throw UndefinedMetric("modularity undefined: graph has no positive edges");
  if (variant == ModularityVariant::positive) return *q_pos;
  return *q_pos - detail::newman_q(g, p, -1).value_or(0.0);
}

/// Fraction of edges that violate community consistency under p and were not
/// flagged as noise by the generator.
inline double misaligned_ratio(const SignedGraph& g, const Partition& p,
                               const std::vector<bool>& noise_flags) {
  check_covers(g, p);
  if (noise_flags.size() != g.num_edges()) {
    throw InvalidArgument("misaligned_ratio: " + std::to_string(noise_flags.size()) +
                          " flags for " + std::to_string(g.num_edges()) + " edges");
  }
  if (g.num_edges() == 0) return 0.0;
  std::size_t count = 0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (!noise_flags[e] && violates(g.edges()[e], p)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(g.num_edges());
}

/// Per-seed values of one metric with mean and sample standard deviation
/// (n - 1 denominator; 0 for a single value).
struct MetricSummary {
  std::vector<double> values;

  double mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }

  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double mu = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
  }

  bool empty() const { return values.empty(); }
};

struct MetricReport {
  MetricSummary ari;
  MetricSummary modularity;
  MetricSummary misaligned_ratio;
};

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman: need equal sizes >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Relative gain in percent, (refined - initial) / initial * 100; empty when
/// the initial value is zero.
inline std::optional<double> gain_percent(double initial, double refined) {
  if (initial == 0.0) return std::nullopt;
  return (refined - initial) / initial * 100.0;
}

}  // namespace recon
