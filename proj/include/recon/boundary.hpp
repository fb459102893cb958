#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "recon/errors.hpp"
#include "recon/signed_graph.hpp"
#include "recon/structural.hpp"

namespace recon {

struct BoundaryConfig {
  /// Triangle-free nodes whose violating-edge fraction reaches this become
  /// candidates.
  double purge_threshold = 0.5;
  /// Upper bound on candidates as a fraction of |V|. Triangle candidates are
  /// kept first, then likelihood candidates by decreasing likelihood.
  double max_candidates_fraction = 1.0;

  void validate() const {
    if (!(purge_threshold >= 0.0 && purge_threshold <= 1.0)) {
      throw InvalidArgument("purge_threshold must lie in [0, 1]");
    }
    if (!(max_candidates_fraction > 0.0 && max_candidates_fraction <= 1.0)) {
      throw InvalidArgument("max_candidates_fraction must lie in (0, 1]");
    }
  }
};

enum class PurgeReason { triangle, likelihood };

inline const char* to_string(PurgeReason r) {
  return r == PurgeReason::triangle ? "triangle" : "likelihood";
}

struct Reassignment {
  NodeId node = 0;
  CommunityId old_community = 0;
  CommunityId new_community = 0;
  std::size_t gain = 0;  ///< (+++)-triangles v completes in its new community
  PurgeReason reason = PurgeReason::triangle;
};

struct PurgeReport {
  std::vector<NodeId> triangle_candidates;
  std::vector<std::pair<NodeId, double>> likelihood_candidates;
  std::vector<Reassignment> reassignments;  ///< one entry per processed candidate
};

/// Nodes that are the shared endpoint of both negative edges of an intra-
/// community (+,-,-) triangle. Sorted ascending.
inline std::vector<NodeId> triangle_purge_candidates(const SignedGraph& g, const Partition& p) {
  check_covers(g, p);
  std::vector<bool> flagged(g.num_nodes(), false);
  for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c, int ab, int ac, int bc) {
    if (p[a] != p[b] || p[a] != p[c]) return;
    if (ab + ac + bc != -1) return;  // exactly one positive edge
    if (ab > 0) {
      flagged[c] = true;
    } else if (ac > 0) {
      flagged[b] = true;
    } else {
      flagged[a] = true;
    }
  });
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (flagged[v]) out.push_back(v);
  }
  return out;
}

/// Fraction of v's incident edges that are negative-intra or positive-inter.
inline double purge_likelihood(const SignedGraph& g, const Partition& p, NodeId v) {
  check_covers(g, p);
  const auto adj = g.neighbors(v);
  if (adj.empty()) return 0.0;
  std::size_t bad = 0;
  for (const Neighbor& nb : adj) {
    const bool intra = p[nb.node] == p[v];
    if (intra ? nb.sign < 0 : nb.sign > 0) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(adj.size());
}

/// Number of (+,+,+) triangles through v whose other two nodes lie in k, i.e.
/// the all-positive triangles inside k that v would complete if moved there.
inline std::size_t plus_triangle_gain(const SignedGraph& g, const Partition& p, NodeId v,
                                      CommunityId k) {
  check_covers(g, p);
  if (k >= p.num_communities()) throw InvalidArgument("community id out of range");
  std::vector<NodeId> members;
  for (const Neighbor& nb : g.neighbors(v)) {
    if (nb.sign > 0 && p[nb.node] == k) members.push_back(nb.node);
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    // positive neighbors of members[i] with a larger id that are also in `members`
    auto adj = g.neighbors(members[i]);
    auto it = adj.begin();
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      it = std::lower_bound(it, adj.end(), members[j],
                            [](const Neighbor& nb, NodeId x) { return nb.node < x; });
      if (it == adj.end()) break;
      if (it->node == members[j] && it->sign > 0) ++count;
    }
  }
  return count;
}

/// Nodes that lie on at least one triangle (any signs, any communities).
inline std::vector<bool> triangle_membership(const SignedGraph& g) {
  std::vector<bool> in(g.num_nodes(), false);
  for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c, int, int, int) {
    in[a] = in[b] = in[c] = true;
  });
  return in;
}

/// Boundary refinement. Candidates are processed in ascending id against the
/// evolving partition; each goes to the community with the largest (+++) gain,
/// ties by larger N-Score, then lower id. The current community is eligible,
/// so a candidate stays put when it already ranks first.
inline std::pair<Partition, PurgeReport> refine_boundary(const SignedGraph& g, const Partition& p,
                                                         const BoundaryConfig& cfg = {}) {
  cfg.validate();
  check_covers(g, p);
  PurgeReport report;
  report.triangle_candidates = triangle_purge_candidates(g, p);

  const auto on_triangle = triangle_membership(g);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (on_triangle[v]) continue;
    const double lik = purge_likelihood(g, p, v);
    if (lik >= cfg.purge_threshold) report.likelihood_candidates.emplace_back(v, lik);
  }

  const auto cap = static_cast<std::size_t>(
      std::ceil(cfg.max_candidates_fraction * static_cast<double>(g.num_nodes())));
  if (report.triangle_candidates.size() + report.likelihood_candidates.size() > cap) {
    if (report.triangle_candidates.size() > cap) report.triangle_candidates.resize(cap);
    const std::size_t room = cap - report.triangle_candidates.size();
    std::stable_sort(report.likelihood_candidates.begin(), report.likelihood_candidates.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    report.likelihood_candidates.resize(std::min(room, report.likelihood_candidates.size()));
    std::sort(report.likelihood_candidates.begin(), report.likelihood_candidates.end());
  }

  std::vector<std::pair<NodeId, PurgeReason>> queue;
  for (auto v : report.triangle_candidates) queue.emplace_back(v, PurgeReason::triangle);
  for (const auto& [v, lik] : report.likelihood_candidates) {
    queue.emplace_back(v, PurgeReason::likelihood);
  }
  std::sort(queue.begin(), queue.end());

  std::vector<CommunityId> labels = p.assignment();
  const std::size_t k_count = p.num_communities();
  for (const auto& [v, reason] : queue) {
    Partition current(labels, k_count);
    const CommunityId old = labels[v];
    CommunityId best = 0;
    std::size_t best_gain = plus_triangle_gain(g, current, v, 0);
    double best_score = n_score(g, current, v, 0);
    for (CommunityId k = 1; k < k_count; ++k) {
      const std::size_t gain = plus_triangle_gain(g, current, v, k);
      const double score = n_score(g, current, v, k);
      if (gain > best_gain || (gain == best_gain && score > best_score)) {
        best = k;
        best_gain = gain;
        best_score = score;
      }
    }
    labels[v] = best;
    report.reassignments.push_back({v, old, best, best_gain, reason});
  }
  return {Partition(std::move(labels), k_count), std::move(report)};
}

/// Total number of (+,+,+) triangles whose three nodes share a community.
inline std::size_t intra_plus_triangles(const SignedGraph& g, const Partition& p) {
  check_covers(g, p);
  std::size_t count = 0;
  for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c, int ab, int ac, int bc) {
    if (ab > 0 && ac > 0 && bc > 0 && p[a] == p[b] && p[a] == p[c]) ++count;
  });
  return count;
}

}  // namespace recon
