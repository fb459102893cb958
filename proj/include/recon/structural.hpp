#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "recon/errors.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

enum class AssignMode { argmax, sample };

/// Structural refinement: combined score alpha * N-Score + (1 - alpha) * C-Score,
/// softmax with temperature, then argmax or a categorical draw.
struct StructuralConfig {
  double alpha = 0.9;
  double softmax_temp = 0.1;
  AssignMode mode = AssignMode::argmax;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
    if (!(softmax_temp > 0.0)) throw InvalidArgument("softmax_temp must be > 0");
  }
};

struct ScoreTable {
  Eigen::MatrixXd n_scores;  ///< n x K, entries in [-1, 1]
  Eigen::MatrixXd c_scores;  ///< n x K
  Eigen::MatrixXd probs;     ///< n x K, rows sum to 1
};

/// (1 / d_v) * sum of s_vj over neighbors j currently assigned to k; 0 for an
/// isolated node.
inline double n_score(const SignedGraph& g, const Partition& p, NodeId v, CommunityId k) {
  g.check_node(v);
  check_covers(g, p);
  if (k >= p.num_communities()) {
    throw InvalidArgument("community id " + std::to_string(k) + " out of range");
  }
  const auto adj = g.neighbors(v);
  if (adj.empty()) return 0.0;
  int sum = 0;
  for (const Neighbor& nb : adj) {
    if (p[nb.node] == k) sum += nb.sign;
  }
  return static_cast<double>(sum) / static_cast<double>(adj.size());
}

/// All N-Scores at once: n x K.
inline Eigen::MatrixXd n_score_table(const SignedGraph& g, const Partition& p) {
  check_covers(g, p);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(p.num_communities()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto adj = g.neighbors(v);
    if (adj.empty()) continue;
    for (const Neighbor& nb : adj) table(v, p[nb.node]) += nb.sign;
    table.row(v) /= static_cast<double>(adj.size());
  }
  return table;
}

/// Mean member embedding per community, L2-normalized; empty or zero-mean
/// communities give a zero row.
inline Eigen::MatrixXd centroids(const Eigen::MatrixXd& emb, const Partition& p) {
  if (static_cast<std::size_t>(emb.rows()) != p.size()) {
    throw InvalidArgument("centroids: embedding rows != partition size");
  }
  const auto k = static_cast<Eigen::Index>(p.num_communities());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, emb.cols());
  std::vector<double> counts(p.num_communities(), 0.0);
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    c.row(p[static_cast<std::size_t>(i)]) += emb.row(i);
    counts[p[static_cast<std::size_t>(i)]] += 1.0;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] == 0.0) continue;
    c.row(j) /= counts[static_cast<std::size_t>(j)];
    const double norm = c.row(j).norm();
    if (norm > 1e-12) {
      c.row(j) /= norm;
    } else {
      c.row(j).setZero();
    }
  }
  return c;
}

inline double c_score(const Eigen::MatrixXd& emb, const Eigen::MatrixXd& cents, NodeId v,
                      CommunityId k) {
  if (emb.cols() != cents.cols()) {
    throw InvalidArgument("c_score: embedding width " + std::to_string(emb.cols()) +
                          " != centroid width " + std::to_string(cents.cols()));
  }
  if (v >= emb.rows() || k >= cents.rows()) throw InvalidArgument("c_score: index out of range");
  return cents.row(k).dot(emb.row(v));
}

/// Numerically stable softmax of `scores / temp`.
inline Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& scores, double temp) {
  const double top = scores.maxCoeff();
  Eigen::RowVectorXd e = ((scores.array() - top) / temp).exp().matrix();
  return e / e.sum();
}

/// Index of the maximum, lowest index on ties.
inline CommunityId argmax_lowest(const Eigen::RowVectorXd& row) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    if (row(j) > row(best)) best = j;
  }
  return static_cast<CommunityId>(best);
}

/// Synchronous update: every node's scores come from the old partition.
inline std::pair<Partition, ScoreTable> refine_structural(const SignedGraph& g, const Partition& p,
                                                          const Eigen::MatrixXd& emb,
                                                          const StructuralConfig& cfg) {
  cfg.validate();
  check_covers(g, p);
  if (static_cast<std::size_t>(emb.rows()) != g.num_nodes()) {
    throw InvalidArgument("refine_structural: embedding has " + std::to_string(emb.rows()) +
                          " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  ScoreTable t;
  t.n_scores = n_score_table(g, p);
  t.c_scores = emb * centroids(emb, p).transpose();
  const Eigen::MatrixXd combined = cfg.alpha * t.n_scores + (1.0 - cfg.alpha) * t.c_scores;
  t.probs.resize(combined.rows(), combined.cols());

  std::vector<CommunityId> next(g.num_nodes());
  Rng rng(derive_seed(cfg.rng_seed, {0x73747275637475ULL}));
  for (Eigen::Index v = 0; v < combined.rows(); ++v) {
    t.probs.row(v) = softmax(combined.row(v), cfg.softmax_temp);
    if (cfg.mode == AssignMode::argmax) {
      next[static_cast<std::size_t>(v)] = argmax_lowest(combined.row(v));
    } else {
      double r = rng.uniform();
      Eigen::Index pick = combined.cols() - 1;
      for (Eigen::Index j = 0; j < combined.cols(); ++j) {
        r -= t.probs(v, j);
        if (r < 0.0) {
          pick = j;
          break;
        }
      }
      next[static_cast<std::size_t>(v)] = static_cast<CommunityId>(pick);
    }
  }
  return {Partition(std::move(next), p.num_communities()), std::move(t)};
}

}  // namespace recon
