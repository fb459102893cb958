#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "recon/boundary.hpp"
#include "recon/contrastive.hpp"
#include "recon/errors.hpp"
#include "recon/kmeans.hpp"
#include "recon/metrics.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"
#include "recon/spectral.hpp"
#include "recon/structural.hpp"

namespace recon {

enum class Convergence { fixed_rounds, assignment_stable };

struct RefineConfig {
  StructuralConfig structural;
  BoundaryConfig boundary;
  ContrastiveConfig contrastive;
  KmeansConfig kmeans;  ///< k is overwritten with the initial partition's K
  SpectralConfig spectral;
  std::size_t max_rounds = 3;
  Convergence convergence = Convergence::assignment_stable;
  bool enable_sr = true;
  bool enable_br = true;
  bool enable_cl = true;
  /// Width floor for spectral input features: f = max(K, min_feature_dim).
  std::size_t min_feature_dim = 8;
  ModularityVariant modularity = ModularityVariant::positive;

  void validate() const {
    if (max_rounds < 1) throw InvalidArgument("max_rounds must be >= 1");
    if (!enable_sr && !enable_br && !enable_cl) {
      throw InvalidArgument("at least one of enable_sr, enable_br, enable_cl must be set");
    }
    structural.validate();
    boundary.validate();
    contrastive.validate();
    KmeansConfig kc = kmeans;
    kc.k = 1;
    kc.validate();
  }
};

/// Same configuration with every stochastic component re-seeded from `run_seed`.
inline RefineConfig with_run_seed(RefineConfig cfg, std::uint64_t run_seed) {
  cfg.structural.rng_seed = derive_seed(cfg.structural.rng_seed, {run_seed});
  cfg.contrastive.rng_seed = derive_seed(cfg.contrastive.rng_seed, {run_seed});
  cfg.kmeans.seed = derive_seed(cfg.kmeans.seed, {run_seed});
  return cfg;
}

struct RoundRecord {
  std::size_t round = 0;
  Partition partition;
  std::vector<double> loss_trace;
  std::size_t purge_candidates = 0;
  std::size_t boundary_moves = 0;
  std::optional<PurgeReport> boundary;  ///< set when boundary refinement ran
  std::optional<double> ari;
  std::optional<double> modularity;
  double seconds = 0.0;
};

struct RefineTrace {
  std::vector<RoundRecord> rounds;
};

struct RefineResult {
  Partition partition;
  Eigen::MatrixXd embeddings;
  RefineTrace trace;
};

namespace detail {

template <typename Fn>
auto annotate(std::size_t round, const char* stage, Fn&& fn) -> decltype(fn()) {
  const std::string where = "round " + std::to_string(round) + ", " + stage + ": ";
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  } catch (const NumericError& e) {
    throw NumericError(where + e.what());
  }
}

}  // namespace detail

/// Iterates S1 structural, S2 boundary, S3 contrastive and S4 k-means from
/// `initial`. K stays fixed. Round 1's S1 uses the spectral embedding
/// (d = K); later rounds use the previous round's contrastive embedding. When
/// S3 is disabled, S4 is skipped and the S2 output is the round result.
inline RefineResult refine(const SignedGraph& g, const Partition& initial, const RefineConfig& cfg,
                           const Partition* ground_truth = nullptr) {
  cfg.validate();
  check_covers(g, initial);
  if (ground_truth) check_covers(g, *ground_truth);
  const std::size_t k = initial.num_communities();
  const std::size_t n = g.num_nodes();
  if (k > n) throw InvalidArgument("refine: K exceeds node count");

  // Both spectral inputs come from one decomposition: columns [0, K) for S1
  // and [0, f) for contrastive features.
  const std::size_t feat_dim = std::min(n, std::max(k, cfg.min_feature_dim));
  const Eigenpairs eig = smallest_eigenpairs(g, std::max(k, feat_dim), cfg.spectral);
  const Eigen::MatrixXd features =
      normalize_rows(eig.vectors.leftCols(static_cast<Eigen::Index>(feat_dim)));
  Eigen::MatrixXd embedding = normalize_rows(eig.vectors.leftCols(static_cast<Eigen::Index>(k)));

  RefineResult res;
  Partition current = initial;
  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    const auto start = std::chrono::steady_clock::now();
    RoundRecord rec;
    rec.round = round;

    if (cfg.enable_sr) {
      StructuralConfig sc = cfg.structural;
      sc.rng_seed = derive_seed(sc.rng_seed, {round});
      current = detail::annotate(round, "structural refinement", [&] {
        return refine_structural(g, current, embedding, sc).first;
      });
    }
    if (cfg.enable_br) {
      auto [next, report] = detail::annotate(round, "boundary refinement", [&] {
        return refine_boundary(g, current, cfg.boundary);
      });
      rec.purge_candidates = report.reassignments.size();
      rec.boundary_moves = static_cast<std::size_t>(
          std::count_if(report.reassignments.begin(), report.reassignments.end(),
                        [](const Reassignment& r) { return r.old_community != r.new_community; }));
      rec.boundary = std::move(report);
      current = std::move(next);
    }
    if (cfg.enable_cl) {
      ContrastiveConfig cc = cfg.contrastive;
      cc.rng_seed = derive_seed(cc.rng_seed, {round});
      TrainResult trained = detail::annotate(round, "contrastive learning", [&] {
        return train(g, current, features, cc);
      });
      rec.loss_trace = std::move(trained.loss_trace);
      embedding = std::move(trained.z);

      KmeansConfig kc = cfg.kmeans;
      kc.k = k;
      kc.seed = derive_seed(kc.seed, {round});
      current = detail::annotate(round, "clustering", [&] {
        return kmeans(embedding, kc).partition;
      });
    }

    rec.partition = current;
    if (ground_truth) rec.ari = ari(current, *ground_truth);
    try {
      rec.modularity = modularity(g, current, cfg.modularity);
    } catch (const UndefinedMetric&) {
    }
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool stable = !res.trace.rounds.empty() &&
                        res.trace.rounds.back().partition.same_grouping(current);
    const bool first_round_stable = res.trace.rounds.empty() && initial.same_grouping(current);
    res.trace.rounds.push_back(std::move(rec));
    if (cfg.convergence == Convergence::assignment_stable && (stable || first_round_stable)) break;
  }
  res.partition = std::move(current);
  res.embeddings = std::move(embedding);
  return res;
}

struct AblationRow {
  bool sr = false;
  bool br = false;
  bool cl = false;
  double ari = 0.0;
};

/// (SR, BR, CL) flags in Table-1 row order: none, SR, BR, CL, SR+BR, SR+CL,
/// BR+CL, all.
inline constexpr std::array<std::array<bool, 3>, 8> kAblationRows{{
    {false, false, false},
    {true, false, false},
    {false, true, false},
    {false, false, true},
    {true, true, false},
    {true, false, true},
    {false, true, true},
    {true, true, true},
}};

/// ARI of refine under each step subset; the empty subset is the initial
/// partition itself.
inline std::vector<AblationRow> ablation_matrix(const SignedGraph& g, const Partition& initial,
                                                const RefineConfig& cfg,
                                                const Partition& ground_truth) {
  std::vector<AblationRow> rows;
  rows.reserve(kAblationRows.size());
  for (const auto& flags : kAblationRows) {
    AblationRow row{flags[0], flags[1], flags[2], 0.0};
    if (!row.sr && !row.br && !row.cl) {
      row.ari = ari(initial, ground_truth);
    } else {
      RefineConfig c = cfg;
      c.enable_sr = row.sr;
      c.enable_br = row.br;
      c.enable_cl = row.cl;
      row.ari = ari(refine(g, initial, c).partition, ground_truth);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace recon
