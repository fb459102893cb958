#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "recon/errors.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

/// Signed stochastic block model parameters.
struct SsbmParams {
  std::size_t num_nodes = 1000;
  std::size_t num_communities = 5;
  double edge_prob = 0.01;
  double noise_ratio = 0.02;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_communities < 1) throw InvalidArgument("SSBM needs at least one community");
    if (num_nodes < num_communities) {
      throw InvalidArgument("SSBM needs num_nodes >= num_communities");
    }
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
      throw InvalidArgument("SSBM edge_prob must lie in [0, 1]");
    }
    if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
      throw InvalidArgument("SSBM noise_ratio must lie in [0, 1]");
    }
  }
};

struct SsbmSample {
  SignedGraph graph;
  Partition ground_truth;
  std::vector<bool> noise_flags;  ///< per edge; true = sign was flipped
};

/// Balanced contiguous blocks: the first n mod k communities get one extra node.
inline Partition block_partition(std::size_t num_nodes, std::size_t num_communities) {
  std::vector<CommunityId> labels(num_nodes);
  const std::size_t base = num_nodes / num_communities;
  const std::size_t extra = num_nodes % num_communities;
  std::size_t v = 0;
  for (std::size_t c = 0; c < num_communities; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) labels[v++] = static_cast<CommunityId>(c);
  }
  return Partition(std::move(labels), num_communities);
}

/// Pairs (i, j), i < j, are visited lexicographically. Each pair draws one
/// uniform for the edge test; each sampled edge draws one more for the flip.
inline SsbmSample generate_ssbm(const SsbmParams& params) {
  params.validate();
  SsbmSample out;
  out.ground_truth = block_partition(params.num_nodes, params.num_communities);
  const auto& truth = out.ground_truth;

  Rng rng(params.seed);
  std::vector<Edge> edges;
  std::vector<bool> flags;
  if (params.edge_prob > 0.0) {
    for (NodeId i = 0; i < params.num_nodes; ++i) {
      for (NodeId j = i + 1; j < params.num_nodes; ++j) {
        if (!rng.bernoulli(params.edge_prob)) continue;
        int sign = truth[i] == truth[j] ? 1 : -1;
        const bool flip = rng.bernoulli(params.noise_ratio);
        if (flip) sign = -sign;
        edges.push_back({i, j, sign});
        flags.push_back(flip);
      }
    }
  }
  out.graph = SignedGraph(params.num_nodes, std::move(edges));
  out.noise_flags = std::move(flags);
  return out;
}

inline double expected_edge_count(const SsbmParams& params) {
  const double n = static_cast<double>(params.num_nodes);
  return params.edge_prob * n * (n - 1.0) / 2.0;
}

namespace detail {

/// Two decimals when exact ("0.01", "0.00"), otherwise shortest %g form.
inline std::string label_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  if (std::abs(std::strtod(buf, nullptr) - x) < 1e-12) return buf;
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace detail

/// `SSBM-<n>-<k>-<p>-<mu>`, e.g. SSBM-1000-5-0.01-0.02.
inline std::string dataset_name(const SsbmParams& params) {
  return "SSBM-" + std::to_string(params.num_nodes) + "-" +
         std::to_string(params.num_communities) + "-" + detail::label_number(params.edge_prob) +
         "-" + detail::label_number(params.noise_ratio);
}

}  // namespace recon
