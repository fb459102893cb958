#pragma once

#include <cstdint>
#include <vector>

#include "recon/recon.hpp"

namespace recon::testing {

inline SignedGraph make_graph(std::size_t n, std::initializer_list<Edge> edges) {
  return SignedGraph(n, std::vector<Edge>(edges));
}

/// Two disjoint all-positive cliques {0..a-1} and {a..a+b-1}.
inline SignedGraph two_cliques(std::size_t a, std::size_t b,
                               std::vector<Edge> extra = {}) {
  std::vector<Edge> edges;
  auto clique = [&](NodeId lo, NodeId hi) {
    for (NodeId u = lo; u < hi; ++u) {
      for (NodeId v = u + 1; v < hi; ++v) edges.push_back({u, v, 1});
    }
  };
  clique(0, static_cast<NodeId>(a));
  clique(static_cast<NodeId>(a), static_cast<NodeId>(a + b));
  for (const auto& e : extra) edges.push_back(e);
  return SignedGraph(a + b, std::move(edges));
}

/// G(n, p) with each sign +1 with probability 1/2.
inline SignedGraph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.push_back({u, v, rng.bernoulli(0.5) ? 1 : -1});
    }
  }
  return SignedGraph(n, std::move(edges));
}

inline Partition random_partition(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<CommunityId> a(n);
  for (auto& c : a) c = static_cast<CommunityId>(rng.below(k));
  return Partition(std::move(a), k);
}

}  // namespace recon::testing
