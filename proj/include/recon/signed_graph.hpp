#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recon/errors.hpp"

namespace recon {

using NodeId = std::uint32_t;
using CommunityId = std::uint32_t;

/// Undirected signed edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  int sign = 1;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  NodeId node = 0;
  int sign = 1;
  std::size_t edge = 0;  ///< index into SignedGraph::edges()

  bool operator==(const Neighbor&) const = default;
};

/// Undirected graph with +1/-1 edge signs. Immutable after construction.
class SignedGraph {
 public:
  SignedGraph() = default;

  /// Edges may be given in either orientation; they are stored as (min, max)
  /// in input order. Throws InvalidArgument on self-loops, duplicate
  /// unordered pairs, signs other than +-1, or ids >= num_nodes.
  SignedGraph(std::size_t num_nodes, std::vector<Edge> edges)
      : num_nodes_(num_nodes), edges_(std::move(edges)), adjacency_(num_nodes) {
    index_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      Edge& edge = edges_[e];
      if (edge.u >= num_nodes_ || edge.v >= num_nodes_) {
        throw InvalidArgument("edge (" + std::to_string(edge.u) + ", " +
                              std::to_string(edge.v) + ") references a node >= " +
                              std::to_string(num_nodes_));
      }
      if (edge.u == edge.v) {
        throw InvalidArgument("self-loop on node " + std::to_string(edge.u));
      }
      if (edge.sign != 1 && edge.sign != -1) {
        throw InvalidArgument("edge sign must be +1 or -1, got " + std::to_string(edge.sign));
      }
      if (edge.u > edge.v) std::swap(edge.u, edge.v);
      if (!index_.emplace(key(edge.u, edge.v), e).second) {
        throw InvalidArgument("duplicate edge (" + std::to_string(edge.u) + ", " +
                              std::to_string(edge.v) + ")");
      }
      adjacency_[edge.u].push_back({edge.v, edge.sign, e});
      adjacency_[edge.v].push_back({edge.u, edge.sign, e});
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
  }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Adjacency of `v` sorted by ascending neighbor id.
  std::span<const Neighbor> neighbors(NodeId v) const {
    check_node(v);
    return adjacency_[v];
  }

  std::size_t degree(NodeId v) const {
    check_node(v);
    return adjacency_[v].size();
  }

  std::optional<std::size_t> find_edge(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    auto it = index_.find(key(a, b));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Sign of edge {a, b}, or 0 when absent.
  int sign(NodeId a, NodeId b) const {
    auto e = find_edge(a, b);
    return e ? edges_[*e].sign : 0;
  }

  void check_node(NodeId v) const {
    if (v >= num_nodes_) {
      throw InvalidArgument("node id " + std::to_string(v) + " out of range [0, " +
                            std::to_string(num_nodes_) + ")");
    }
  }

 private:
  static std::uint64_t key(NodeId a, NodeId b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Node -> community assignment with a fixed community count K. Communities
/// may be empty.
class Partition {
 public:
  Partition() = default;

  Partition(std::vector<CommunityId> assignment, std::size_t num_communities)
      : assignment_(std::move(assignment)), num_communities_(num_communities) {
    if (num_communities_ < 1) throw InvalidArgument("partition needs at least one community");
    for (std::size_t v = 0; v < assignment_.size(); ++v) {
      if (assignment_[v] >= num_communities_) {
        throw InvalidArgument("node " + std::to_string(v) + " assigned to community " +
                              std::to_string(assignment_[v]) + " >= K=" +
                              std::to_string(num_communities_));
      }
    }
  }

  /// K = max label + 1.
  static Partition from_labels(std::vector<CommunityId> labels) {
    CommunityId max_label = 0;
    for (auto c : labels) max_label = std::max(max_label, c);
    return Partition(std::move(labels), static_cast<std::size_t>(max_label) + 1);
  }

  static Partition single(std::size_t num_nodes) {
    return Partition(std::vector<CommunityId>(num_nodes, 0), 1);
  }

  std::size_t size() const noexcept { return assignment_.size(); }
  std::size_t num_communities() const noexcept { return num_communities_; }
  CommunityId operator[](std::size_t v) const { return assignment_[v]; }
  const std::vector<CommunityId>& assignment() const noexcept { return assignment_; }

  /// Member count per community.
  std::vector<std::size_t> occupancy() const {
    std::vector<std::size_t> counts(num_communities_, 0);
    for (auto c : assignment_) ++counts[c];
    return counts;
  }

  std::size_t occupied_communities() const {
    auto counts = occupancy();
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  }

  /// Same grouping of nodes, ignoring community ids.
  bool same_grouping(const Partition& other) const {
    if (size() != other.size()) return false;
    std::unordered_map<CommunityId, CommunityId> fwd, bwd;
    for (std::size_t v = 0; v < size(); ++v) {
      auto [f, fi] = fwd.emplace(assignment_[v], other[v]);
      auto [b, bi] = bwd.emplace(other[v], assignment_[v]);
      if (f->second != other[v] || b->second != assignment_[v]) return false;
    }
    return true;
  }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<CommunityId> assignment_;
  std::size_t num_communities_ = 1;
};

struct Triangle {
  std::array<NodeId, 3> nodes{};  ///< a < b < c
  std::array<int, 3> signs{};     ///< (s_ab, s_ac, s_bc)

  int negative_count() const {
    return static_cast<int>(std::count(signs.begin(), signs.end(), -1));
  }
  bool operator==(const Triangle&) const = default;
};

inline std::span<const Neighbor> neighbors(const SignedGraph& g, NodeId v) {
  return g.neighbors(v);
}

/// Calls `fn(a, b, c, s_ab, s_ac, s_bc)` once per triangle, a < b < c, in
/// lexicographic order. Sorted-adjacency intersection.
template <typename Fn>
void for_each_triangle(const SignedGraph& g, Fn&& fn) {
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    auto adj_a = g.neighbors(a);
    for (const Neighbor& nb : adj_a) {
      const NodeId b = nb.node;
      if (b <= a) continue;
      auto adj_b = g.neighbors(b);
      auto ia = std::upper_bound(adj_a.begin(), adj_a.end(), b,
                                 [](NodeId x, const Neighbor& n) { return x < n.node; });
      auto ib = std::upper_bound(adj_b.begin(), adj_b.end(), b,
                                 [](NodeId x, const Neighbor& n) { return x < n.node; });
      while (ia != adj_a.end() && ib != adj_b.end()) {
        if (ia->node < ib->node) {
          ++ia;
        } else if (ib->node < ia->node) {
          ++ib;
        } else {
          fn(a, b, ia->node, nb.sign, ia->sign, ib->sign);
          ++ia;
          ++ib;
        }
      }
    }
  }
}

inline std::vector<Triangle> enumerate_triangles(const SignedGraph& g) {
  std::vector<Triangle> out;
  for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c, int ab, int ac, int bc) {
    out.push_back(Triangle{{a, b, c}, {ab, ac, bc}});
  });
  return out;
}

struct EdgeConsistency {
  std::size_t pos_intra = 0;
  std::size_t neg_intra = 0;
  std::size_t pos_inter = 0;
  std::size_t neg_inter = 0;

  std::size_t total() const { return pos_intra + neg_intra + pos_inter + neg_inter; }
  bool operator==(const EdgeConsistency&) const = default;
};

inline void check_covers(const SignedGraph& g, const Partition& p) {
  if (p.size() != g.num_nodes()) {
    throw InvalidArgument("partition covers " + std::to_string(p.size()) +
                          " nodes, graph has " + std::to_string(g.num_nodes()));
  }
}

/// Negative edge inside a community, or positive edge across communities.
inline bool violates(const Edge& e, const Partition& p) {
  const bool intra = p[e.u] == p[e.v];
  return intra ? e.sign < 0 : e.sign > 0;
}

inline EdgeConsistency edge_consistency(const SignedGraph& g, const Partition& p) {
  check_covers(g, p);
  EdgeConsistency s;
  for (const Edge& e : g.edges()) {
    const bool intra = p[e.u] == p[e.v];
    if (intra) {
      (e.sign > 0 ? s.pos_intra : s.neg_intra)++;
    } else {
      (e.sign > 0 ? s.pos_inter : s.neg_inter)++;
    }
  }
  return s;
}

/// Indices (ascending) of negative-intra and positive-inter edges.
inline std::vector<std::size_t> violating_edges(const SignedGraph& g, const Partition& p) {
  check_covers(g, p);
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (violates(g.edges()[e], p)) out.push_back(e);
  }
  return out;
}

}  // namespace recon
