#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"

namespace recon {
namespace {

using testing::random_graph;
using testing::random_partition;
using testing::two_cliques;

TEST(Ari, IdenticalPartitions) {
  const auto p = Partition::from_labels({0, 0, 1, 1, 2});
  EXPECT_DOUBLE_EQ(ari(p, p), 1.0);
  EXPECT_DOUBLE_EQ(ari(p, Partition::from_labels({2, 2, 0, 0, 1})), 1.0);
}

TEST(Ari, SingletonsVersusOneCluster) {
  const auto singletons = Partition::from_labels({0, 1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ari(singletons, Partition::single(5)), 0.0);
}

TEST(Ari, SizeMismatchThrows) {
  EXPECT_THROW(ari(Partition::single(3), Partition::single(4)), InvalidArgument);
}

TEST(Ari, MatchesPairOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto a = random_partition(n, 1 + rng.below(n), rng);
    const auto b = random_partition(n, 1 + rng.below(n), rng);
    EXPECT_NEAR(ari(a, b), oracle::ari_pairs(a, b), 1e-12);
  }
}

TEST(AriProperty, SymmetricAndRelabelInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const std::size_t k = 1 + rng.below(5);
    const auto a = random_partition(n, k, rng);
    const auto b = random_partition(n, 1 + rng.below(5), rng);
    EXPECT_NEAR(ari(a, b), ari(b, a), 1e-12);
    std::vector<CommunityId> relabeled(n);
    for (std::size_t v = 0; v < n; ++v) relabeled[v] = static_cast<CommunityId>(k - 1 - a[v]);
    EXPECT_NEAR(ari(Partition(relabeled, k), b), ari(a, b), 1e-12);
  }
}

TEST(Modularity, TwoDisconnectedCliques) {
  const auto g = two_cliques(4, 4);
  EXPECT_DOUBLE_EQ(modularity(g, Partition::from_labels({0, 0, 0, 0, 1, 1, 1, 1})), 0.5);
}

TEST(Modularity, SingleCommunityIsExactlyZero) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(30, 0.3, rng);
    if (edge_consistency(g, Partition::single(30)).pos_intra == 0) continue;
    EXPECT_EQ(modularity(g, Partition::single(30)), 0.0);
  }
}

TEST(Modularity, NoPositiveEdgesIsUndefined) {
  const SignedGraph g(3, {{0, 1, -1}});
  EXPECT_THROW(modularity(g, Partition::single(3)), UndefinedMetric);
  EXPECT_THROW(modularity(SignedGraph(3, {}), Partition::single(3)), UndefinedMetric);
}

TEST(Modularity, RandomPartitionNearZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_ssbm({500, 5, 0.02, 0.02, seed});
    Rng rng(seed + 1000);
    EXPECT_LT(std::abs(modularity(s.graph, random_partition(500, 5, rng))), 0.1);
  }
}

TEST(Modularity, AtMostOne) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(25, 0.3, rng);
    const auto p = random_partition(25, 1 + rng.below(6), rng);
    try {
      EXPECT_LE(modularity(g, p), 1.0);
    } catch (const UndefinedMetric&) {
    }
  }
}

TEST(Modularity, SignedVariantSubtractsNegativeQ) {
  const auto g = two_cliques(3, 3, {{0, 3, -1}});
  const auto p = Partition::from_labels({0, 0, 0, 1, 1, 1});
  const double pos = modularity(g, p, ModularityVariant::positive);
  // One negative inter edge: Q- = 0 - 2 * (1/2)^2 = -0.5.
  EXPECT_DOUBLE_EQ(modularity(g, p, ModularityVariant::signed_difference), pos + 0.5);
}

TEST(Misaligned, GroundTruthIsZero) {
  for (double mu : {0.0, 0.1}) {
    const auto s = generate_ssbm({200, 4, 0.05, mu, 1});
    EXPECT_EQ(misaligned_ratio(s.graph, s.ground_truth, s.noise_flags), 0.0);
  }
}

TEST(Misaligned, SwappedNodeCreatesUnflaggedViolations) {
  // Two positive triangles joined by one negative edge; move node 2 across.
  const auto g = two_cliques(3, 3, {{2, 3, -1}});
  const std::vector<bool> flags(g.num_edges(), false);
  const auto moved = Partition::from_labels({0, 0, 1, 1, 1, 1});
  // Node 2's two positive edges to {0, 1} become inter, its negative edge to
  // 3 becomes intra: 3 of 7 edges.
  EXPECT_DOUBLE_EQ(misaligned_ratio(g, moved, flags), 3.0 / 7.0);
}

TEST(Misaligned, LengthMismatchThrows) {
  const auto g = two_cliques(3, 3);
  EXPECT_THROW(misaligned_ratio(g, Partition::single(6), std::vector<bool>(2)), InvalidArgument);
}

TEST(MisalignedProperty, SetIdentityWithViolatingEdges) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_ssbm({100, 3, 0.1, 0.2, seed});
    const auto p = random_partition(100, 3, rng);
    const auto viol = violating_edges(s.graph, p);
    std::size_t flagged = 0;
    for (auto e : viol) flagged += s.noise_flags[e] ? 1 : 0;
    const double want = static_cast<double>(viol.size() - flagged) /
                        static_cast<double>(s.graph.num_edges());
    const double got = misaligned_ratio(s.graph, p, s.noise_flags);
    EXPECT_DOUBLE_EQ(got, want);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Summary, MeanAndSampleStddev) {
  MetricSummary s{{1.0, 2.0, 3.0, 4.0}};
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
  EXPECT_NEAR(s.stddev(), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(MetricSummary{{0.7}}.stddev(), 0.0);
}

TEST(Spearman, PerfectAndTied) {
  EXPECT_DOUBLE_EQ(spearman({0, 1, 2, 3}, {9, 7, 5, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman({0, 1, 2, 3}, {1, 2, 3, 40}), 1.0);
  EXPECT_NEAR(spearman({1, 2, 3}, {1, 1, 2}), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(Gain, PercentFormula) {
  EXPECT_NEAR(*gain_percent(30.31, 48.89), 61.30, 0.005);
  EXPECT_FALSE(gain_percent(0.0, 1.0).has_value());
}

}  // namespace
}  // namespace recon
