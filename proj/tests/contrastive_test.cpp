#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "test_util.hpp"

namespace recon {
namespace {

using testing::random_graph;
using testing::random_partition;
using testing::two_cliques;

Eigen::MatrixXd random_features(std::size_t n, std::size_t f, Rng& rng) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1, 1);
  }
  return x;
}

void expect_unit_rows(const Eigen::MatrixXd& m, double tol = 1e-9) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) EXPECT_NEAR(m.row(i).norm(), 1.0, tol) << "row " << i;
}

TEST(Augment, NoMaskingIsIdentity) {
  Rng rng(1);
  const auto g = two_cliques(4, 4);
  const auto p = Partition::from_labels({0, 0, 0, 0, 1, 1, 1, 1});
  const auto x = random_features(8, 5, rng);
  ContrastiveConfig cfg;
  cfg.feat_mask_prob = 0.0;
  cfg.comm_mask_prob = 0.0;
  const auto v = augment(g, p, x, cfg, 0, 1);
  EXPECT_EQ(v.features, x);
  EXPECT_EQ(v.pool_mask, std::vector<bool>(8, true));
}

TEST(Augment, HeavyFeatureMasking) {
  const auto s = generate_ssbm({1000, 5, 0.01, 0.0, 0});
  Rng rng(2);
  const auto x = random_features(1000, 16, rng);
  ContrastiveConfig cfg;
  cfg.feat_mask_prob = 0.99;
  const auto v = augment(s.graph, s.ground_truth, x, cfg, 3, 1);
  const auto zeros = (v.features.array() == 0.0).count();
  EXPECT_GE(static_cast<double>(zeros), 0.95 * 16000);
}

TEST(Augment, ReproducibleAndViewsDiffer) {
  const auto s = generate_ssbm({200, 4, 0.05, 0.0, 0});
  Rng rng(3);
  const auto x = random_features(200, 8, rng);
  ContrastiveConfig cfg;
  cfg.rng_seed = 5;
  const auto a = augment(s.graph, s.ground_truth, x, cfg, 2, 1);
  const auto b = augment(s.graph, s.ground_truth, x, cfg, 2, 1);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.pool_mask, b.pool_mask);
  const auto c = augment(s.graph, s.ground_truth, x, cfg, 2, 2);
  EXPECT_NE(a.features, c.features);
  const auto d = augment(s.graph, s.ground_truth, x, cfg, 3, 1);
  EXPECT_NE(a.features, d.features);
}

TEST(Augment, FullyMaskedCommunityKeepsHighestDegreeMember) {
  // Community 1 = {3, 4, 5}; node 4 has the largest degree.
  const SignedGraph g(6, {{0, 1, 1}, {1, 2, 1}, {3, 4, 1}, {4, 5, 1}, {2, 4, -1}});
  const Partition p({0, 0, 0, 1, 1, 1}, 2);
  ContrastiveConfig cfg;
  cfg.feat_mask_prob = 0.0;
  cfg.comm_mask_prob = 0.999;
  const auto v = augment(g, p, Eigen::MatrixXd::Ones(6, 2), cfg, 0, 1);
  std::vector<int> pooled(2, 0);
  for (std::size_t i = 0; i < 6; ++i) pooled[p[i]] += v.pool_mask[i] ? 1 : 0;
  EXPECT_GE(pooled[0], 1);
  EXPECT_GE(pooled[1], 1);
  EXPECT_TRUE(v.pool_mask[4]);
}

TEST(Encode, ZeroInputGivesFloorDirection) {
  const auto g = two_cliques(3, 3);
  const auto p = Partition::from_labels({0, 0, 0, 1, 1, 1});
  auto params = EncoderParams::init(4, 5, 0);
  const auto out = encode(g, p, identity_view(Eigen::MatrixXd::Zero(6, 4)), params);
  Eigen::RowVectorXd e0 = Eigen::RowVectorXd::Zero(5);
  e0(0) = 1.0;
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(out.z.row(i), e0);
  for (Eigen::Index k = 0; k < 2; ++k) EXPECT_EQ(out.y.row(k), e0);
}

TEST(Encode, SingleNodeSingleCommunity) {
  const SignedGraph g(1, {});
  Rng rng(4);
  auto params = EncoderParams::init(3, 4, 1);
  params.b1.setConstant(0.5);
  params.b2.setConstant(0.5);
  const auto out = encode(g, Partition::single(1), identity_view(random_features(1, 3, rng)),
                          params);
  expect_unit_rows(out.z);
  ASSERT_EQ(out.y.rows(), 1);
  // With n = K = 1, the pooled community row is h itself; Z and Y are both unit.
  expect_unit_rows(out.y);
}

TEST(Encode, PermutationEquivariant) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 12;
    const auto g = random_graph(n, 0.4, rng);
    const auto p = random_partition(n, 3, rng);
    const auto x = random_features(n, 4, rng);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.sign});
    const SignedGraph pg(n, edges);
    std::vector<CommunityId> labels(n);
    Eigen::MatrixXd px(x.rows(), x.cols());
    for (std::size_t v = 0; v < n; ++v) {
      labels[perm[v]] = p[v];
      px.row(perm[v]) = x.row(static_cast<Eigen::Index>(v));
    }
    auto params = EncoderParams::init(4, 6, trial);
    params.b1.setConstant(0.1);
    params.b2.setConstant(0.1);
    const auto a = encode(g, p, identity_view(x), params);
    const auto b = encode(pg, Partition(labels, 3), identity_view(px), params);
    for (std::size_t v = 0; v < n; ++v) {
      EXPECT_LE((a.z.row(static_cast<Eigen::Index>(v)) - b.z.row(perm[v])).norm(), 1e-12);
    }
    EXPECT_LE((a.y - b.y).norm(), 1e-12);
  }
}

TEST(Encode, EmbeddingRowsUnitNorm) {
  const auto s = generate_ssbm({300, 3, 0.05, 0.1, 1});
  const auto x = spectral_embed(s.graph, 8);
  ContrastiveConfig cfg;
  const auto params = EncoderParams::init(8, 32, 0);
  for (std::uint64_t view = 1; view <= 2; ++view) {
    const auto out = encode(s.graph, s.ground_truth, augment(s.graph, s.ground_truth, x, cfg, 0, view),
                            params);
    expect_unit_rows(out.z);
    expect_unit_rows(out.y);
  }
}

TEST(Loss, SingleRowIsZero) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(1, 3);
  EXPECT_EQ(node_loss(z, z, 0.5), 0.0);
  EXPECT_EQ(community_loss(z, z, 0.5), 0.0);
}

TEST(Loss, OrthonormalClosedForm) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 4);
  const double want = std::log(1.0 + std::exp(-1.0));
  EXPECT_NEAR(want, 0.3133, 5e-5);
  EXPECT_NEAR(node_loss(z, z, 1.0), want, 1e-12);
  EXPECT_NEAR(community_loss(z, z, 1.0), want, 1e-12);
}

TEST(Loss, ShapeMismatchThrows) {
  EXPECT_THROW(node_loss(Eigen::MatrixXd::Identity(2, 3), Eigen::MatrixXd::Identity(3, 3), 1.0),
               InvalidArgument);
}

TEST(Loss, TotalWeights) {
  ContrastiveConfig cfg;
  cfg.omega_c = 0.0;
  EXPECT_EQ(total_loss(0.3, 0.2, cfg), 0.3);
  cfg.omega_c = 1.0;
  EXPECT_DOUBLE_EQ(total_loss(0.3, 0.2, cfg), 0.5);
  cfg.omega_n = cfg.omega_c = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(LossProperty, SymmetricAndPositive) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    Eigen::MatrixXd a = random_features(n, 5, rng);
    Eigen::MatrixXd b = random_features(n, 5, rng);
    detail::normalize_rows_floor(a);
    detail::normalize_rows_floor(b);
    const double tau = rng.uniform(0.1, 2.0);
    const double l = node_loss(a, b, tau);
    EXPECT_NEAR(l, node_loss(b, a, tau), 1e-12);
    EXPECT_GT(l, 0.0);

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Eigen::MatrixXd pa(a.rows(), a.cols()), pb(b.rows(), b.cols());
    for (std::size_t i = 0; i < n; ++i) {
      pa.row(perm[i]) = a.row(static_cast<Eigen::Index>(i));
      pb.row(perm[i]) = b.row(static_cast<Eigen::Index>(i));
    }
    EXPECT_NEAR(community_loss(pa, pb, tau), community_loss(a, b, tau), 1e-12);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = oracle::grad_instance(seed);
    const auto r = oracle::check_gradient(inst.graph, inst.partition, inst.v1, inst.v2,
                                          inst.params, inst.cfg);
    EXPECT_LE(r.max_rel_error, 1e-4) << "seed " << seed << " worst entry " << r.worst_index;
    EXPECT_EQ(r.entries, 4u * 3u + 4u + 4u * 8u + 4u);
  }
}

TEST(Train, ZeroEpochsIsInitialEncoding) {
  const auto s = generate_ssbm({100, 2, 0.1, 0.0, 0});
  const auto x = spectral_embed(s.graph, 8);
  ContrastiveConfig cfg;
  cfg.epochs = 0;
  cfg.rng_seed = 4;
  const auto r = train(s.graph, s.ground_truth, x, cfg);
  EXPECT_TRUE(r.loss_trace.empty());
  const auto want = encode(s.graph, s.ground_truth, identity_view(x),
                           EncoderParams::init(8, cfg.embed_dim, 4));
  EXPECT_EQ(r.z, want.z);
}

TEST(Train, Reproducible) {
  const auto s = generate_ssbm({120, 3, 0.08, 0.05, 1});
  const auto x = spectral_embed(s.graph, 8);
  ContrastiveConfig cfg;
  cfg.epochs = 10;
  const auto a = train(s.graph, s.ground_truth, x, cfg);
  const auto b = train(s.graph, s.ground_truth, x, cfg);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.z, b.z);
  expect_unit_rows(a.z);
}

TEST(Train, NonFiniteLossNamesEpoch) {
  const auto s = generate_ssbm({60, 2, 0.2, 0.0, 1});
  auto x = spectral_embed(s.graph, 8);
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  ContrastiveConfig cfg;
  cfg.epochs = 3;
  try {
    train(s.graph, s.ground_truth, x, cfg);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos) << e.what();
  }
}

double separation(const Eigen::MatrixXd& z, const Partition& p) {
  const Eigen::MatrixXd sim = z * z.transpose();
  double intra = 0, inter = 0, ni = 0, ne = 0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sim.cols(); ++j) {
      if (p[static_cast<std::size_t>(i)] == p[static_cast<std::size_t>(j)]) {
        intra += sim(i, j);
        ni += 1;
      } else {
        inter += sim(i, j);
        ne += 1;
      }
    }
  }
  return intra / ni - inter / ne;
}

TEST(Train, SeparationMarginAndLossDecrease) {
  double first = 0, last = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = generate_ssbm({300, 3, 0.05, 0.0, seed});
    const auto x = spectral_embed(s.graph, 8);
    ContrastiveConfig cfg;
    cfg.rng_seed = seed;
    cfg.epochs = 0;
    const double before = separation(train(s.graph, s.ground_truth, x, cfg).z, s.ground_truth);
    cfg.epochs = 100;
    const auto trained = train(s.graph, s.ground_truth, x, cfg);
    EXPECT_GT(separation(trained.z, s.ground_truth), before) << "seed " << seed;
    first += trained.loss_trace.front();
    last += trained.loss_trace.back();
  }
  EXPECT_LE(last, first);
}

}  // namespace
}  // namespace recon
