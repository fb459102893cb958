#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace recon {
namespace {

using testing::make_graph;
using testing::random_graph;
using testing::two_cliques;

TEST(Laplacian, SinglePositiveEdge) {
  const auto g = make_graph(2, {{0, 1, 1}});
  Eigen::Matrix2d want;
  want << 1, -1, -1, 1;
  EXPECT_TRUE(signed_laplacian(g, LaplacianVariant::plain).isApprox(want));
  EXPECT_TRUE(signed_laplacian(g, LaplacianVariant::symmetric).isApprox(want));
}

TEST(Laplacian, SingleNegativeEdge) {
  const auto g = make_graph(2, {{0, 1, -1}});
  Eigen::Matrix2d want;
  want << 1, 1, 1, 1;
  EXPECT_TRUE(signed_laplacian(g, LaplacianVariant::plain).isApprox(want));
}

TEST(Laplacian, IsolatedNodeHasZeroRowInSymmetricVariant) {
  const auto g = make_graph(3, {{0, 1, 1}});
  const auto l = signed_laplacian(g, LaplacianVariant::symmetric);
  EXPECT_EQ(l.row(2).norm(), 0.0);
  EXPECT_EQ(l.col(2).norm(), 0.0);
}

TEST(LaplacianProperty, SymmetricAndPlainIsPsd) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t n = 10 + rng.below(191);
    const auto s = generate_ssbm({n, 1 + rng.below(5), rng.uniform(0.01, 0.2),
                                  rng.uniform(0.0, 0.3), seed});
    for (auto variant : {LaplacianVariant::plain, LaplacianVariant::symmetric}) {
      const auto l = signed_laplacian(s.graph, variant);
      EXPECT_LE((l - l.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      if (variant == LaplacianVariant::plain) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9) << "seed " << seed;
      }
    }
  }
}

void expect_eigen_residuals(const SignedGraph& g, const Eigenpairs& e, LaplacianVariant v) {
  const auto l = signed_laplacian(g, v);
  for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
    const double lam = e.values(j);
    const double res = (l * e.vectors.col(j) - lam * e.vectors.col(j)).cwiseAbs().maxCoeff();
    EXPECT_LE(res, 1e-6 * std::max(1.0, std::abs(lam))) << "column " << j;
  }
}

TEST(Eigenpairs, DenseResiduals) {
  const auto s = generate_ssbm({200, 4, 0.05, 0.1, 3});
  for (auto v : {LaplacianVariant::plain, LaplacianVariant::symmetric}) {
    SpectralConfig cfg;
    cfg.laplacian = v;
    expect_eigen_residuals(s.graph, smallest_eigenpairs(s.graph, 6, cfg), v);
  }
}

TEST(Eigenpairs, IterativeMatchesDense) {
  const auto s = generate_ssbm({400, 5, 0.03, 0.05, 9});
  SpectralConfig dense;
  SpectralConfig iterative;
  iterative.dense_threshold = 0;
  const auto a = smallest_eigenpairs(s.graph, 5, dense);
  const auto b = smallest_eigenpairs(s.graph, 5, iterative);
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-6);
  expect_eigen_residuals(s.graph, b, LaplacianVariant::symmetric);
  const Eigen::MatrixXd gram = b.vectors.transpose() * b.vectors;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Eigenpairs, IterativeNonConvergenceReportsIterations) {
  const auto s = generate_ssbm({300, 5, 0.03, 0.05, 1});
  SpectralConfig cfg;
  cfg.dense_threshold = 0;
  cfg.max_eig_iters = 1;
  cfg.eig_tolerance = 1e-15;
  try {
    smallest_eigenpairs(s.graph, 5, cfg);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("1 block iterations"), std::string::npos) << e.what();
  }
}

TEST(Eigenpairs, SignConvention) {
  const auto s = generate_ssbm({100, 3, 0.1, 0.05, 2});
  const auto e = smallest_eigenpairs(s.graph, 3, {});
  for (Eigen::Index j = 0; j < 3; ++j) {
    Eigen::Index arg;
    e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(e.vectors(arg, j), 0.0);
  }
}

TEST(Eigenpairs, RejectsBadDimension) {
  const auto g = two_cliques(3, 3);
  EXPECT_THROW(smallest_eigenpairs(g, 0, {}), InvalidArgument);
  EXPECT_THROW(smallest_eigenpairs(g, 7, {}), InvalidArgument);
}

TEST(SpectralEmbed, TwoCliquesSeparate) {
  const auto g = two_cliques(5, 5);
  const auto z = spectral_embed(g, 2);
  for (int i = 1; i < 5; ++i) {
    EXPECT_LE((z.row(i) - z.row(0)).norm(), 1e-9);
    EXPECT_LE((z.row(5 + i) - z.row(5)).norm(), 1e-9);
  }
  EXPECT_GT((z.row(0) - z.row(5)).norm(), 0.5);
}

TEST(SpectralEmbed, FullBasisOnK3) {
  const auto g = make_graph(3, {{0, 1, 1}, {0, 2, 1}, {1, 2, -1}});
  const auto e = smallest_eigenpairs(g, 3, {});
  const Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors;
  EXPECT_LE((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralEmbed, EmptyGraphGivesCanonicalBasis) {
  const SignedGraph g(4, {});
  const auto z = spectral_embed(g, 1);
  EXPECT_EQ(z, Eigen::MatrixXd::Identity(4, 1));
}

TEST(SpectralEmbed, RowsUnitOrZero) {
  const auto s = generate_ssbm({300, 5, 0.01, 0.02, 0});
  const auto z = spectral_embed(s.graph, 5);
  int unit = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    // Nodes in small components can fall outside every kept eigenvector.
    const double norm = z.row(i).norm();
    EXPECT_TRUE(norm <= 1e-12 || std::abs(norm - 1.0) < 1e-9) << "row " << i << ": " << norm;
    unit += std::abs(norm - 1.0) < 1e-9 ? 1 : 0;
  }
  EXPECT_GT(unit, 0);
}

TEST(BaselineDetect, TwoCliquesRecovered) {
  const auto g = two_cliques(5, 5);
  const auto p = baseline_detect(g, 2, {}, 0);
  EXPECT_DOUBLE_EQ(ari(p, Partition::from_labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1})), 1.0);
}

TEST(BaselineDetect, SingleCommunity) {
  const auto g = two_cliques(3, 4);
  EXPECT_EQ(baseline_detect(g, 1, {}, 0), Partition::single(7));
}

TEST(BaselineDetect, Deterministic) {
  const auto s = generate_ssbm({300, 3, 0.05, 0.1, 5});
  EXPECT_EQ(baseline_detect(s.graph, 3, {}, 42), baseline_detect(s.graph, 3, {}, 42));
}

TEST(BaselineDetect, CleanBeatsNoisy) {
  double clean = 0, noisy = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = generate_ssbm({1000, 5, 0.01, 0.0, seed});
    const auto b = generate_ssbm({1000, 5, 0.01, 0.2, seed});
    clean += ari(baseline_detect(a.graph, 5, {}, seed), a.ground_truth);
    noisy += ari(baseline_detect(b.graph, 5, {}, seed), b.ground_truth);
  }
  EXPECT_GT(clean, noisy);
}

TEST(ImportPartition, ParsesAndRoundTrips) {
  std::istringstream in("0 0\n1 0\n2 1\n");
  const auto p = read_partition(in, 3);
  EXPECT_EQ(p.assignment(), (std::vector<CommunityId>{0, 0, 1}));
  EXPECT_EQ(p.num_communities(), 2u);

  const auto path = std::filesystem::temp_directory_path() / "recon_import_roundtrip.part";
  write_partition(path, p);
  EXPECT_EQ(import_partition(path, 3), p);
  std::filesystem::remove(path);
}

TEST(ImportPartition, MissingNodeNamesIt) {
  std::istringstream in("0 0\n1 0\n");
  try {
    read_partition(in, 3);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos) << e.what();
  }
}

TEST(ImportPartition, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_partition(in, 3);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("0 0\n1 1\n1 0\n2 0\n"), 3u);  // duplicate
  EXPECT_EQ(line_of("0 0\n1 x\n2 0\n"), 2u);       // non-integer
  EXPECT_EQ(line_of("0 0\n7 0\n2 0\n"), 2u);       // out of range
}

}  // namespace
}  // namespace recon
