#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "recon/errors.hpp"
#include "recon/kmeans.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

enum class LaplacianVariant { plain, symmetric };

struct SpectralConfig {
  /// Embedding width; unset means "use the requested community count".
  std::optional<std::size_t> embed_dim;
  LaplacianVariant laplacian = LaplacianVariant::symmetric;
  double eig_tolerance = 1e-8;
  /// Block-Krylov steps for the iterative solver.
  std::size_t max_eig_iters = 300;
  /// Graphs up to this size use the dense symmetric solver.
  std::size_t dense_threshold = 2000;
};

struct Eigenpairs {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< n x d, orthonormal columns
};

/// Plain: D - A with D = diag(|degree|). Symmetric: D^-1/2 (D - A) D^-1/2, zero
/// rows/columns for isolated nodes.
inline Eigen::SparseMatrix<double> signed_laplacian_sparse(const SignedGraph& g,
                                                           LaplacianVariant variant) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.num_nodes() + 2 * g.num_edges());
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  if (variant == LaplacianVariant::symmetric) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto d = static_cast<double>(g.degree(v));
      scale(v) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto d = static_cast<double>(g.degree(v));
    if (d > 0.0) trip.emplace_back(v, v, d * scale(v) * scale(v));
  }
  for (const Edge& e : g.edges()) {
    const double w = -static_cast<double>(e.sign) * scale(e.u) * scale(e.v);
    trip.emplace_back(e.u, e.v, w);
    trip.emplace_back(e.v, e.u, w);
  }
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(trip.begin(), trip.end());
  return l;
}

inline Eigen::MatrixXd signed_laplacian(const SignedGraph& g, LaplacianVariant variant) {
  return Eigen::MatrixXd(signed_laplacian_sparse(g, variant));
}

namespace detail {

/// Orthonormalizes `block` against the columns of `basis` (twice, for
/// stability) and within itself; columns whose norm collapses are dropped.
inline Eigen::MatrixXd orthonormalize_against(const Eigen::MatrixXd& basis,
                                              Eigen::MatrixXd block) {
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) block -= basis * (basis.transpose() * block);
  }
  std::vector<Eigen::VectorXd> kept;
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    Eigen::VectorXd v = block.col(j);
    const double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) v -= q * q.dot(v);
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
    }
    const double after = v.norm();
    if (after > 1e-10 * std::max(before, 1.0)) kept.push_back(v / after);
  }
  Eigen::MatrixXd out(block.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
  return out;
}

/// Block Lanczos with full reorthogonalization and explicit Rayleigh-Ritz on
/// the accumulated Krylov basis. Random restarts fill in when the block
/// deflates, so repeated eigenvalues (disconnected graphs) are recovered.
inline Eigenpairs block_lanczos_smallest(const Eigen::SparseMatrix<double>& l, std::size_t d,
                                         const SpectralConfig& cfg) {
  const Eigen::Index n = l.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(d) + 4);
  Rng rng(derive_seed(0x6c616e637a6f73ULL, {static_cast<std::uint64_t>(n), d}));
  auto random_block = [&](Eigen::Index cols) {
    Eigen::MatrixXd m(n, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
    }
    return m;
  };

  Eigen::MatrixXd basis(n, 0);
  Eigen::MatrixXd lbasis(n, 0);
  Eigen::MatrixXd next = orthonormalize_against(basis, random_block(block));
  for (std::size_t step = 1; step <= cfg.max_eig_iters; ++step) {
    if (next.cols() < block && basis.cols() + block <= n) {
      Eigen::MatrixXd extra =
          orthonormalize_against(basis, random_block(block - next.cols()));
      Eigen::MatrixXd merged(n, next.cols() + extra.cols());
      merged << next, extra;
      next = orthonormalize_against(basis, merged);
    }
    if (next.cols() == 0) break;
    Eigen::MatrixXd lnext = l * next;
    Eigen::MatrixXd nb(n, basis.cols() + next.cols());
    nb << basis, next;
    Eigen::MatrixXd nlb(n, lbasis.cols() + lnext.cols());
    nlb << lbasis, lnext;
    basis = std::move(nb);
    lbasis = std::move(nlb);

    if (basis.cols() >= static_cast<Eigen::Index>(d)) {
      Eigen::MatrixXd h = basis.transpose() * lbasis;
      h = 0.5 * (h + h.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      Eigen::MatrixXd ritz = basis * es.eigenvectors().leftCols(static_cast<Eigen::Index>(d));
      Eigen::VectorXd vals = es.eigenvalues().head(static_cast<Eigen::Index>(d));
      Eigen::MatrixXd resid = lbasis * es.eigenvectors().leftCols(static_cast<Eigen::Index>(d)) -
                              ritz * vals.asDiagonal();
      bool converged = true;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
        if (resid.col(j).lpNorm<Eigen::Infinity>() >
            cfg.eig_tolerance * std::max(1.0, std::abs(vals(j)))) {
          converged = false;
          break;
        }
      }
      if (converged || basis.cols() >= n) return {vals, ritz};
    }
    next = orthonormalize_against(basis, lnext);
  }
  throw NumericError("iterative eigensolver did not converge after " +
                     std::to_string(cfg.max_eig_iters) + " block iterations (basis size " +
                     std::to_string(basis.cols()) + ")");
}

/// Makes each column's largest-magnitude entry positive (first index on ties).
inline void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > best + 1e-12) {
        best = std::abs(v(i, j));
        arg = i;
      }
    }
    if (v(arg, j) < 0.0) v.col(j) *= -1.0;
  }
}

}  // namespace detail

/// The `d` smallest eigenpairs of the chosen signed Laplacian, sign-fixed.
/// Edgeless graphs return the canonical basis e_0..e_{d-1}.
inline Eigenpairs smallest_eigenpairs(const SignedGraph& g, std::size_t d,
                                      const SpectralConfig& cfg) {
  const std::size_t n = g.num_nodes();
  if (d < 1 || d > n) {
    throw InvalidArgument("embedding dimension " + std::to_string(d) + " must lie in [1, " +
                          std::to_string(n) + "]");
  }
  if (!(cfg.eig_tolerance > 0.0)) throw InvalidArgument("eig_tolerance must be > 0");
  const auto dd = static_cast<Eigen::Index>(d);
  Eigenpairs out;
  if (g.num_edges() == 0) {
    out.values = Eigen::VectorXd::Zero(dd);
    out.vectors = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), dd);
    return out;
  }
  if (n <= cfg.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(signed_laplacian(g, cfg.laplacian));
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    out.values = es.eigenvalues().head(dd);
    out.vectors = es.eigenvectors().leftCols(dd);
  } else {
    out = detail::block_lanczos_smallest(signed_laplacian_sparse(g, cfg.laplacian), d, cfg);
  }
  detail::fix_signs(out.vectors);
  return out;
}

/// Rows of unit L2 norm (zero rows stay zero).
inline Eigen::MatrixXd normalize_rows(Eigen::MatrixXd m, double zero_tol = 1e-12) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > zero_tol) m.row(i) /= norm;
  }
  return m;
}

/// n x d embedding from the d smallest Laplacian eigenvectors, row-normalized.
inline Eigen::MatrixXd spectral_embed(const SignedGraph& g, std::size_t d,
                                      const SpectralConfig& cfg = {}) {
  return normalize_rows(smallest_eigenpairs(g, d, cfg).vectors);
}

inline Eigen::MatrixXd spectral_embed(const SignedGraph& g, const SpectralConfig& cfg) {
  if (!cfg.embed_dim) throw InvalidArgument("spectral_embed: embed_dim not set");
  return spectral_embed(g, *cfg.embed_dim, cfg);
}

/// k-means configuration used by the built-in baseline.
inline KmeansConfig baseline_kmeans_config(std::size_t k, std::uint64_t seed) {
  KmeansConfig kc;
  kc.k = k;
  kc.seed = seed;
  return kc;
}

/// Built-in baseline: spectral embedding (d = embed_dim or k) + k-means.
inline Partition baseline_detect(const SignedGraph& g, std::size_t k,
                                 const SpectralConfig& cfg, std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("baseline_detect: k must be >= 1");
  if (k == 1) return Partition::single(g.num_nodes());
  const Eigen::MatrixXd emb = spectral_embed(g, cfg.embed_dim.value_or(k), cfg);
  return kmeans(emb, baseline_kmeans_config(k, seed)).partition;
}

}  // namespace recon
