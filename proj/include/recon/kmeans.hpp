#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recon/errors.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

enum class KmeansInit { kmeanspp, forgy };

struct KmeansConfig {
  std::size_t k = 2;
  std::size_t max_iters = 100;
  double tol = 1e-6;
  KmeansInit init = KmeansInit::kmeanspp;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw InvalidArgument("kmeans k must be >= 1");
    if (max_iters < 1) throw InvalidArgument("kmeans max_iters must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("kmeans tol must be > 0");
    if (restarts < 1) throw InvalidArgument("kmeans restarts must be >= 1");
  }
};

struct KmeansResult {
  Partition partition;
  Eigen::MatrixXd centroids;  ///< k x d
  double inertia = 0.0;
  std::size_t iters = 0;
  std::vector<double> inertia_trace;  ///< after each Lloyd iteration of the kept restart
};

namespace detail {

inline Eigen::MatrixXd kmeans_init(const Eigen::MatrixXd& x, std::size_t k, KmeansInit init,
                                   Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  Eigen::MatrixXd c(static_cast<Eigen::Index>(k), x.cols());
  if (init == KmeansInit::forgy) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      auto j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
      c.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    }
    return c;
  }
  std::vector<bool> chosen(n, false);
  auto first = static_cast<std::size_t>(rng.below(n));
  chosen[first] = true;
  c.row(0) = x.row(static_cast<Eigen::Index>(first));
  Eigen::VectorXd d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (std::size_t m = 1; m < k; ++m) {
    const double total = d2.sum();
    std::size_t pick = n;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        r -= d2(static_cast<Eigen::Index>(i));
        if (r < 0.0 && d2(static_cast<Eigen::Index>(i)) > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding ran off the end: take the last positive-mass point
        for (std::size_t i = n; i-- > 0;) {
          if (d2(static_cast<Eigen::Index>(i)) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // every point coincides with a chosen center; fall back to an unused index
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[static_cast<std::size_t>(rng.below(unused.size()))];
    }
    chosen[pick] = true;
    c.row(static_cast<Eigen::Index>(m)) = x.row(static_cast<Eigen::Index>(pick));
    d2 = d2.cwiseMin((x.rowwise() - c.row(static_cast<Eigen::Index>(m))).rowwise().squaredNorm());
  }
  return c;
}

/// Nearest centroid, ties to the lower index. Returns the inertia.
inline double assign_points(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c,
                            std::vector<CommunityId>& labels, Eigen::VectorXd& dist2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
      const double d = (x.row(i) - c.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    labels[static_cast<std::size_t>(i)] = static_cast<CommunityId>(arg);
    dist2(i) = best;
    inertia += best;
  }
  return inertia;
}

inline KmeansResult lloyd(const Eigen::MatrixXd& x, const KmeansConfig& cfg, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<Eigen::Index>(cfg.k);
  Eigen::MatrixXd c = kmeans_init(x, cfg.k, cfg.init, rng);
  std::vector<CommunityId> labels(n, 0);
  Eigen::VectorXd dist2(x.rows());
  KmeansResult res;

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    assign_points(x, c, labels, dist2);

    // Empty-cluster repair: steal the point farthest from its centroid.
    std::vector<std::size_t> counts(cfg.k, 0);
    for (auto l : labels) ++counts[l];
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (counts[labels[static_cast<std::size_t>(i)]] > 1 && dist2(i) > far_d) {
          far_d = dist2(i);
          far = i;
        }
      }
      if (far < 0) break;
      --counts[labels[static_cast<std::size_t>(far)]];
      labels[static_cast<std::size_t>(far)] = static_cast<CommunityId>(j);
      counts[static_cast<std::size_t>(j)] = 1;
      dist2(far) = 0.0;
    }

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) next.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto cnt = counts[static_cast<std::size_t>(j)];
      if (cnt > 0) {
        next.row(j) /= static_cast<double>(cnt);
      } else {
        next.row(j) = c.row(j);
      }
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      inertia += (x.row(i) - next.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    const double shift = (next - c).rowwise().norm().maxCoeff();
    c = std::move(next);
    res.inertia_trace.push_back(inertia);
    res.inertia = inertia;
    res.iters = it;
    if (shift < cfg.tol) break;
  }
  res.partition = Partition(std::move(labels), cfg.k);
  res.centroids = std::move(c);
  return res;
}

}  // namespace detail

/// Lloyd's algorithm with `cfg.restarts` seeded restarts; keeps the lowest
/// inertia (first restart wins ties). Squared Euclidean distance.
inline KmeansResult kmeans(const Eigen::MatrixXd& points, const KmeansConfig& cfg) {
  cfg.validate();
  if (cfg.k > static_cast<std::size_t>(points.rows())) {
    throw InvalidArgument("kmeans k=" + std::to_string(cfg.k) + " exceeds point count " +
                          std::to_string(points.rows()));
  }
  KmeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, {0x6b6d65616e73ULL, r}));
    KmeansResult res = detail::lloyd(points, cfg, rng);
    if (!have || res.inertia < best.inertia) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

}  // namespace recon
