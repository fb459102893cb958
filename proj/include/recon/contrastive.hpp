#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recon/errors.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

struct ContrastiveConfig {
  std::size_t embed_dim = 32;
  double tau_n = 0.5;
  double tau_c = 0.5;
  double omega_n = 1.0;
  double omega_c = 1.0;
  double feat_mask_prob = 0.2;
  double comm_mask_prob = 0.2;
  std::size_t epochs = 100;
  double learning_rate = 0.05;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (embed_dim < 1) throw InvalidArgument("embed_dim must be >= 1");
    if (!(tau_n > 0.0) || !(tau_c > 0.0)) throw InvalidArgument("tau_n and tau_c must be > 0");
    if (!(omega_n >= 0.0) || !(omega_c >= 0.0)) throw InvalidArgument("omega weights must be >= 0");
    if (!(omega_n + omega_c > 0.0)) throw InvalidArgument("omega_n + omega_c must be > 0");
    if (!(feat_mask_prob >= 0.0 && feat_mask_prob < 1.0)) {
      throw InvalidArgument("feat_mask_prob must lie in [0, 1)");
    }
    if (!(comm_mask_prob >= 0.0 && comm_mask_prob < 1.0)) {
      throw InvalidArgument("comm_mask_prob must lie in [0, 1)");
    }
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  }
};

/// One stochastic view: masked features and per-node pooling participation.
struct View {
  Eigen::MatrixXd features;     ///< n x f, masked entries exactly 0
  std::vector<bool> pool_mask;  ///< true = node contributes to its community pool
};

/// Two-stage encoder. Stage 1 maps aggregated features f -> d, stage 2 maps
/// [h ; community pool] 2d -> d. Both affine + ReLU.
struct EncoderParams {
  Eigen::MatrixXd w1;  ///< d x f
  Eigen::VectorXd b1;  ///< d
  Eigen::MatrixXd w2;  ///< d x 2d
  Eigen::VectorXd b2;  ///< d

  /// Glorot-uniform weights, zero biases.
  static EncoderParams init(std::size_t in_dim, std::size_t embed_dim, std::uint64_t seed) {
    const auto f = static_cast<Eigen::Index>(in_dim);
    const auto d = static_cast<Eigen::Index>(embed_dim);
    Rng rng(derive_seed(seed, {0x696e6974ULL}));
    auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      Eigen::MatrixXd m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-limit, limit);
      }
      return m;
    };
    EncoderParams p;
    p.w1 = fill(d, f);
    p.b1 = Eigen::VectorXd::Zero(d);
    p.w2 = fill(d, 2 * d);
    p.b2 = Eigen::VectorXd::Zero(d);
    return p;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
  }

  /// Flat view order: w1 (column-major), b1, w2, b2.
  double& at(std::size_t i) {
    auto idx = static_cast<Eigen::Index>(i);
    if (idx < w1.size()) return w1.data()[idx];
    idx -= w1.size();
    if (idx < b1.size()) return b1.data()[idx];
    idx -= b1.size();
    if (idx < w2.size()) return w2.data()[idx];
    idx -= w2.size();
    return b2.data()[idx];
  }

  static EncoderParams zeros_like(const EncoderParams& p) {
    return {Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols()), Eigen::VectorXd::Zero(p.b1.size()),
            Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols()), Eigen::VectorXd::Zero(p.b2.size())};
  }

  bool all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
  }
};

struct ViewEmbeddings {
  Eigen::MatrixXd z;  ///< n x d node embeddings, unit rows
  Eigen::MatrixXd y;  ///< K x d community embeddings, unit rows
};

constexpr double kNormFloor = 1e-12;

namespace detail {

/// Unit-normalizes each row in place; rows with norm below kNormFloor become
/// e_0. Returns the pre-normalization norms (0 marks a floored row).
inline Eigen::VectorXd normalize_rows_floor(Eigen::MatrixXd& m) {
  Eigen::VectorXd norms(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm < kNormFloor) {
      m.row(i).setZero();
      if (m.cols() > 0) m(i, 0) = 1.0;
      norms(i) = 0.0;
    } else {
      m.row(i) /= norm;
      norms(i) = norm;
    }
  }
  return norms;
}

/// Gradient of row normalization: (g - u (u . g)) / norm, zero for floored rows.
inline Eigen::MatrixXd normalize_rows_backward(const Eigen::MatrixXd& unit,
                                               const Eigen::VectorXd& norms,
                                               const Eigen::MatrixXd& grad) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    if (norms(i) == 0.0) continue;
    out.row(i) = (grad.row(i) - unit.row(i) * unit.row(i).dot(grad.row(i))) / norms(i);
  }
  return out;
}

/// Stage-1 input: x_i + mean over same-community neighbors of s_ij * x_j.
inline Eigen::MatrixXd intra_aggregate(const SignedGraph& g, const Partition& p,
                                       const Eigen::MatrixXd& x) {
  Eigen::MatrixXd agg = x;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
    std::size_t count = 0;
    for (const Neighbor& nb : g.neighbors(i)) {
      if (p[nb.node] != p[i]) continue;
      acc += static_cast<double>(nb.sign) * x.row(nb.node);
      ++count;
    }
    if (count > 0) agg.row(i) += acc / static_cast<double>(count);
  }
  return agg;
}

/// Forward intermediates kept for the backward pass.
struct EncoderTape {
  Eigen::MatrixXd agg;   ///< n x f
  Eigen::MatrixXd pre1;  ///< n x d
  Eigen::MatrixXd h;     ///< n x d
  Eigen::MatrixXd u;     ///< K x d raw community pools
  std::vector<double> pool_count;
  Eigen::MatrixXd cat;   ///< n x 2d
  Eigen::MatrixXd pre2;  ///< n x d
  Eigen::VectorXd z_norms;
  Eigen::VectorXd y_norms;
  ViewEmbeddings out;
};

inline EncoderTape encode_tape(const SignedGraph& g, const Partition& p, const View& view,
                               const EncoderParams& params) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto k = static_cast<Eigen::Index>(p.num_communities());
  const auto d = params.w1.rows();
  if (view.features.rows() != n || view.features.cols() != params.w1.cols() ||
      view.pool_mask.size() != g.num_nodes() || params.w2.rows() != d ||
      params.w2.cols() != 2 * d || params.b1.size() != d || params.b2.size() != d) {
    throw InvalidArgument("encode: inconsistent view / parameter shapes");
  }
  check_covers(g, p);
  EncoderTape t;
  t.agg = intra_aggregate(g, p, view.features);
  t.pre1 = (t.agg * params.w1.transpose()).rowwise() + params.b1.transpose();
  t.h = t.pre1.cwiseMax(0.0);

  t.u = Eigen::MatrixXd::Zero(k, d);
  t.pool_count.assign(p.num_communities(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!view.pool_mask[static_cast<std::size_t>(i)]) continue;
    const auto c = p[static_cast<std::size_t>(i)];
    t.u.row(c) += t.h.row(i);
    t.pool_count[c] += 1.0;
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (t.pool_count[static_cast<std::size_t>(c)] > 0.0) {
      t.u.row(c) /= t.pool_count[static_cast<std::size_t>(c)];
    }
  }

  t.cat.resize(n, 2 * d);
  t.cat.leftCols(d) = t.h;
  for (Eigen::Index i = 0; i < n; ++i) t.cat.row(i).tail(d) = t.u.row(p[static_cast<std::size_t>(i)]);
  t.pre2 = (t.cat * params.w2.transpose()).rowwise() + params.b2.transpose();

  t.out.z = t.pre2.cwiseMax(0.0);
  t.z_norms = normalize_rows_floor(t.out.z);
  t.out.y = t.u;
  t.y_norms = normalize_rows_floor(t.out.y);
  return t;
}

/// Accumulates parameter gradients for one view given dL/dZ and dL/dY.
inline void encode_backward(const Partition& p, const View& view, const EncoderParams& params,
                            const EncoderTape& t, const Eigen::MatrixXd& dz,
                            const Eigen::MatrixXd& dy, EncoderParams& grad) {
  const auto n = t.h.rows();
  const auto d = t.h.cols();
  Eigen::MatrixXd dpre2 = normalize_rows_backward(t.out.z, t.z_norms, dz);
  dpre2 = dpre2.cwiseProduct((t.pre2.array() > 0.0).cast<double>().matrix());
  grad.w2 += dpre2.transpose() * t.cat;
  grad.b2 += dpre2.colwise().sum().transpose();
  const Eigen::MatrixXd dcat = dpre2 * params.w2;

  Eigen::MatrixXd dh = dcat.leftCols(d);
  Eigen::MatrixXd du = normalize_rows_backward(t.out.y, t.y_norms, dy);
  for (Eigen::Index i = 0; i < n; ++i) du.row(p[static_cast<std::size_t>(i)]) += dcat.row(i).tail(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!view.pool_mask[static_cast<std::size_t>(i)]) continue;
    const auto c = p[static_cast<std::size_t>(i)];
    dh.row(i) += du.row(c) / t.pool_count[c];
  }
  const Eigen::MatrixXd dpre1 =
      dh.cwiseProduct((t.pre1.array() > 0.0).cast<double>().matrix());
  grad.w1 += dpre1.transpose() * t.agg;
  grad.b1 += dpre1.colwise().sum().transpose();
}

/// Symmetric InfoNCE: mean over anchors of both directions. Writes dL/dA and
/// dL/dB when the pointers are non-null.
inline double info_nce(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tau,
                       Eigen::MatrixXd* da, Eigen::MatrixXd* db) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("contrastive loss: view embeddings differ in shape");
  }
  if (!(tau > 0.0)) throw InvalidArgument("contrastive loss: temperature must be > 0");
  const auto m = a.rows();
  if (m == 0) {
    if (da) *da = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    if (db) *db = Eigen::MatrixXd::Zero(b.rows(), b.cols());
    return 0.0;
  }
  const Eigen::MatrixXd s = (a * b.transpose()) / tau;
  // anchors from A: softmax over each row; anchors from B: softmax over each column
  Eigen::MatrixXd prow(m, m);
  Eigen::MatrixXd pcol(m, m);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double mx = s.row(i).maxCoeff();
    prow.row(i) = (s.row(i).array() - mx).exp().matrix();
    const double z = prow.row(i).sum();
    prow.row(i) /= z;
    loss += -s(i, i) + mx + std::log(z);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mx = s.col(j).maxCoeff();
    pcol.col(j) = (s.col(j).array() - mx).exp().matrix();
    const double z = pcol.col(j).sum();
    pcol.col(j) /= z;
    loss += -s(j, j) + mx + std::log(z);
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(m));
  if (da || db) {
    Eigen::MatrixXd gs = (prow + pcol) * scale;
    gs.diagonal().array() -= 2.0 * scale;
    if (da) *da = gs * b / tau;
    if (db) *db = gs.transpose() * a / tau;
  }
  return loss * scale;
}

}  // namespace detail

/// Both views draw from substreams keyed by (rng_seed, epoch, view_index):
/// features are masked entry-wise (row-major draw order), then pooling
/// membership per node. A community whose members are all masked keeps its
/// highest-degree member (lowest id on ties).
inline View augment(const SignedGraph& g, const Partition& p, const Eigen::MatrixXd& base_features,
                    const ContrastiveConfig& cfg, std::uint64_t epoch, std::uint64_t view_index) {
  check_covers(g, p);
  if (static_cast<std::size_t>(base_features.rows()) != g.num_nodes()) {
    throw InvalidArgument("augment: feature rows != node count");
  }
  View view{base_features, std::vector<bool>(g.num_nodes(), true)};
  Rng rng(derive_seed(cfg.rng_seed, {0x61756dULL, epoch, view_index}));
  if (cfg.feat_mask_prob > 0.0) {
    for (Eigen::Index i = 0; i < view.features.rows(); ++i) {
      for (Eigen::Index j = 0; j < view.features.cols(); ++j) {
        if (rng.bernoulli(cfg.feat_mask_prob)) view.features(i, j) = 0.0;
      }
    }
  }
  if (cfg.comm_mask_prob > 0.0) {
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      if (rng.bernoulli(cfg.comm_mask_prob)) view.pool_mask[i] = false;
    }
    const std::size_t k = p.num_communities();
    std::vector<bool> has_pooled(k, false);
    std::vector<long> keeper(k, -1);
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      const auto c = p[i];
      if (view.pool_mask[i]) has_pooled[c] = true;
      if (keeper[c] < 0 || g.degree(i) > g.degree(static_cast<NodeId>(keeper[c]))) keeper[c] = i;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!has_pooled[c] && keeper[c] >= 0) view.pool_mask[static_cast<std::size_t>(keeper[c])] = true;
    }
  }
  return view;
}

/// Unmasked view of the input (what inference uses).
inline View identity_view(const Eigen::MatrixXd& base_features) {
  return View{base_features, std::vector<bool>(static_cast<std::size_t>(base_features.rows()), true)};
}

/// Stage 1: h_i = relu(W1 (x_i + mean_{j in N(i), same community} s_ij x_j) + b1).
/// Stage 2: u_k = mean of h over pooled members of k;
///          z_i = normalize(relu(W2 [h_i ; u_{c(i)}] + b2)), y_k = normalize(u_k).
inline ViewEmbeddings encode(const SignedGraph& g, const Partition& p, const View& view,
                             const EncoderParams& params) {
  return detail::encode_tape(g, p, view, params).out;
}

inline double node_loss(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2, double tau_n) {
  return detail::info_nce(z1, z2, tau_n, nullptr, nullptr);
}

inline double community_loss(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double tau_c) {
  return detail::info_nce(y1, y2, tau_c, nullptr, nullptr);
}

inline double total_loss(double node, double community, const ContrastiveConfig& cfg) {
  return cfg.omega_n * node + cfg.omega_c * community;
}

/// Weighted node + community loss for a fixed pair of views; fills `grad`
/// (same shapes as params) when non-null.
inline double contrastive_objective(const SignedGraph& g, const Partition& p, const View& v1,
                                    const View& v2, const EncoderParams& params,
                                    const ContrastiveConfig& cfg, EncoderParams* grad = nullptr) {
  const auto t1 = detail::encode_tape(g, p, v1, params);
  const auto t2 = detail::encode_tape(g, p, v2, params);
  Eigen::MatrixXd dz1, dz2, dy1, dy2;
  const bool want = grad != nullptr;
  const double ln = detail::info_nce(t1.out.z, t2.out.z, cfg.tau_n, want ? &dz1 : nullptr,
                                     want ? &dz2 : nullptr);
  const double lc = detail::info_nce(t1.out.y, t2.out.y, cfg.tau_c, want ? &dy1 : nullptr,
                                     want ? &dy2 : nullptr);
  if (want) {
    *grad = EncoderParams::zeros_like(params);
    detail::encode_backward(p, v1, params, t1, cfg.omega_n * dz1, cfg.omega_c * dy1, *grad);
    detail::encode_backward(p, v2, params, t2, cfg.omega_n * dz2, cfg.omega_c * dy2, *grad);
  }
  return total_loss(ln, lc, cfg);
}

struct TrainResult {
  Eigen::MatrixXd z;  ///< n x d, encoding of the unmasked input
  EncoderParams params;
  std::vector<double> loss_trace;  ///< total loss per epoch, before that epoch's update
};

/// Full-batch gradient descent on the two-view objective.
inline TrainResult train(const SignedGraph& g, const Partition& p,
                         const Eigen::MatrixXd& base_features, const ContrastiveConfig& cfg) {
  cfg.validate();
  check_covers(g, p);
  if (static_cast<std::size_t>(base_features.rows()) != g.num_nodes()) {
    throw InvalidArgument("train: feature rows != node count");
  }
  TrainResult res;
  res.params = EncoderParams::init(static_cast<std::size_t>(base_features.cols()), cfg.embed_dim,
                                   cfg.rng_seed);
  res.loss_trace.reserve(cfg.epochs);
  EncoderParams grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const View v1 = augment(g, p, base_features, cfg, epoch, 1);
    const View v2 = augment(g, p, base_features, cfg, epoch, 2);
    const double loss = contrastive_objective(g, p, v1, v2, res.params, cfg, &grad);
    if (!std::isfinite(loss) || !grad.all_finite()) {
      throw NumericError("contrastive training produced a non-finite loss at epoch " +
                         std::to_string(epoch));
    }
    res.loss_trace.push_back(loss);
    res.params.w1 -= cfg.learning_rate * grad.w1;
    res.params.b1 -= cfg.learning_rate * grad.b1;
    res.params.w2 -= cfg.learning_rate * grad.w2;
    res.params.b2 -= cfg.learning_rate * grad.b2;
  }
  res.z = encode(g, p, identity_view(base_features), res.params).z;
  return res;
}

}  // namespace recon
