#pragma once

#include <charconv>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "recon/errors.hpp"
#include "recon/io.hpp"
#include "recon/pipeline.hpp"

namespace recon {

// Key-value configuration: one `key = value` per line, `#` starts a comment.

namespace detail {

inline double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("config key '" + std::string(key) + "': expected a number, got '" +
                          std::string(text) + "'");
  }
  return v;
}

inline std::uint64_t parse_count(std::string_view key, std::string_view text) {
  auto v = parse_uint<std::uint64_t>(text);
  if (!v) {
    throw InvalidArgument("config key '" + std::string(key) +
                          "': expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return *v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config key '" + std::string(key) + "': expected true/false, got '" +
                        std::string(text) + "'");
}

template <typename E>
E parse_choice(std::string_view key, std::string_view text,
               std::initializer_list<std::pair<std::string_view, E>> choices) {
  std::string allowed;
  for (const auto& [name, value] : choices) {
    if (name == text) return value;
    allowed += allowed.empty() ? std::string(name) : "|" + std::string(name);
  }
  throw InvalidArgument("config key '" + std::string(key) + "': expected " + allowed + ", got '" +
                        std::string(text) + "'");
}

struct ConfigKey {
  std::string_view name;
  std::string_view help;
  std::function<void(RefineConfig&, std::string_view)> set;
  std::function<std::string(const RefineConfig&)> get;
};

/// Shortest text that parses back to the same double.
inline std::string num(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline const std::vector<ConfigKey>& config_keys() {
  using C = RefineConfig;
  static const std::vector<ConfigKey> keys = {
      {"alpha", "weight of the N-Score in the structural combined score",
       [](C& c, std::string_view v) { c.structural.alpha = parse_double("alpha", v); },
       [](const C& c) { return num(c.structural.alpha); }},
      {"softmax_temp", "softmax temperature for structural refinement",
       [](C& c, std::string_view v) { c.structural.softmax_temp = parse_double("softmax_temp", v); },
       [](const C& c) { return num(c.structural.softmax_temp); }},
      {"sr_mode", "structural assignment: argmax|sample",
       [](C& c, std::string_view v) {
         c.structural.mode = parse_choice<AssignMode>(
             "sr_mode", v, {{"argmax", AssignMode::argmax}, {"sample", AssignMode::sample}});
       },
       [](const C& c) {
         return std::string(c.structural.mode == AssignMode::argmax ? "argmax" : "sample");
       }},
      {"sr_seed", "seed for sr_mode=sample",
       [](C& c, std::string_view v) { c.structural.rng_seed = parse_count("sr_seed", v); },
       [](const C& c) { return std::to_string(c.structural.rng_seed); }},
      {"purge_threshold", "violating-edge fraction that makes a triangle-free node a candidate",
       [](C& c, std::string_view v) {
         c.boundary.purge_threshold = parse_double("purge_threshold", v);
       },
       [](const C& c) { return num(c.boundary.purge_threshold); }},
      {"max_candidates_fraction", "cap on boundary candidates as a fraction of |V|",
       [](C& c, std::string_view v) {
         c.boundary.max_candidates_fraction = parse_double("max_candidates_fraction", v);
       },
       [](const C& c) { return num(c.boundary.max_candidates_fraction); }},
      {"embed_dim", "contrastive embedding width d",
       [](C& c, std::string_view v) { c.contrastive.embed_dim = parse_count("embed_dim", v); },
       [](const C& c) { return std::to_string(c.contrastive.embed_dim); }},
      {"tau_n", "node-level InfoNCE temperature",
       [](C& c, std::string_view v) { c.contrastive.tau_n = parse_double("tau_n", v); },
       [](const C& c) { return num(c.contrastive.tau_n); }},
      {"tau_c", "community-level InfoNCE temperature",
       [](C& c, std::string_view v) { c.contrastive.tau_c = parse_double("tau_c", v); },
       [](const C& c) { return num(c.contrastive.tau_c); }},
      {"omega_n", "weight of the node-level loss",
       [](C& c, std::string_view v) { c.contrastive.omega_n = parse_double("omega_n", v); },
       [](const C& c) { return num(c.contrastive.omega_n); }},
      {"omega_c", "weight of the community-level loss",
       [](C& c, std::string_view v) { c.contrastive.omega_c = parse_double("omega_c", v); },
       [](const C& c) { return num(c.contrastive.omega_c); }},
      {"feat_mask_prob", "per-entry feature masking probability",
       [](C& c, std::string_view v) {
         c.contrastive.feat_mask_prob = parse_double("feat_mask_prob", v);
       },
       [](const C& c) { return num(c.contrastive.feat_mask_prob); }},
      {"comm_mask_prob", "per-node community-pool masking probability",
       [](C& c, std::string_view v) {
         c.contrastive.comm_mask_prob = parse_double("comm_mask_prob", v);
       },
       [](const C& c) { return num(c.contrastive.comm_mask_prob); }},
      {"epochs", "contrastive gradient-descent epochs per round",
       [](C& c, std::string_view v) { c.contrastive.epochs = parse_count("epochs", v); },
       [](const C& c) { return std::to_string(c.contrastive.epochs); }},
      {"learning_rate", "contrastive gradient-descent step size",
       [](C& c, std::string_view v) {
         c.contrastive.learning_rate = parse_double("learning_rate", v);
       },
       [](const C& c) { return num(c.contrastive.learning_rate); }},
      {"cl_seed", "seed for views and encoder initialization",
       [](C& c, std::string_view v) { c.contrastive.rng_seed = parse_count("cl_seed", v); },
       [](const C& c) { return std::to_string(c.contrastive.rng_seed); }},
      {"kmeans_max_iters", "Lloyd iterations per restart",
       [](C& c, std::string_view v) { c.kmeans.max_iters = parse_count("kmeans_max_iters", v); },
       [](const C& c) { return std::to_string(c.kmeans.max_iters); }},
      {"kmeans_tol", "centroid-shift stopping tolerance",
       [](C& c, std::string_view v) { c.kmeans.tol = parse_double("kmeans_tol", v); },
       [](const C& c) { return num(c.kmeans.tol); }},
      {"kmeans_init", "k-means initialization: kmeanspp|forgy",
       [](C& c, std::string_view v) {
         c.kmeans.init = parse_choice<KmeansInit>(
             "kmeans_init", v, {{"kmeanspp", KmeansInit::kmeanspp}, {"forgy", KmeansInit::forgy}});
       },
       [](const C& c) {
         return std::string(c.kmeans.init == KmeansInit::kmeanspp ? "kmeanspp" : "forgy");
       }},
      {"kmeans_restarts", "k-means restarts (best inertia kept)",
       [](C& c, std::string_view v) { c.kmeans.restarts = parse_count("kmeans_restarts", v); },
       [](const C& c) { return std::to_string(c.kmeans.restarts); }},
      {"kmeans_seed", "k-means seed",
       [](C& c, std::string_view v) { c.kmeans.seed = parse_count("kmeans_seed", v); },
       [](const C& c) { return std::to_string(c.kmeans.seed); }},
      {"laplacian", "signed Laplacian variant for spectral inputs: plain|sym",
       [](C& c, std::string_view v) {
         c.spectral.laplacian = parse_choice<LaplacianVariant>(
             "laplacian", v,
             {{"plain", LaplacianVariant::plain}, {"sym", LaplacianVariant::symmetric}});
       },
       [](const C& c) {
         return std::string(c.spectral.laplacian == LaplacianVariant::plain ? "plain" : "sym");
       }},
      {"eig_tolerance", "eigenpair residual tolerance (iterative solver)",
       [](C& c, std::string_view v) { c.spectral.eig_tolerance = parse_double("eig_tolerance", v); },
       [](const C& c) { return num(c.spectral.eig_tolerance); }},
      {"max_eig_iters", "block iterations for the iterative eigensolver",
       [](C& c, std::string_view v) { c.spectral.max_eig_iters = parse_count("max_eig_iters", v); },
       [](const C& c) { return std::to_string(c.spectral.max_eig_iters); }},
      {"dense_threshold", "largest |V| solved with the dense eigensolver",
       [](C& c, std::string_view v) {
         c.spectral.dense_threshold = parse_count("dense_threshold", v);
       },
       [](const C& c) { return std::to_string(c.spectral.dense_threshold); }},
      {"min_feature_dim", "contrastive input width is max(K, min_feature_dim)",
       [](C& c, std::string_view v) { c.min_feature_dim = parse_count("min_feature_dim", v); },
       [](const C& c) { return std::to_string(c.min_feature_dim); }},
      {"max_rounds", "refinement rounds T",
       [](C& c, std::string_view v) { c.max_rounds = parse_count("max_rounds", v); },
       [](const C& c) { return std::to_string(c.max_rounds); }},
      {"convergence", "stopping rule: fixed-rounds|assignment-stable",
       [](C& c, std::string_view v) {
         c.convergence = parse_choice<Convergence>(
             "convergence", v,
             {{"fixed-rounds", Convergence::fixed_rounds},
              {"assignment-stable", Convergence::assignment_stable}});
       },
       [](const C& c) {
         return std::string(c.convergence == Convergence::fixed_rounds ? "fixed-rounds"
                                                                       : "assignment-stable");
       }},
      {"enable_sr", "run structural refinement",
       [](C& c, std::string_view v) { c.enable_sr = parse_bool("enable_sr", v); },
       [](const C& c) { return std::string(c.enable_sr ? "true" : "false"); }},
      {"enable_br", "run boundary refinement",
       [](C& c, std::string_view v) { c.enable_br = parse_bool("enable_br", v); },
       [](const C& c) { return std::string(c.enable_br ? "true" : "false"); }},
      {"enable_cl", "run contrastive learning + k-means",
       [](C& c, std::string_view v) { c.enable_cl = parse_bool("enable_cl", v); },
       [](const C& c) { return std::string(c.enable_cl ? "true" : "false"); }},
      {"modularity", "modularity variant for reports: positive|signed",
       [](C& c, std::string_view v) {
         c.modularity = parse_choice<ModularityVariant>(
             "modularity", v,
             {{"positive", ModularityVariant::positive},
              {"signed", ModularityVariant::signed_difference}});
       },
       [](const C& c) {
         return std::string(c.modularity == ModularityVariant::positive ? "positive" : "signed");
       }},
  };
  return keys;
}

}  // namespace detail

/// Applies one `key=value` (or `key = value`) assignment.
inline void apply_setting(RefineConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidArgument("expected key=value, got '" + std::string(assignment) + "'");
  }
  const auto key = detail::trim(assignment.substr(0, eq));
  const auto value = detail::trim(assignment.substr(eq + 1));
  for (const auto& k : detail::config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

inline RefineConfig parse_config(std::istream& in, RefineConfig cfg = {},
                                 const std::string& source = "<config>") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    try {
      apply_setting(cfg, text);
    } catch (const InvalidArgument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return cfg;
}

inline RefineConfig load_config(const std::filesystem::path& path, RefineConfig cfg = {}) {
  auto in = detail::open_in(path);
  return parse_config(in, std::move(cfg), path.string());
}

/// Every key with its current value, one per line, preceded by its help text.
inline void write_config(std::ostream& out, const RefineConfig& cfg) {
  for (const auto& k : detail::config_keys()) {
    out << "# " << k.help << '\n' << k.name << " = " << k.get(cfg) << '\n';
  }
}

}  // namespace recon
