#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "recon/io.hpp"
#include "recon/metrics.hpp"
#include "recon/pipeline.hpp"
#include "recon/spectral.hpp"
#include "recon/ssbm.hpp"

namespace recon {

/// Worker count: $RECON_WORKERS when set and positive, else hardware threads.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("RECON_WORKERS")) {
    if (auto v = detail::parse_uint<std::size_t>(env); v && *v > 0) return *v;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on a bounded pool. Returns the message of
/// each failed task, keyed by index.
template <typename Fn>
std::map<std::size_t, std::string> parallel_for(std::size_t count, Fn&& fn,
                                                std::size_t workers = worker_count()) {
  std::map<std::size_t, std::string> failures;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        failures[i] = e.what();
      }
    }
  };
  workers = std::min(workers, count);
  if (workers <= 1) {
    work();
    return failures;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return failures;
}

enum class ExperimentKind { noise_sweep, ablation, compare };

struct SsbmGrid {
  std::vector<std::size_t> nodes{1000};
  std::vector<std::size_t> communities{5};
  std::vector<double> edge_probs{0.01};
  std::vector<double> noise_ratios{0.02};

  std::vector<SsbmParams> points() const {
    std::vector<SsbmParams> out;
    for (auto n : nodes) {
      for (auto k : communities) {
        for (auto p : edge_probs) {
          for (auto mu : noise_ratios) out.push_back({n, k, p, mu, 0});
        }
      }
    }
    return out;
  }
};

/// A user-supplied network (e.g. a real-world edge list).
struct ExternalDataset {
  std::string name;
  std::filesystem::path graph;
  std::optional<std::filesystem::path> initial;  ///< imported partition; else built-in baseline
  std::optional<std::filesystem::path> ground_truth;
  std::size_t k = 0;  ///< community count for the built-in baseline
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::compare;
  SsbmGrid grid;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  RefineConfig config;
  SpectralConfig baseline;
  std::vector<ExternalDataset> datasets;  ///< compare only; replaces the SSBM grid when non-empty
  std::string method = "spectral";
  std::size_t workers = worker_count();

  void validate() const {
    if (seeds.empty()) throw InvalidArgument("experiment needs at least one seed");
    if (datasets.empty() && grid.points().empty()) {
      throw InvalidArgument("experiment needs a non-empty SSBM grid or datasets");
    }
  }
};

/// Sample for (grid point, run seed). The SSBM seed is the run seed.
inline SsbmSample sample_for(SsbmParams params, std::uint64_t seed) {
  params.seed = seed;
  return generate_ssbm(params);
}

struct RunFailure {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string message;
};

inline void report_failures(std::ostream& diag, const std::vector<RunFailure>& failures) {
  for (const auto& f : failures) {
    diag << "failed: dataset=" << f.dataset << " seed=" << f.seed << ": " << f.message << '\n';
  }
}

// ---------------------------------------------------------------- noise sweep

struct NoiseSweepRow {
  double mu = 0.0;
  std::uint64_t seed = 0;
  double ari = 0.0;
  double misaligned_ratio = 0.0;
};

struct NoiseSweepSummary {
  double mu = 0.0;
  MetricSummary ari;
  MetricSummary misaligned_ratio;
};

struct NoiseSweepResult {
  std::vector<NoiseSweepRow> rows;          ///< sorted by (mu, seed)
  std::vector<NoiseSweepSummary> summary;   ///< one per mu, ascending
  std::vector<RunFailure> failures;
};

/// mu in {0, 0.01, ..., 0.2}.
inline std::vector<double> default_noise_grid() {
  std::vector<double> mus;
  for (int i = 0; i <= 20; ++i) mus.push_back(i / 100.0);
  return mus;
}

/// Built-in baseline on SSBM for each noise ratio and seed; records ARI and
/// misaligned-edge ratio of the detected partition.
inline NoiseSweepResult run_noise_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.grid.nodes.size() != 1 || spec.grid.communities.size() != 1 ||
      spec.grid.edge_probs.size() != 1) {
    throw InvalidArgument("noise sweep varies mu only: give exactly one n, k and p");
  }
  struct Task {
    double mu;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double mu : spec.grid.noise_ratios) {
    for (auto s : spec.seeds) tasks.push_back({mu, s});
  }
  std::vector<std::optional<NoiseSweepRow>> slots(tasks.size());
  auto failed = parallel_for(
      tasks.size(),
      [&](std::size_t i) {
        SsbmParams params{spec.grid.nodes[0], spec.grid.communities[0], spec.grid.edge_probs[0],
                          tasks[i].mu, tasks[i].seed};
        const SsbmSample sample = generate_ssbm(params);
        const Partition detected =
            baseline_detect(sample.graph, params.num_communities, spec.baseline, tasks[i].seed);
        slots[i] = NoiseSweepRow{tasks[i].mu, tasks[i].seed, ari(detected, sample.ground_truth),
                                 misaligned_ratio(sample.graph, detected, sample.noise_flags)};
      },
      spec.workers);

  NoiseSweepResult res;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (slots[i]) {
      res.rows.push_back(*slots[i]);
    } else {
      SsbmParams params{spec.grid.nodes[0], spec.grid.communities[0], spec.grid.edge_probs[0],
                        tasks[i].mu, tasks[i].seed};
      res.failures.push_back({dataset_name(params), tasks[i].seed, failed[i]});
    }
  }
  std::sort(res.rows.begin(), res.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.mu, a.seed) < std::tie(b.mu, b.seed);
  });
  std::vector<double> mus = spec.grid.noise_ratios;
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
  for (double mu : mus) {
    NoiseSweepSummary s{mu, {}, {}};
    for (const auto& r : res.rows) {
      if (r.mu == mu) {
        s.ari.values.push_back(r.ari);
        s.misaligned_ratio.values.push_back(r.misaligned_ratio);
      }
    }
    res.summary.push_back(std::move(s));
  }
  return res;
}

inline void write_noise_sweep(const NoiseSweepResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto out = detail::open_out(dir / "noise_sweep.csv");
  out << "mu,seed,ari,misaligned_ratio\n";
  for (const auto& r : res.rows) {
    out << detail::fmt6(r.mu) << ',' << r.seed << ',' << detail::fmt6(r.ari) << ','
        << detail::fmt6(r.misaligned_ratio) << '\n';
  }
  auto agg = detail::open_out(dir / "noise_sweep_summary.csv");
  agg << "mu,runs,ari_mean,ari_std,misaligned_mean,misaligned_std\n";
  for (const auto& s : res.summary) {
    agg << detail::fmt6(s.mu) << ',' << s.ari.values.size() << ',' << detail::fmt6(s.ari.mean())
        << ',' << detail::fmt6(s.ari.stddev()) << ',' << detail::fmt6(s.misaligned_ratio.mean())
        << ',' << detail::fmt6(s.misaligned_ratio.stddev()) << '\n';
  }
}

// ------------------------------------------------------------------- ablation

struct AblationSummaryRow {
  bool sr = false;
  bool br = false;
  bool cl = false;
  MetricSummary ari;
};

struct AblationResult {
  std::string dataset;
  std::vector<std::uint64_t> seeds;           ///< successful seeds, ascending
  std::vector<std::vector<AblationRow>> runs;  ///< per successful seed
  std::vector<AblationSummaryRow> summary;    ///< Table-1 row order
  std::vector<RunFailure> failures;
};

/// ablation_matrix per seed on the first grid point, initialized with the
/// built-in baseline.
inline AblationResult run_ablation(const ExperimentSpec& spec) {
  spec.validate();
  const SsbmParams params = spec.grid.points().front();
  std::vector<std::optional<std::vector<AblationRow>>> slots(spec.seeds.size());
  auto failed = parallel_for(
      spec.seeds.size(),
      [&](std::size_t i) {
        const auto seed = spec.seeds[i];
        const SsbmSample sample = sample_for(params, seed);
        const Partition initial =
            baseline_detect(sample.graph, params.num_communities, spec.baseline, seed);
        slots[i] = ablation_matrix(sample.graph, initial, with_run_seed(spec.config, seed),
                                   sample.ground_truth);
      },
      spec.workers);

  AblationResult res;
  res.dataset = dataset_name(params);
  std::vector<std::size_t> order(spec.seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return spec.seeds[a] < spec.seeds[b]; });
  for (auto i : order) {
    if (slots[i]) {
      res.seeds.push_back(spec.seeds[i]);
      res.runs.push_back(*slots[i]);
    } else {
      res.failures.push_back({res.dataset, spec.seeds[i], failed[i]});
    }
  }
  for (std::size_t r = 0; r < kAblationRows.size(); ++r) {
    AblationSummaryRow row{kAblationRows[r][0], kAblationRows[r][1], kAblationRows[r][2], {}};
    for (const auto& run : res.runs) row.ari.values.push_back(run[r].ari);
    res.summary.push_back(std::move(row));
  }
  return res;
}

inline void write_ablation(const AblationResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto out = detail::open_out(dir / "ablation.csv");
  out << "dataset,sr,br,cl,runs,ari_mean,ari_std\n";
  for (const auto& r : res.summary) {
    out << res.dataset << ',' << r.sr << ',' << r.br << ',' << r.cl << ',' << r.ari.values.size()
        << ',' << detail::fmt6(r.ari.mean()) << ',' << detail::fmt6(r.ari.stddev()) << '\n';
  }
}

// -------------------------------------------------------------------- compare

struct CompareRow {
  std::string dataset;
  std::string method;
  std::string metric;  ///< "ari" or "modularity"
  MetricSummary initial;
  MetricSummary refined;

  std::optional<double> gain() const { return gain_percent(initial.mean(), refined.mean()); }
};

struct CompareResult {
  std::vector<CompareRow> rows;  ///< sorted by (dataset, method, metric)
  std::vector<RunFailure> failures;
};

namespace detail {

struct CompareRun {
  std::optional<double> ari_c, ari_r, mod_c, mod_r;
};

inline CompareRun compare_one(const SignedGraph& g, const Partition& initial,
                              const Partition* truth, const RefineConfig& cfg) {
  CompareRun run;
  const Partition refined = refine(g, initial, cfg).partition;
  if (truth) {
    run.ari_c = ari(initial, *truth);
    run.ari_r = ari(refined, *truth);
  }
  try {
    run.mod_c = modularity(g, initial, cfg.modularity);
    run.mod_r = modularity(g, refined, cfg.modularity);
  } catch (const UndefinedMetric&) {
  }
  return run;
}

}  // namespace detail

/// Initial (C) vs refined (C_R) metrics per dataset. SSBM datasets report ARI
/// and modularity; datasets without ground truth report modularity only.
inline CompareResult run_compare(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    std::string dataset;
    std::optional<SsbmParams> ssbm;
    const ExternalDataset* external = nullptr;
    std::uint64_t seed = 0;
  };
  std::vector<Task> tasks;
  if (spec.datasets.empty()) {
    for (const auto& params : spec.grid.points()) {
      for (auto s : spec.seeds) tasks.push_back({dataset_name(params), params, nullptr, s});
    }
  } else {
    for (const auto& ds : spec.datasets) {
      for (auto s : spec.seeds) tasks.push_back({ds.name, std::nullopt, &ds, s});
    }
  }

  std::vector<std::optional<detail::CompareRun>> slots(tasks.size());
  auto failed = parallel_for(
      tasks.size(),
      [&](std::size_t i) {
        const Task& t = tasks[i];
        const RefineConfig cfg = with_run_seed(spec.config, t.seed);
        if (t.ssbm) {
          const SsbmSample sample = sample_for(*t.ssbm, t.seed);
          const Partition initial =
              baseline_detect(sample.graph, t.ssbm->num_communities, spec.baseline, t.seed);
          slots[i] = detail::compare_one(sample.graph, initial, &sample.ground_truth, cfg);
        } else {
          const SignedGraph g = read_edge_list(t.external->graph);
          const Partition initial =
              t.external->initial
                  ? import_partition(*t.external->initial, g.num_nodes())
                  : baseline_detect(g, t.external->k, spec.baseline, t.seed);
          std::optional<Partition> truth;
          if (t.external->ground_truth) {
            truth = import_partition(*t.external->ground_truth, g.num_nodes());
          }
          slots[i] = detail::compare_one(g, initial, truth ? &*truth : nullptr, cfg);
        }
      },
      spec.workers);

  std::map<std::tuple<std::string, std::string>, CompareRow> rows;
  CompareResult res;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!slots[i]) {
      res.failures.push_back({tasks[i].dataset, tasks[i].seed, failed[i]});
      continue;
    }
    const auto& run = *slots[i];
    auto add = [&](const char* metric, std::optional<double> c, std::optional<double> r) {
      if (!c || !r) return;
      auto& row = rows[{tasks[i].dataset, metric}];
      row.dataset = tasks[i].dataset;
      row.method = spec.method;
      row.metric = metric;
      row.initial.values.push_back(*c);
      row.refined.values.push_back(*r);
    };
    add("ari", run.ari_c, run.ari_r);
    add("modularity", run.mod_c, run.mod_r);
  }
  for (auto& [key, row] : rows) res.rows.push_back(std::move(row));
  std::sort(res.failures.begin(), res.failures.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dataset, a.seed) < std::tie(b.dataset, b.seed);
  });
  return res;
}

inline void write_compare(const CompareResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto out = detail::open_out(dir / "compare.csv");
  out << "dataset,method,metric,runs,c_mean,c_std,cr_mean,cr_std,gain_pct\n";
  for (const auto& r : res.rows) {
    out << r.dataset << ',' << r.method << ',' << r.metric << ',' << r.initial.values.size() << ','
        << detail::fmt6(r.initial.mean()) << ',' << detail::fmt6(r.initial.stddev()) << ','
        << detail::fmt6(r.refined.mean()) << ',' << detail::fmt6(r.refined.stddev()) << ',';
    if (auto g = r.gain()) out << detail::fmt6(*g);
    out << '\n';
  }
}

// ----------------------------------------------------------------------- eval

/// One `eval` CSV row. Empty fields where a metric is inapplicable.
inline std::string eval_header() {
  return "dataset,method,seed_count,ari_mean,ari_std,modularity_mean,modularity_std,"
         "misaligned_mean,misaligned_std";
}

inline std::string eval_row(const std::string& dataset, const std::string& method,
                            std::size_t seed_count, const MetricReport& rep) {
  auto pair = [](const MetricSummary& s) {
    if (s.empty()) return std::string(",");
    return detail::fmt6(s.mean()) + "," + detail::fmt6(s.stddev());
  };
  return dataset + "," + method + "," + std::to_string(seed_count) + "," + pair(rep.ari) + "," +
         pair(rep.modularity) + "," + pair(rep.misaligned_ratio);
}

}  // namespace recon
