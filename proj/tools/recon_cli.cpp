// recon: signed-network community refinement from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recon/recon.hpp"

namespace fs = std::filesystem;
using namespace recon;

namespace {

struct ConfigOptions {
  std::string path;
  std::vector<std::string> settings;
  std::optional<double> alpha;
  std::optional<double> softmax_temp;
  std::optional<std::string> sr_mode;
  std::optional<double> purge_threshold;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", path, "key = value configuration file (see `recon config`)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", settings, "override one config key, e.g. --set epochs=50")
        ->type_name("KEY=VALUE");
    cmd->add_option("--alpha", alpha, "structural N-Score weight (default 0.9)");
    cmd->add_option("--softmax-temp", softmax_temp, "structural softmax temperature (default 0.1)");
    cmd->add_option("--sr-mode", sr_mode, "structural assignment: argmax|sample (default argmax)");
    cmd->add_option("--purge-threshold", purge_threshold,
                    "boundary likelihood threshold (default 0.5)");
  }

  RefineConfig build() const {
    RefineConfig cfg = path.empty() ? RefineConfig{} : load_config(path);
    for (const auto& s : settings) apply_setting(cfg, s);
    if (alpha) cfg.structural.alpha = *alpha;
    if (softmax_temp) cfg.structural.softmax_temp = *softmax_temp;
    if (sr_mode) apply_setting(cfg, "sr_mode=" + *sr_mode);
    if (purge_threshold) cfg.boundary.purge_threshold = *purge_threshold;
    cfg.validate();
    return cfg;
  }
};

SpectralConfig spectral_from(const std::optional<std::size_t>& embed_dim,
                             const std::string& laplacian) {
  SpectralConfig sc;
  sc.embed_dim = embed_dim;
  sc.laplacian = laplacian == "plain" ? LaplacianVariant::plain : LaplacianVariant::symmetric;
  return sc;
}

void write_trace(const fs::path& path, const RefineTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  out << "round,ari,modularity,final_loss,purge_candidates,boundary_moves,occupied,seconds\n";
  for (const auto& r : trace.rounds) {
    out << r.round << ',' << (r.ari ? detail::fmt6(*r.ari) : "") << ','
        << (r.modularity ? detail::fmt6(*r.modularity) : "") << ','
        << (r.loss_trace.empty() ? "" : detail::fmt6(r.loss_trace.back())) << ','
        << r.purge_candidates << ',' << r.boundary_moves << ','
        << r.partition.occupied_communities() << ',' << detail::fmt6(r.seconds) << '\n';
  }
}

void write_purge_report(const fs::path& path, const PurgeReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  out << "node,old,new,gain,reason\n";
  for (const auto& r : report.reassignments) {
    out << r.node << ',' << r.old_community << ',' << r.new_community << ',' << r.gain << ','
        << to_string(r.reason) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recon: refine community structure in signed networks"};
  app.require_subcommand(1);
  app.footer(
      "Environment: RECON_WORKERS caps the worker pool used by `experiment`.\n"
      "Run `recon config` to print every configuration key with its default.");

  // generate
  auto* gen = app.add_subcommand("generate", "sample a signed stochastic block model");
  SsbmParams gp;
  std::string gen_dir = ".";
  std::string gen_name;
  gen->add_option("--nodes,-n", gp.num_nodes, "node count |V|")->capture_default_str();
  gen->add_option("--communities,-k", gp.num_communities, "community count |C|")
      ->capture_default_str();
  gen->add_option("--p", gp.edge_prob, "edge probability")->capture_default_str();
  gen->add_option("--mu", gp.noise_ratio, "sign-flip noise ratio")->capture_default_str();
  gen->add_option("--seed", gp.seed, "generator seed")->capture_default_str();
  gen->add_option("--out-dir", gen_dir, "output directory")->capture_default_str();
  gen->add_option("--name", gen_name, "file stem (default SSBM-<n>-<k>-<p>-<mu>-s<seed>)");

  // detect
  auto* det = app.add_subcommand("detect", "built-in signed spectral baseline");
  std::string det_graph, det_out, det_lap = "sym";
  std::size_t det_k = 2;
  std::optional<std::size_t> det_dim;
  std::uint64_t det_seed = 0;
  det->add_option("--graph", det_graph, "edge-list file")->required()->check(CLI::ExistingFile);
  det->add_option("--k", det_k, "community count")->required();
  det->add_option("--embed-dim", det_dim, "spectral embedding width (default k)");
  det->add_option("--laplacian", det_lap, "plain|sym")
      ->check(CLI::IsMember({"plain", "sym"}))
      ->capture_default_str();
  det->add_option("--seed", det_seed, "k-means seed")->capture_default_str();
  det->add_option("--out", det_out, "partition output file")->required();

  // refine
  auto* ref = app.add_subcommand("refine", "refine an initial partition");
  std::string ref_graph, ref_initial, ref_truth, ref_out, ref_trace, ref_emb, ref_report;
  std::size_t ref_k = 0;
  std::uint64_t ref_seed = 0;
  ConfigOptions ref_cfg;
  ref->add_option("--graph", ref_graph, "edge-list file")->required()->check(CLI::ExistingFile);
  ref->add_option("--initial", ref_initial, "partition file, or detect:spectral")->required();
  ref->add_option("--k", ref_k, "community count for --initial detect:spectral");
  ref->add_option("--seed", ref_seed, "baseline seed for detect:spectral")->capture_default_str();
  ref->add_option("--ground-truth", ref_truth, "partition file for per-round ARI")
      ->check(CLI::ExistingFile);
  ref->add_option("--out", ref_out, "refined partition output")->required();
  ref->add_option("--trace", ref_trace, "per-round trace CSV");
  ref->add_option("--emit-embeddings", ref_emb, "final node embeddings CSV");
  ref->add_option("--purge-report", ref_report,
                  "boundary report CSV (node,old,new,gain,reason) of the last round");
  ref_cfg.attach(ref);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate partitions (one per seed) as a CSV row");
  std::string ev_graph, ev_truth, ev_flags, ev_dataset = "dataset", ev_method = "method";
  std::string ev_mod = "positive";
  std::vector<std::string> ev_parts;
  bool ev_header = false;
  ev->add_option("--graph", ev_graph, "edge-list file")->required()->check(CLI::ExistingFile);
  ev->add_option("--partition", ev_parts, "partition file(s), one per seed")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--ground-truth", ev_truth, "ground-truth partition")->check(CLI::ExistingFile);
  ev->add_option("--noise-flags", ev_flags, "noise-flag file (u v flag)")->check(CLI::ExistingFile);
  ev->add_option("--dataset", ev_dataset, "dataset label")->capture_default_str();
  ev->add_option("--method", ev_method, "method label")->capture_default_str();
  ev->add_option("--modularity", ev_mod, "positive|signed")
      ->check(CLI::IsMember({"positive", "signed"}))
      ->capture_default_str();
  ev->add_flag("--header", ev_header, "print the CSV header first");

  // experiment
  auto* ex = app.add_subcommand("experiment", "noise sweep, ablation and comparison studies");
  ex->require_subcommand(1);
  ExperimentSpec spec;
  std::vector<std::size_t> ex_nodes{1000}, ex_comms{5};
  std::vector<double> ex_p{0.01}, ex_mu;
  std::vector<std::uint64_t> ex_seeds{0, 1, 2, 3, 4};
  std::string ex_out = "results";
  std::optional<std::size_t> ex_workers;
  ConfigOptions ex_cfg;
  std::vector<std::string> cmp_graphs, cmp_initials, cmp_truths;
  std::size_t cmp_k = 0;
  std::string cmp_method = "spectral";
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--nodes", ex_nodes, "|V| grid")->delimiter(',')->capture_default_str();
    c->add_option("--communities", ex_comms, "|C| grid")->delimiter(',')->capture_default_str();
    c->add_option("--p", ex_p, "edge-probability grid")->delimiter(',')->capture_default_str();
    c->add_option("--mu", ex_mu, "noise-ratio grid")->delimiter(',');
    c->add_option("--seeds", ex_seeds, "run seeds")->delimiter(',')->capture_default_str();
    c->add_option("--out-dir", ex_out, "output directory")->capture_default_str();
    c->add_option("--workers", ex_workers, "worker threads (default $RECON_WORKERS or all cores)");
    ex_cfg.attach(c);
  };
  auto* sweep = ex->add_subcommand("noise-sweep", "baseline accuracy vs noise ratio");
  add_grid(sweep);
  auto* abl = ex->add_subcommand("ablation", "all 8 step subsets on one SSBM configuration");
  add_grid(abl);
  auto* cmp = ex->add_subcommand("compare", "initial vs refined metrics with gain %");
  add_grid(cmp);
  cmp->add_option("--graph", cmp_graphs, "edge list(s); replaces the SSBM grid")
      ->check(CLI::ExistingFile);
  cmp->add_option("--initial", cmp_initials, "partition file per --graph (imported method output)")
      ->check(CLI::ExistingFile);
  cmp->add_option("--ground-truth", cmp_truths, "ground-truth partition per --graph")
      ->check(CLI::ExistingFile);
  cmp->add_option("--k", cmp_k, "community count for the built-in baseline on --graph");
  cmp->add_option("--method", cmp_method, "method label for the initial partitions")
      ->capture_default_str();

  // config
  auto* conf = app.add_subcommand("config", "print the effective configuration");
  ConfigOptions conf_cfg;
  conf_cfg.attach(conf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const SsbmSample s = generate_ssbm(gp);
      const std::string stem =
          gen_name.empty() ? dataset_name(gp) + "-s" + std::to_string(gp.seed) : gen_name;
      fs::create_directories(gen_dir);
      const fs::path dir(gen_dir);
      write_edge_list(dir / (stem + ".edges"), s.graph);
      write_partition(dir / (stem + ".truth"), s.ground_truth);
      write_noise_flags(dir / (stem + ".noise"), s.graph, s.noise_flags);
      std::cout << stem << ": " << s.graph.num_edges() << " edges (expected "
                << detail::fmt6(expected_edge_count(gp)) << ")\n";
      return 0;
    }
    if (*det) {
      const SignedGraph g = read_edge_list(det_graph);
      write_partition(det_out, baseline_detect(g, det_k, spectral_from(det_dim, det_lap), det_seed));
      return 0;
    }
    if (*ref) {
      const RefineConfig cfg = ref_cfg.build();
      const SignedGraph g = read_edge_list(ref_graph);
      Partition initial;
      if (ref_initial == "detect:spectral") {
        if (ref_k == 0) throw InvalidArgument("--initial detect:spectral needs --k");
        initial = baseline_detect(g, ref_k, cfg.spectral, ref_seed);
      } else {
        initial = import_partition(ref_initial, g.num_nodes());
      }
      std::optional<Partition> truth;
      if (!ref_truth.empty()) truth = import_partition(ref_truth, g.num_nodes());
      const RefineResult res = refine(g, initial, cfg, truth ? &*truth : nullptr);
      write_partition(ref_out, res.partition);
      if (!ref_trace.empty()) write_trace(ref_trace, res.trace);
      if (!ref_emb.empty()) write_embeddings_csv(ref_emb, res.embeddings);
      if (!ref_report.empty()) {
        const PurgeReport* last = nullptr;
        for (const auto& r : res.trace.rounds) {
          if (r.boundary) last = &*r.boundary;
        }
        write_purge_report(ref_report, last ? *last : PurgeReport{});
      }
      return 0;
    }
    if (*ev) {
      const SignedGraph g = read_edge_list(ev_graph);
      std::optional<Partition> truth;
      if (!ev_truth.empty()) truth = import_partition(ev_truth, g.num_nodes());
      std::optional<std::vector<bool>> flags;
      if (!ev_flags.empty()) flags = read_noise_flags(fs::path(ev_flags), g);
      const auto variant =
          ev_mod == "signed" ? ModularityVariant::signed_difference : ModularityVariant::positive;
      MetricReport rep;
      for (const auto& path : ev_parts) {
        const Partition p = import_partition(path, g.num_nodes());
        if (truth) rep.ari.values.push_back(ari(p, *truth));
        try {
          rep.modularity.values.push_back(modularity(g, p, variant));
        } catch (const UndefinedMetric&) {
        }
        if (flags) rep.misaligned_ratio.values.push_back(misaligned_ratio(g, p, *flags));
      }
      if (ev_header) std::cout << eval_header() << '\n';
      std::cout << eval_row(ev_dataset, ev_method, ev_parts.size(), rep) << '\n';
      return 0;
    }
    if (*ex) {
      spec.config = ex_cfg.build();
      spec.baseline = SpectralConfig{};
      spec.baseline.laplacian = spec.config.spectral.laplacian;
      spec.seeds = ex_seeds;
      spec.grid.nodes = ex_nodes;
      spec.grid.communities = ex_comms;
      spec.grid.edge_probs = ex_p;
      if (ex_workers) spec.workers = *ex_workers;
      const fs::path out(ex_out);
      std::vector<RunFailure> failures;
      if (*sweep) {
        spec.kind = ExperimentKind::noise_sweep;
        spec.grid.noise_ratios = ex_mu.empty() ? default_noise_grid() : ex_mu;
        auto res = run_noise_sweep(spec);
        write_noise_sweep(res, out);
        failures = res.failures;
      } else if (*abl) {
        spec.kind = ExperimentKind::ablation;
        spec.grid.noise_ratios = ex_mu.empty() ? std::vector<double>{0.02} : ex_mu;
        auto res = run_ablation(spec);
        write_ablation(res, out);
        failures = res.failures;
      } else {
        spec.kind = ExperimentKind::compare;
        spec.grid.noise_ratios = ex_mu.empty() ? std::vector<double>{0.02} : ex_mu;
        spec.method = cmp_method;
        if (!cmp_initials.empty() && cmp_initials.size() != cmp_graphs.size()) {
          throw InvalidArgument("--initial must be given once per --graph");
        }
        if (!cmp_truths.empty() && cmp_truths.size() != cmp_graphs.size()) {
          throw InvalidArgument("--ground-truth must be given once per --graph");
        }
        for (std::size_t i = 0; i < cmp_graphs.size(); ++i) {
          ExternalDataset ds;
          ds.graph = cmp_graphs[i];
          ds.name = ds.graph.stem().string();
          if (!cmp_initials.empty()) ds.initial = cmp_initials[i];
          if (!cmp_truths.empty()) ds.ground_truth = cmp_truths[i];
          ds.k = cmp_k;
          if (!ds.initial && ds.k == 0) {
            throw InvalidArgument("--graph without --initial needs --k for the built-in baseline");
          }
          spec.datasets.push_back(ds);
        }
        auto res = run_compare(spec);
        write_compare(res, out);
        failures = res.failures;
      }
      report_failures(std::cerr, failures);
      return failures.empty() ? 0 : 1;
    }
    if (*conf) {
      write_config(std::cout, conf_cfg.build());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "recon: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
