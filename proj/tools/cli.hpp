#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphscan/graphscan.hpp"

namespace graphscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Usage problem detected after parsing (bad flag combination).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Eigen::VectorXd read_signal(const std::string& path, Index expected) {
  std::ifstream in(path);
  if (!in) throw IoError("--signal: cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    values.push_back(parse_double(line, "--signal " + path + " line " + std::to_string(lineno)));
  }
  if (values.size() != expected) {
    throw FormatError("--signal " + path + ": has " + std::to_string(values.size()) + " values but the graph has " +
                      std::to_string(expected) + " vertices");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct FamilyOptions {
  std::string family;
  int depth = 7;
  Index side = 16;
  bool periodic = false;
  int levels = 2;
  std::string base = "two-triangles";

  void add_to(CLI::App* app) {
    app->add_option("--family", family, "Graph family")->check(CLI::IsMember({"bbt", "lattice", "kron"}))->required();
    app->add_option("--depth", depth, "Balanced binary tree depth (bbt)");
    app->add_option("--side", side, "Lattice side length p (lattice)");
    app->add_flag("--periodic", periodic, "Wrap the lattice into a torus (lattice)");
    app->add_option("--levels", levels, "Number of scales (kron)");
    app->add_option("--base", base, "Base graph: two-triangles or an edge-list file (kron)");
  }

  GraphSpec spec() const {
    if (family == "bbt") return BbtSpec{depth};
    if (family == "lattice") return LatticeSpec{side, periodic};
    KronSpec k;
    k.levels = levels;
    k.base_label = base;
    if (base != "two-triangles") {
      if (!std::filesystem::exists(base)) throw UsageError("--base: file '" + base + "' does not exist");
      k.base = load_edge_list(base);
    }
    return k;
  }
};

inline std::string detector_help() { return "Detector: sss, energy, edge, glr_exact, glr_unconstrained"; }

/// Runs the command line tool. Results go to `out`, the resolved
/// configuration and diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Change-point detection over graphs with the spectral scan statistic", "graphscan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // gen-graph
  FamilyOptions gen_family;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-graph", "Write a generated graph as an edge list");
  gen_family.add_to(gen);
  gen->add_option("--out", gen_out, "Output edge-list file")->required();

  // spectrum
  std::string spec_graph, spec_out, spec_vectors;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Write the Laplacian eigenvalues as CSV");
  spectrum_cmd->add_option("--graph", spec_graph, "Edge-list file")->required()->check(CLI::ExistingFile);
  spectrum_cmd->add_option("--out", spec_out, "Eigenvalue CSV (one per line)")->required();
  spectrum_cmd->add_option("--vectors-out", spec_vectors, "Eigenvector CSV (one eigenvector per line)");

  // scan
  std::string scan_graph, scan_signal, scan_stat;
  std::optional<double> scan_rho;
  bool scan_connected = false;
  auto* scan = app.add_subcommand("scan", "Print one test statistic for an observed signal");
  scan->add_option("--graph", scan_graph, "Edge-list file")->required()->check(CLI::ExistingFile);
  scan->add_option("--signal", scan_signal, "Signal file, one value per line")->required()->check(CLI::ExistingFile);
  scan->add_option("--stat", scan_stat, detector_help())->required();
  scan->add_option("--rho", scan_rho, "Cut-sparsity level (sss, glr_exact)");
  scan->add_flag("--connected", scan_connected, "glr_exact: only connected clusters");

  // calibrate
  std::string cal_graph, cal_stat;
  std::optional<double> cal_rho;
  bool cal_connected = false;
  double cal_sigma = 1.0, cal_alpha = 0.05;
  Index cal_reps = 1000;
  std::uint64_t cal_seed = 1;
  unsigned cal_threads = 0;
  auto* calibrate = app.add_subcommand("calibrate", "Print the Monte Carlo null threshold at level alpha");
  calibrate->add_option("--graph", cal_graph, "Edge-list file")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--stat", cal_stat, detector_help())->required();
  calibrate->add_option("--rho", cal_rho, "Cut-sparsity level (sss, glr_exact)");
  calibrate->add_flag("--connected", cal_connected, "glr_exact: only connected clusters");
  calibrate->add_option("--sigma", cal_sigma, "Noise standard deviation")->capture_default_str();
  calibrate->add_option("--alpha", cal_alpha, "Target false-alarm rate")->capture_default_str();
  calibrate->add_option("--reps", cal_reps, "Null replicates (>= 100)")->capture_default_str();
  calibrate->add_option("--seed", cal_seed, "Random seed")->capture_default_str();
  calibrate->add_option("--threads", cal_threads, "Worker cap (0 = all cores); output does not depend on it");

  // experiment
  std::string exp_config, exp_preset, exp_out_dir;
  std::optional<std::uint64_t> exp_seed;
  std::optional<Index> exp_reps_null, exp_reps_alt;
  unsigned exp_threads = 0;
  auto* experiment = app.add_subcommand(
      "experiment",
      "Monte Carlo ROC experiment. Writes roc_<detector>.csv and roc.svg.\n"
      "Config files hold 'key = value' lines: preset, family (bbt|lattice|kron), depth, side, periodic,\n"
      "base (two-triangles|<edge list>), levels, bbt_root, kron_half, mu, delta, sigma,\n"
      "rho (<c>|<c>/n|<c>/sqrt(n)), reps_null, reps_alt, seed, detectors (comma list), connected.");
  auto* config_opt = experiment->add_option("--config", exp_config, "Experiment config file")->check(CLI::ExistingFile);
  experiment->add_option("--preset", exp_preset, "Preset: bbt-fig1, lattice-fig1, kron-fig1")
      ->check(CLI::IsMember({"bbt-fig1", "lattice-fig1", "kron-fig1"}))
      ->excludes(config_opt);
  experiment->add_option("--seed", exp_seed, "Override the seed");
  experiment->add_option("--reps-null", exp_reps_null, "Override the null replicate count");
  experiment->add_option("--reps-alt", exp_reps_alt, "Override the alternative replicate count");
  experiment->add_option("--out-dir", exp_out_dir, "Output directory")->required();
  experiment->add_option("--threads", exp_threads, "Worker cap (0 = all cores); output does not depend on it");

  // bounds
  std::string b_graph;
  BoundsRequest b_req;
  std::optional<Index> b_max_cluster, b_cluster_size;
  std::optional<double> b_delta;
  auto* bounds_cmd = app.add_subcommand("bounds", "Print spectral detectability bounds");
  bounds_cmd->add_option("--graph", b_graph, "Edge-list file")->required()->check(CLI::ExistingFile);
  bounds_cmd->add_option("--rho", b_req.rho, "Cut-sparsity level")->required();
  bounds_cmd->add_option("--sigma", b_req.sigma, "Noise standard deviation")->capture_default_str();
  bounds_cmd->add_option("--conf", b_req.conf, "Null bound failure probability in (0,1)")->capture_default_str();
  bounds_cmd->add_option("--max-cluster", b_max_cluster, "Largest cluster size <= n/2 (edge bound)");
  bounds_cmd->add_option("--delta", b_delta, "Signal gap (with --cluster-size: eta and non-centrality)");
  bounds_cmd->add_option("--cluster-size", b_cluster_size, "Cluster size |C|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "graphscan: " << e.what() << '\n';
    return kExitUsage;
  }

  auto detector_from = [](const std::string& stat, std::optional<double> rho, bool connected) {
    Detector d;
    try {
      d.kind = parse_detector_kind(stat);
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--stat: ") + e.what());
    }
    if (d.needs_rho() && !rho) throw UsageError("--rho is required for --stat " + stat);
    d.rho = rho.value_or(0.0);
    d.require_connected = connected;
    return d;
  };

  try {
    if (gen->parsed()) {
      const GraphSpec spec = gen_family.spec();
      err << "# gen-graph\nfamily = " << gen_family.family << "\ndepth = " << gen_family.depth
          << "\nside = " << gen_family.side << "\nperiodic = " << (gen_family.periodic ? "true" : "false")
          << "\nlevels = " << gen_family.levels << "\nbase = " << gen_family.base << "\nout = " << gen_out << '\n';
      const Graph g = make_graph(spec);
      save_edge_list(gen_out, g);
    } else if (spectrum_cmd->parsed()) {
      err << "# spectrum\ngraph = " << spec_graph << "\nout = " << spec_out << '\n';
      if (!spec_vectors.empty()) err << "vectors_out = " << spec_vectors << '\n';
      const Graph g = load_edge_list(spec_graph);
      const Spectrum s = laplacian_spectrum(g, !spec_vectors.empty());
      std::ofstream vals(spec_out);
      if (!vals) throw IoError("--out: cannot open '" + spec_out + "' for writing");
      write_eigenvalues_csv(vals, s);
      if (!spec_vectors.empty()) {
        std::ofstream vecs(spec_vectors);
        if (!vecs) throw IoError("--vectors-out: cannot open '" + spec_vectors + "' for writing");
        write_eigenvectors_csv(vecs, s);
      }
    } else if (scan->parsed()) {
      const Detector d = detector_from(scan_stat, scan_rho, scan_connected);
      err << "# scan\ngraph = " << scan_graph << "\nsignal = " << scan_signal << "\nstat = " << scan_stat;
      if (scan_rho) err << "\nrho = " << fmt17(*scan_rho);
      err << "\nconnected = " << (scan_connected ? "true" : "false") << '\n';
      const Graph g = load_edge_list(scan_graph);
      if (d.kind == DetectorKind::sss && !g.connected()) throw InvalidArgument("--graph " + scan_graph + ": graph is not connected");
      const Eigen::VectorXd y = read_signal(scan_signal, g.size());
      out << fmt17(make_statistic(d, g)(y)) << '\n';
    } else if (calibrate->parsed()) {
      const Detector d = detector_from(cal_stat, cal_rho, cal_connected);
      err << "# calibrate\ngraph = " << cal_graph << "\nstat = " << cal_stat;
      if (cal_rho) err << "\nrho = " << fmt17(*cal_rho);
      err << "\nsigma = " << fmt17(cal_sigma) << "\nalpha = " << fmt17(cal_alpha) << "\nreps = " << cal_reps
          << "\nseed = " << cal_seed << "\nthreads = " << cal_threads << '\n';
      const Graph g = load_edge_list(cal_graph);
      out << fmt17(calibrate_threshold(d, g, cal_sigma, cal_alpha, cal_reps, cal_seed, cal_threads)) << '\n';
    } else if (experiment->parsed()) {
      if (exp_config.empty() && exp_preset.empty()) throw UsageError("experiment needs --config or --preset");
      ConfigBuilder builder;
      if (!exp_preset.empty()) builder.apply_preset(exp_preset);
      if (!exp_config.empty()) builder.apply_file(exp_config);
      if (exp_seed) builder.set("seed", std::to_string(*exp_seed));
      if (exp_reps_null) builder.set("reps_null", std::to_string(*exp_reps_null));
      if (exp_reps_alt) builder.set("reps_alt", std::to_string(*exp_reps_alt));
      const ExperimentConfig cfg = builder.build();
      err << "# experiment\n";
      write_config(err, cfg);
      err << "out_dir = " << exp_out_dir << "\nthreads = " << exp_threads << '\n';

      const ExperimentResult result = run_roc(cfg, exp_threads);
      std::filesystem::create_directories(exp_out_dir);
      std::vector<NamedCurve> named;
      for (const auto& run : result.runs) {
        const std::string name(to_string(run.detector.kind));
        const auto path = std::filesystem::path(exp_out_dir) / ("roc_" + name + ".csv");
        std::ofstream csv(path);
        if (!csv) throw IoError("--out-dir: cannot write '" + path.string() + "'");
        write_roc_csv(csv, run.curve);
        named.push_back({name, run.curve});
        out << "auc_" << name << " = " << fmt17(auc(run.curve)) << '\n';
      }
      const auto svg_path = std::filesystem::path(exp_out_dir) / "roc.svg";
      std::ofstream svg(svg_path);
      if (!svg) throw IoError("--out-dir: cannot write '" + svg_path.string() + "'");
      write_roc_svg(svg, named, exp_preset.empty() ? std::string("ROC") : exp_preset);
    } else if (bounds_cmd->parsed()) {
      b_req.max_cluster = b_max_cluster;
      b_req.delta = b_delta;
      b_req.cluster_size = b_cluster_size;
      err << "# bounds\ngraph = " << b_graph << "\nrho = " << fmt17(b_req.rho) << "\nsigma = " << fmt17(b_req.sigma)
          << "\nconf = " << fmt17(b_req.conf) << '\n';
      const Graph g = load_edge_list(b_graph);
      if (!g.connected()) throw InvalidArgument("--graph " + b_graph + ": graph is not connected");
      write_bounds_report(out, make_bounds_report(laplacian_spectrum(g, false), b_req));
    }
  } catch (const UsageError& e) {
    err << "graphscan: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyClassError& e) {
    err << "graphscan: --rho: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "graphscan: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace graphscan::cli
