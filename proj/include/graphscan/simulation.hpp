#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphscan/detectors.hpp"
#include "graphscan/errors.hpp"
#include "graphscan/graph.hpp"
#include "graphscan/parallel.hpp"
#include "graphscan/random.hpp"

namespace graphscan {

// ---------------------------------------------------------------------------
// Graph families

struct BbtSpec {
  int depth = 7;
};

struct LatticeSpec {
  Index side = 16;
  bool periodic = false;
};

struct KronSpec {
  Graph base = two_triangles();
  int levels = 2;
  std::string base_label = "two-triangles";
};

using GraphSpec = std::variant<BbtSpec, LatticeSpec, KronSpec>;

inline Graph make_graph(const GraphSpec& spec) {
  return std::visit(
      [](const auto& s) -> Graph {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BbtSpec>) {
          return gen_bbt(s.depth);
        } else if constexpr (std::is_same_v<T, LatticeSpec>) {
          return gen_lattice(s.side, s.periodic);
        } else {
          return gen_kron_multiscale(s.base, s.levels);
        }
      },
      spec);
}

/// Which canonical cluster to activate.
struct ClusterParams {
  Index bbt_root = 3;             // a depth-2 node of the tree (3..6)
  std::vector<Index> kron_half;   // base-graph vertices; empty means the first p/2
};

/// BBT: subtree rooted at a depth-2 node (2^(l-1) - 1 vertices).
/// Lattice: the (p/2) x (p/2) square in the top-left corner.
/// Kronecker: vertices whose coarsest-scale index lies in a set of base
/// vertices (default: the first half of the base graph).
inline Cluster canonical_cluster(const Graph& g, const GraphSpec& family, const ClusterParams& params = {}) {
  if (!(make_graph(family) == g)) throw InvalidArgument("graph was not produced by the given family generator");
  const Index n = g.size();
  if (const auto* bbt = std::get_if<BbtSpec>(&family)) {
    if (bbt->depth < 2) throw InvalidArgument("tree depth must be at least 2 to have a depth-2 subtree");
    if (params.bbt_root < 3 || params.bbt_root > 6) throw InvalidArgument("subtree root must be a depth-2 node (3..6)");
    std::vector<Index> members;
    std::vector<Index> frontier{params.bbt_root};
    while (!frontier.empty()) {
      const Index v = frontier.back();
      frontier.pop_back();
      members.push_back(v);
      for (Index child : {2 * v + 1, 2 * v + 2}) {
        if (child < n) frontier.push_back(child);
      }
    }
    return Cluster(n, std::move(members));
  }
  if (const auto* lat = std::get_if<LatticeSpec>(&family)) {
    const Index half = lat->side / 2;
    std::vector<Index> members;
    for (Index r = 0; r < half; ++r)
      for (Index c = 0; c < half; ++c) members.push_back(r * lat->side + c);
    return Cluster(n, std::move(members));
  }
  const auto& kron = std::get<KronSpec>(family);
  const Index p = kron.base.size();
  std::vector<Index> half = params.kron_half;
  if (half.empty()) {
    for (Index i = 0; i < p / 2; ++i) half.push_back(i);
  }
  std::vector<bool> in_half(p, false);
  for (Index v : half) {
    if (v >= p) throw InvalidArgument("kronecker cluster vertex out of range of the base graph");
    in_half[v] = true;
  }
  const Index block = n / p;  // p^(levels - 1)
  std::vector<Index> members;
  for (Index v = 0; v < n; ++v) {
    if (in_half[v / block]) members.push_back(v);
  }
  return Cluster(n, std::move(members));
}

// ---------------------------------------------------------------------------
// Signals

/// beta = mu 1 + delta 1_C. No cluster means the null hypothesis.
struct SignalSpec {
  double mu = 0.0;
  double delta = 0.0;
  std::optional<Cluster> cluster;

  bool is_null() const { return !cluster.has_value(); }

  void validate(Index n) const {
    if (cluster) {
      if (delta == 0.0) throw InvalidArgument("alternative signal needs a nonzero gap");
      if (cluster->graph_size() != n) throw InvalidArgument("cluster and graph sizes differ");
    }
  }

  Eigen::VectorXd mean(Index n) const {
    validate(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), mu);
    if (cluster) {
      for (Index v : cluster->members()) beta[static_cast<Eigen::Index>(v)] += delta;
    }
    return beta;
  }
};

/// y = beta + sigma eps with eps drawn from `stream`.
inline Eigen::VectorXd sample_observation(const SignalSpec& spec, Index n, double sigma, NormalStream& stream) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
  Eigen::VectorXd y = spec.mean(n);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * stream.next_normal();
  return y;
}

/// sqrt(|C| |C^c| / n) |delta| / sigma.
inline double snr(const SignalSpec& spec, double sigma, Index n) {
  if (spec.is_null()) throw InvalidArgument("snr is undefined for a null signal");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  spec.validate(n);
  const double k = static_cast<double>(spec.cluster->size());
  return std::sqrt(k * (static_cast<double>(n) - k) / static_cast<double>(n)) * std::abs(spec.delta) / sigma;
}

// ---------------------------------------------------------------------------
// ROC estimation

struct RocPoint {
  double threshold;
  double size;
  double power;
};

/// Points sorted by increasing threshold; size and power are the fractions of
/// null and alternative statistics strictly above the threshold.
struct RocCurve {
  std::vector<RocPoint> points;
};

/// Fraction of `sorted` (ascending) strictly greater than t.
inline double exceedance(const std::vector<double>& sorted, double t) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

/// Empirical ROC sweeping every distinct null statistic as a threshold.
inline RocCurve roc_from_samples(std::vector<double> null_stats, std::vector<double> alt_stats) {
  if (null_stats.empty() || alt_stats.empty()) throw InvalidArgument("roc needs null and alternative samples");
  std::sort(null_stats.begin(), null_stats.end());
  std::sort(alt_stats.begin(), alt_stats.end());
  RocCurve curve;
  for (std::size_t i = 0; i < null_stats.size(); ++i) {
    if (i > 0 && null_stats[i] == null_stats[i - 1]) continue;
    const double t = null_stats[i];
    curve.points.push_back({t, exceedance(null_stats, t), exceedance(alt_stats, t)});
  }
  return curve;
}

/// Trapezoidal area under power versus size, with (0, power at the largest
/// threshold) and (1, 1) added as endpoints.
inline double auc(const RocCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size() + 2);
  if (!curve.points.empty()) {
    const auto top = std::max_element(curve.points.begin(), curve.points.end(),
                                      [](const RocPoint& a, const RocPoint& b) { return a.threshold < b.threshold; });
    pts.emplace_back(0.0, top->power);
  }
  for (const auto& p : curve.points) pts.emplace_back(p.size, p.power);
  pts.emplace_back(1.0, 1.0);
  std::stable_sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * 0.5 * (pts[i].second + pts[i - 1].second);
  }
  return area;
}

struct ExperimentConfig {
  GraphSpec graph = BbtSpec{};
  ClusterParams cluster;
  double mu = 0.0;
  double delta = 0.8;   // 0 makes the alternative identical to the null
  double sigma = 1.0;
  double rho = 0.0;
  Index reps_null = 500;
  Index reps_alt = 500;
  std::uint64_t seed = 1;
  std::vector<DetectorKind> detectors = {DetectorKind::sss, DetectorKind::energy, DetectorKind::edge,
                                         DetectorKind::glr_unconstrained};
  bool require_connected = false;

  void validate() const {
    if (reps_null < 1 || reps_alt < 1) throw InvalidArgument("replicate counts must be at least 1");
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    if (detectors.empty()) throw InvalidArgument("no detectors requested");
  }
};

struct DetectorRun {
  Detector detector;
  std::vector<double> null_stats;  // by replicate index
  std::vector<double> alt_stats;
  RocCurve curve;
};

struct ExperimentResult {
  Graph graph;
  SignalSpec alternative;
  std::vector<DetectorRun> runs;
};

/// Stream ids: null replicate r uses (seed, r), alternative replicate r uses
/// (seed, kAltStreamOffset + r). Every detector sees the same observations.
inline constexpr std::uint64_t kAltStreamOffset = std::uint64_t{1} << 40;

inline ExperimentResult run_roc(const ExperimentConfig& config, unsigned threads = 1) {
  config.validate();
  ExperimentResult result;
  result.graph = make_graph(config.graph);
  const Graph& g = result.graph;
  const Index n = g.size();

  const SignalSpec null_spec{config.mu, 0.0, std::nullopt};
  if (config.delta == 0.0) {
    result.alternative = null_spec;
  } else {
    result.alternative = SignalSpec{config.mu, config.delta, canonical_cluster(g, config.graph, config.cluster)};
  }
  const SignalSpec& alt_spec = result.alternative;

  std::vector<Statistic> stats;
  for (auto kind : config.detectors) {
    Detector d{kind, config.rho, config.require_connected};
    stats.push_back(make_statistic(d, g));
    result.runs.push_back(DetectorRun{d, std::vector<double>(config.reps_null), std::vector<double>(config.reps_alt), {}});
  }

  const Index total = config.reps_null + config.reps_alt;
  parallel_for(total, threads, [&](std::size_t i) {
    const bool is_null = i < config.reps_null;
    const std::uint64_t r = is_null ? i : i - config.reps_null;
    NormalStream stream(config.seed, is_null ? r : kAltStreamOffset + r);
    const Eigen::VectorXd y = sample_observation(is_null ? null_spec : alt_spec, n, config.sigma, stream);
    for (std::size_t d = 0; d < stats.size(); ++d) {
      (is_null ? result.runs[d].null_stats : result.runs[d].alt_stats)[r] = stats[d](y);
    }
  });

  for (auto& run : result.runs) run.curve = roc_from_samples(run.null_stats, run.alt_stats);
  return result;
}

}  // namespace graphscan
