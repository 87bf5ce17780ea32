#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphscan/errors.hpp"
#include "graphscan/graph.hpp"
#include "graphscan/parallel.hpp"
#include "graphscan/random.hpp"
#include "graphscan/spectral.hpp"

namespace graphscan {

enum class DetectorKind { sss, energy, edge, glr_exact, glr_unconstrained };

inline std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::sss: return "sss";
    case DetectorKind::energy: return "energy";
    case DetectorKind::edge: return "edge";
    case DetectorKind::glr_exact: return "glr_exact";
    case DetectorKind::glr_unconstrained: return "glr_unconstrained";
  }
  return "unknown";
}

inline DetectorKind parse_detector_kind(std::string_view name) {
  for (auto kind : {DetectorKind::sss, DetectorKind::energy, DetectorKind::edge, DetectorKind::glr_exact,
                    DetectorKind::glr_unconstrained}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown detector '" + std::string(name) + "'");
}

struct Detector {
  DetectorKind kind = DetectorKind::sss;
  double rho = 0.0;                // sss and glr_exact
  bool require_connected = false;  // glr_exact only

  bool needs_rho() const { return kind == DetectorKind::sss || kind == DetectorKind::glr_exact; }

  void validate() const {
    if (needs_rho() && !(rho > 0.0)) {
      throw InvalidArgument("detector '" + std::string(to_string(kind)) + "' needs rho > 0");
    }
  }
};

inline constexpr Index kGlrExactMaxVertices = 22;

/// ||y~||^2.
inline double energy_stat(const Eigen::VectorXd& y) { return center(y).squaredNorm(); }

/// max over edges of |y_u - y_v|; edge weights are ignored.
inline double edge_stat(const Graph& g, const Eigen::VectorXd& y) {
  if (static_cast<Index>(y.size()) != g.size()) throw InvalidArgument("observation length differs from graph size");
  double best = 0.0;
  for (const auto& e : g.edges()) {
    best = std::max(best, std::abs(y[static_cast<Eigen::Index>(e.u)] - y[static_cast<Eigen::Index>(e.v)]));
  }
  return best;
}

/// (n / (|C| |C^c|)) (sum_{v in C} y~_v)^2, evaluated on the side of the
/// bipartition that excludes vertex n-1 and summed in index order, so a
/// cluster and its complement give bit-identical values.
inline double cluster_glr(const Eigen::VectorXd& ytilde, const std::vector<bool>& mask) {
  const Index n = static_cast<Index>(ytilde.size());
  const bool flip = mask[n - 1];
  double sum = 0.0;
  Index k = 0;
  for (Index v = 0; v < n; ++v) {
    if (mask[v] != flip) {
      sum += ytilde[static_cast<Eigen::Index>(v)];
      ++k;
    }
  }
  const double nd = static_cast<double>(n);
  return nd / (static_cast<double>(k) * static_cast<double>(n - k)) * sum * sum;
}

/// Exact GLR statistic by enumeration of every nonempty proper subset with
/// s(C) <= rho (and, optionally, a connected induced subgraph). Subsets are
/// visited by increasing size, then by increasing bitmask; the first maximum
/// wins.
inline double glr_exact(const Graph& g, const Eigen::VectorXd& y, double rho, bool require_connected = false) {
  const Index n = g.size();
  if (n > kGlrExactMaxVertices) {
    throw InvalidArgument("glr_exact: n=" + std::to_string(n) + " exceeds the enumeration limit of " +
                          std::to_string(kGlrExactMaxVertices));
  }
  if (n < 2) throw InvalidArgument("glr_exact: graph needs at least two vertices");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (static_cast<Index>(y.size()) != n) throw InvalidArgument("observation length differs from graph size");

  const Eigen::VectorXd ytilde = center(y);
  const double nd = static_cast<double>(n);
  const double rho_slack = rho * (1.0 + 1e-12);
  std::vector<bool> mask(n);
  bool feasible = false;
  double best = 0.0;

  for (Index k = 1; k < n; ++k) {
    const double denom = static_cast<double>(k) * static_cast<double>(n - k);
    const std::uint32_t limit = std::uint32_t{1} << n;
    std::uint32_t set = (std::uint32_t{1} << k) - 1;
    while (set < limit) {
      double boundary = 0.0;
      for (const auto& e : g.edges()) {
        if (((set >> e.u) & 1u) != ((set >> e.v) & 1u)) boundary += e.w;
      }
      if (nd * boundary / denom <= rho_slack) {
        for (Index v = 0; v < n; ++v) mask[v] = (set >> v) & 1u;
        const double value = cluster_glr(ytilde, mask);
        if (!feasible || value > best) {
          if (!require_connected || g.induces_connected(mask)) {
            feasible = true;
            best = value;
          }
        }
      }
      // Gosper's hack: next larger integer with the same popcount.
      const std::uint32_t low = set & (~set + 1u);
      const std::uint32_t ripple = set + low;
      if (ripple == 0) break;
      set = (((ripple ^ set) >> 2) / low) | ripple;
    }
  }
  if (!feasible) throw EmptyClassError("no cluster satisfies the sparsity constraint rho=" + format_double(rho));
  return best;
}

/// GLR maximized over every nonempty proper subset. For a fixed size k the
/// optimum takes the k largest entries of y~ (the complement of the k
/// smallest is covered by symmetry), so one sort and a prefix scan suffice.
inline double glr_unconstrained(const Eigen::VectorXd& y) {
  const Index n = static_cast<Index>(y.size());
  if (n < 2) throw InvalidArgument("glr_unconstrained: need at least two observations");
  const Eigen::VectorXd ytilde = center(y);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return ytilde[static_cast<Eigen::Index>(a)] > ytilde[static_cast<Eigen::Index>(b)];
  });
  const double nd = static_cast<double>(n);
  double prefix = 0.0;
  double best = -1.0;
  Index best_k = 1;
  for (Index k = 1; k < n; ++k) {
    prefix += ytilde[static_cast<Eigen::Index>(order[k - 1])];
    const double value = nd / (static_cast<double>(k) * static_cast<double>(n - k)) * prefix * prefix;
    if (value > best) {
      best = value;
      best_k = k;
    }
  }
  std::vector<bool> mask(n, false);
  for (Index i = 0; i < best_k; ++i) mask[order[i]] = true;
  return cluster_glr(ytilde, mask);
}

/// Spectral scan statistic bound to one graph: the Laplacian spectrum is
/// computed once, each evaluation then costs O(n^2).
class SpectralScanner {
 public:
  explicit SpectralScanner(const Graph& g) {
    if (!g.connected()) throw InvalidArgument("graph must be connected");
    spectrum_ = std::make_shared<const Spectrum>(laplacian_spectrum(g));
  }

  SssResult scan(const Eigen::VectorXd& y, double rho) const { return sss(*spectrum_, y, rho); }
  double operator()(const Eigen::VectorXd& y, double rho) const { return scan(y, rho).value; }
  const Spectrum& spectrum() const { return *spectrum_; }

 private:
  std::shared_ptr<const Spectrum> spectrum_;
};

inline double sss_stat(const Graph& g, const Eigen::VectorXd& y, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  return SpectralScanner(g)(y, rho);
}

using Statistic = std::function<double(const Eigen::VectorXd&)>;

/// Thread-safe callable evaluating `d` on observations over `g`.
inline Statistic make_statistic(const Detector& d, const Graph& g) {
  d.validate();
  switch (d.kind) {
    case DetectorKind::sss: {
      SpectralScanner scanner(g);
      return [scanner, rho = d.rho](const Eigen::VectorXd& y) { return scanner(y, rho); };
    }
    case DetectorKind::energy:
      return [](const Eigen::VectorXd& y) { return energy_stat(y); };
    case DetectorKind::edge:
      return [g](const Eigen::VectorXd& y) { return edge_stat(g, y); };
    case DetectorKind::glr_exact:
      if (g.size() > kGlrExactMaxVertices) {
        throw InvalidArgument("glr_exact: n=" + std::to_string(g.size()) + " exceeds the enumeration limit");
      }
      return [g, d](const Eigen::VectorXd& y) { return glr_exact(g, y, d.rho, d.require_connected); };
    case DetectorKind::glr_unconstrained:
      return [](const Eigen::VectorXd& y) { return glr_unconstrained(y); };
  }
  throw InvalidArgument("unknown detector kind");
}

/// Order statistic at 1-based index ceil(q * count) of unsorted `values`.
inline double upper_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  // Guard against q * count landing a hair above an integer.
  auto rank = static_cast<Index>(std::ceil(q * count - 1e-9));
  rank = std::clamp<Index>(rank, 1, values.size());
  return values[rank - 1];
}

/// Null statistics for replicates 0..reps-1; replicate r observes sigma * eps
/// with eps drawn from NormalStream(seed, r).
inline std::vector<double> simulate_null(const Statistic& stat, Index n, double sigma, Index reps, std::uint64_t seed,
                                         unsigned threads = 1) {
  std::vector<double> out(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    NormalStream stream(seed, r);
    out[r] = stat(sigma * stream.normal_vector(static_cast<Eigen::Index>(n)));
  });
  return out;
}

/// Empirical (1 - alpha)-quantile of the detector's null distribution.
/// Deterministic given seed, independent of `threads`.
inline double calibrate_threshold(const Detector& d, const Graph& g, double sigma, double alpha, Index reps,
                                  std::uint64_t seed, unsigned threads = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (reps < 100) throw InvalidArgument("calibration needs at least 100 replicates");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const Statistic stat = make_statistic(d, g);
  return upper_quantile(simulate_null(stat, g.size(), sigma, reps, seed, threads), 1.0 - alpha);
}

}  // namespace graphscan
