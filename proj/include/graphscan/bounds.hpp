#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "graphscan/errors.hpp"
#include "graphscan/graph.hpp"
#include "graphscan/spectral.hpp"

namespace graphscan {

// Closed-form detectability quantities. Rate expressions are returned without
// asymptotic constants.

namespace detail {

inline void require_connected_spectrum(const Spectrum& s) {
  if (s.size() < 2) throw InvalidArgument("spectrum needs at least two eigenvalues");
  if (!(s.values[1] > 0.0)) throw InvalidArgument("graph is disconnected (lambda_2 <= 0)");
}

/// sum_{i >= 2} min{1, rho / lambda_i}
inline double spectral_sum(const Spectrum& s, double rho) {
  require_connected_spectrum(s);
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  double sum = 0.0;
  for (Eigen::Index i = 1; i < s.values.size(); ++i) sum += std::min(1.0, rho / s.values[i]);
  return sum;
}

}  // namespace detail

/// sqrt(sum_{i >= 2} min{1, rho / lambda_i}); at most sqrt(n - 1).
inline double spectral_snr_bound(const Spectrum& s, double rho) { return std::sqrt(detail::spectral_sum(s, rho)); }

struct TruncatedBound {
  double value;
  Index k;
};

/// min over k with lambda_{k+1} > rho of sqrt(k + (n - k) rho / lambda_{k+1});
/// smallest k wins ties.
inline TruncatedBound truncated_bound(const Spectrum& s, double rho) {
  detail::require_connected_spectrum(s);
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  const Index n = s.size();
  std::optional<TruncatedBound> best;
  for (Index k = 1; k < n; ++k) {
    const double lambda = s.values[static_cast<Eigen::Index>(k)];  // lambda_{k+1}, 1-based
    if (!(lambda > rho)) continue;
    const double value =
        std::sqrt(static_cast<double>(k) + static_cast<double>(n - k) * rho / lambda);
    if (!best || value < best->value) best = TruncatedBound{value, k};
  }
  if (!best) throw InvalidArgument("no admissible k: every eigenvalue is <= rho");
  return *best;
}

/// Upper bound on the spectral scan statistic under the null that holds with
/// probability at least 1 - conf:
///   (sqrt(2 sigma^2 S) + sqrt(2 sigma^2 log(2 / conf)))^2,  S = sum min{1, rho/lambda_i}.
inline double null_threshold(const Spectrum& s, double rho, double sigma, double conf) {
  if (!(conf > 0.0 && conf < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const double s2 = sigma * sigma;
  const double root = std::sqrt(2.0 * s2 * detail::spectral_sum(s, rho)) + std::sqrt(2.0 * s2 * std::log(2.0 / conf));
  return root * root;
}

/// Matching lower bound under an alternative with separation eta:
/// (eta - sqrt(2 sigma^2 log(2/conf)))^2, or 0 when eta does not clear it.
inline double alternative_floor(double eta, double sigma, double conf) {
  if (!(conf > 0.0 && conf < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
  const double r = eta - std::sqrt(2.0 * sigma * sigma * std::log(2.0 / conf));
  return r > 0.0 ? r * r : 0.0;
}

struct NaiveBounds {
  double energy;
  double edge;
};

/// Detection rates of the energy and edge-thresholding tests:
/// (sqrt(n - 1), sqrt(max_cluster log n)).
inline NaiveBounds naive_bounds(Index n, Index max_cluster) {
  if (n < 2) throw InvalidArgument("naive_bounds: n must be at least 2");
  if (max_cluster < 1 || 2 * max_cluster > n) throw InvalidArgument("naive_bounds: need 1 <= max_cluster <= n/2");
  return {std::sqrt(static_cast<double>(n - 1)),
          std::sqrt(static_cast<double>(max_cluster) * std::log(static_cast<double>(n)))};
}

/// (delta / sigma)^2 |C| (n - |C|) / n, the square of the SNR.
inline double noncentrality(double delta, double sigma, Index cluster_size, Index n) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (cluster_size == 0 || cluster_size >= n) throw InvalidArgument("cluster size must lie in (0, n)");
  const double r = delta / sigma;
  return r * r * static_cast<double>(cluster_size) * static_cast<double>(n - cluster_size) /
         static_cast<double>(n);
}

/// Upper bound on 1 / lambda_2 of the balanced binary tree of depth l.
inline double bbt_lambda2_bound(int depth) {
  if (depth < 1) throw InvalidArgument("tree depth must be at least 1");
  return std::ldexp(1.0, depth) + (depth < 4 ? 105.0 : 0.0);
}

struct BoundsReport {
  Index n = 0;
  double rho = 0.0;
  double sigma = 1.0;
  double conf = 0.05;
  double lambda2 = 0.0;
  double lambda_max = 0.0;
  double spectral_sum_bound = 0.0;
  std::optional<TruncatedBound> truncated;
  double energy_bound = 0.0;
  std::optional<double> edge_bound;
  double null_threshold = 0.0;
  std::optional<double> eta;
  std::optional<double> noncentrality;
};

struct BoundsRequest {
  double rho = 0.0;
  double sigma = 1.0;
  double conf = 0.05;
  std::optional<Index> max_cluster;
  std::optional<double> delta;
  std::optional<Index> cluster_size;
};

inline BoundsReport make_bounds_report(const Spectrum& s, const BoundsRequest& req) {
  BoundsReport r;
  r.n = s.size();
  r.rho = req.rho;
  r.sigma = req.sigma;
  r.conf = req.conf;
  r.lambda2 = s.values[1];
  r.lambda_max = s.values[s.values.size() - 1];
  r.spectral_sum_bound = spectral_snr_bound(s, req.rho);
  if (r.lambda_max > req.rho) r.truncated = truncated_bound(s, req.rho);
  r.energy_bound = std::sqrt(static_cast<double>(r.n - 1));
  if (req.max_cluster) r.edge_bound = naive_bounds(r.n, *req.max_cluster).edge;
  r.null_threshold = null_threshold(s, req.rho, req.sigma, req.conf);
  if (req.delta && req.cluster_size) {
    const double lambda = noncentrality(*req.delta, req.sigma, *req.cluster_size, r.n);
    r.noncentrality = lambda;
    r.eta = std::sqrt(lambda) * req.sigma;
  }
  return r;
}

inline void write_bounds_report(std::ostream& out, const BoundsReport& r) {
  auto line = [&](const char* key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << key << " = " << buf << '\n';
  };
  out << "n = " << r.n << '\n';
  line("rho", r.rho);
  line("sigma", r.sigma);
  line("conf", r.conf);
  line("lambda_2", r.lambda2);
  line("lambda_max", r.lambda_max);
  line("spectral_sum_bound", r.spectral_sum_bound);
  if (r.truncated) {
    line("truncated_bound", r.truncated->value);
    out << "truncated_k = " << r.truncated->k << '\n';
  } else {
    out << "truncated_bound = none\n";
  }
  line("energy_bound", r.energy_bound);
  if (r.edge_bound) line("edge_bound", *r.edge_bound);
  line("null_threshold", r.null_threshold);
  if (r.eta) line("eta", *r.eta);
  if (r.noncentrality) line("noncentrality", *r.noncentrality);
}

}  // namespace graphscan
