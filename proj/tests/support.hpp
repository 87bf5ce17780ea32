#pragma once

// Generators and independent oracles shared by the unit and acceptance
// suites. Nothing here calls the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "graphscan/graph.hpp"

namespace graphscan::testing {

/// Random connected simple graph: a random spanning tree plus extra edges.
/// Weights are 1 unless `weighted`, then uniform in [0.25, 2].
inline Graph random_connected_graph(std::mt19937_64& rng, Index n_min, Index n_max, bool weighted = true) {
  std::uniform_int_distribution<Index> size_dist(n_min, n_max);
  const Index n = size_dist(rng);
  std::uniform_real_distribution<double> weight_dist(0.25, 2.0);
  auto weight = [&] { return weighted ? weight_dist(rng) : 1.0; };
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  std::vector<Edge> edges;
  for (Index v = 1; v < n; ++v) {
    const Index u = std::uniform_int_distribution<Index>(0, v - 1)(rng);
    edges.push_back({u, v, weight()});
    present[u][v] = present[v][u] = true;
  }
  std::bernoulli_distribution extra(0.3);
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      if (!present[u][v] && extra(rng)) {
        edges.push_back({u, v, weight()});
        present[u][v] = present[v][u] = true;
      }
    }
  }
  return Graph(n, std::move(edges));
}

inline Eigen::VectorXd standard_normal(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = dist(rng);
  return y;
}

/// Dense Laplacian assembled entry by entry from the edge list.
inline Eigen::MatrixXd laplacian_by_hand(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.w;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.w;
  }
  Eigen::MatrixXd l = -a;
  for (Eigen::Index i = 0; i < n; ++i) l(i, i) = a.row(i).sum();
  return l;
}

/// Largest eigenvalue of c c^T - nu diag(lambdas) by full dense
/// eigendecomposition.
inline double chi_max_dense(const Eigen::VectorXd& c, const Eigen::VectorXd& lambdas, double nu) {
  Eigen::MatrixXd m = c * c.transpose();
  m.diagonal() -= nu * lambdas;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

/// Sorted multiset comparison.
inline double max_sorted_gap(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return HUGE_VAL;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Periodic p x p lattice eigenvalues from the Fourier formula.
inline std::vector<double> torus_eigenvalues(Index p) {
  std::vector<double> out;
  const double pd = static_cast<double>(p);
  for (Index i1 = 0; i1 < p; ++i1)
    for (Index i2 = 0; i2 < p; ++i2)
      out.push_back(2.0 * (2.0 - std::cos(2 * M_PI * static_cast<double>(i1) / pd) -
                           std::cos(2 * M_PI * static_cast<double>(i2) / pd)));
  return out;
}

}  // namespace graphscan::testing
