#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "graphscan/errors.hpp"
#include "graphscan/graph.hpp"

namespace graphscan {

/// Eigenvalues in ascending order, with column i of `vectors` paired with
/// values[i]. `vectors` is empty when only eigenvalues were requested.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  Index size() const { return static_cast<Index>(values.size()); }
  bool has_vectors() const { return vectors.size() > 0; }
};

/// Dense symmetric eigendecomposition (Householder tridiagonalization + QR).
/// Each eigenvector is sign-normalized so its first non-negligible entry is
/// positive.
inline Spectrum eig_sym(const Eigen::MatrixXd& m, bool compute_vectors = true) {
  if (m.rows() != m.cols()) throw InvalidArgument("eig_sym: matrix is not square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("eig_sym: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: eigensolver did not converge");
  Spectrum s;
  s.values = solver.eigenvalues();
  if (compute_vectors) {
    s.vectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
      auto col = s.vectors.col(j);
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::abs(col[i]) > 1e-12) {
          if (col[i] < 0) col = -col;
          break;
        }
      }
    }
  }
  return s;
}

inline Spectrum laplacian_spectrum(const Graph& g, bool compute_vectors = true) {
  return eig_sym(laplacian(g), compute_vectors);
}

/// y - mean(y) * 1.
inline Eigen::VectorXd center(const Eigen::VectorXd& y) {
  if (y.size() == 0) return y;
  return y.array() - y.mean();
}

namespace detail {

inline void check_reduced_spectrum(const Eigen::VectorXd& lambdas) {
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidArgument("chi_max: eigenvalues must be positive");
    if (i > 0 && lambdas[i] < lambdas[i - 1]) throw InvalidArgument("chi_max: eigenvalues must be ascending");
  }
}

}  // namespace detail

/// Largest eigenvalue of c c^T - nu diag(lambdas).
///
/// Components with |c_i| <= 1e-14 ||c|| are deflated; each contributes the
/// eigenvalue -nu lambda_i directly. The remaining top eigenvalue is the root
/// of sum_i c_i^2 / (theta + nu lambda_i) = 1 to the right of the largest
/// pole. It is found in the shifted variable t = theta + nu lambda_min, where
/// the secular function is convex and decreasing, by Newton steps safeguarded
/// with bisection.
inline double chi_max(const Eigen::VectorXd& c, const Eigen::VectorXd& lambdas, double nu) {
  if (c.size() != lambdas.size()) throw InvalidArgument("chi_max: size mismatch");
  if (!(nu >= 0.0)) throw InvalidArgument("chi_max: nu must be nonnegative");
  detail::check_reduced_spectrum(lambdas);
  if (c.size() == 0) return -std::numeric_limits<double>::infinity();

  const double norm2 = c.squaredNorm();
  if (nu == 0.0) return norm2;

  const double cutoff = 1e-14 * std::sqrt(norm2);
  double deflated_top = -std::numeric_limits<double>::infinity();
  std::vector<double> w2;  // c_i^2 of active components
  std::vector<double> lam;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) <= cutoff) {
      deflated_top = std::max(deflated_top, -nu * lambdas[i]);
    } else {
      w2.push_back(c[i] * c[i]);
      lam.push_back(lambdas[i]);
    }
  }
  if (w2.empty()) return deflated_top;

  // Poles sit at t = -nu (lam_i - lam_0) <= 0; the root lies in (0, sum w2].
  const double lam0 = lam.front();
  std::vector<double> gap(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) gap[i] = nu * (lam[i] - lam0);

  auto secular = [&](double t, double& deriv) {
    double f = -1.0;
    deriv = 0.0;
    for (std::size_t i = 0; i < w2.size(); ++i) {
      const double d = t + gap[i];
      f += w2[i] / d;
      deriv -= w2[i] / (d * d);
    }
    return f;
  };

  double lo = 0.0;
  double hi = 0.0;
  for (double v : w2) hi += v;
  double t = hi;
  for (int iter = 0; iter < 200; ++iter) {
    double deriv = 0.0;
    const double f = secular(t, deriv);
    if (f == 0.0) break;
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - f / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4 * std::numeric_limits<double>::epsilon() * t || hi - lo <= 0.0) {
      t = next;
      break;
    }
    t = next;
  }
  const double theta = t - nu * lam0;
  return std::max(theta, deflated_top);
}

struct SssResult {
  double value = 0.0;
  double nu_star = 0.0;
  Eigen::VectorXd witness;
};

namespace detail {

/// Coefficients of the centered observation in the eigenbasis orthogonal to 1
/// (columns 2..n of the spectrum).
inline Eigen::VectorXd reduced_coefficients(const Spectrum& spectrum, const Eigen::VectorXd& ytilde) {
  const Eigen::Index n = static_cast<Eigen::Index>(spectrum.size());
  return spectrum.vectors.rightCols(n - 1).transpose() * ytilde;
}

inline void check_sss_inputs(const Spectrum& spectrum, const Eigen::VectorXd& y, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!spectrum.has_vectors()) throw InvalidArgument("spectrum has no eigenvectors");
  if (static_cast<Index>(y.size()) != spectrum.size()) throw InvalidArgument("observation length differs from graph size");
  if (spectrum.size() < 2) throw InvalidArgument("graph must have at least two vertices");
  if (!(spectrum.values[1] > 0.0)) throw InvalidArgument("graph is disconnected (lambda_2 <= 0)");
}

}  // namespace detail

/// Dual objective max(chi_max(c, lambdas, nu), 0) + nu * rho.
///
/// The clip at zero is the multiplier of the ball constraint ||x|| <= 1; it
/// keeps the dual exact when only the ellipsoid is active.
inline double sss_dual_objective(const Eigen::VectorXd& c, const Eigen::VectorXd& lambdas, double nu, double rho) {
  return std::max(chi_max(c, lambdas, nu), 0.0) + nu * rho;
}

/// Spectral scan statistic
///   sup (x^T y~)^2  s.t.  x^T L x <= rho, ||x|| <= 1, x^T 1 = 0,
/// computed as the minimum of the convex dual objective over nu in
/// [0, ||y~||^2 / rho] by golden-section search.
inline SssResult sss(const Spectrum& spectrum, const Eigen::VectorXd& y, double rho) {
  detail::check_sss_inputs(spectrum, y, rho);
  const Eigen::Index n = static_cast<Eigen::Index>(spectrum.size());
  const Eigen::VectorXd ytilde = center(y);
  const Eigen::VectorXd c = detail::reduced_coefficients(spectrum, ytilde);
  const Eigen::VectorXd lambdas = spectrum.values.tail(n - 1);

  SssResult result;
  const double norm2 = c.squaredNorm();
  if (norm2 == 0.0) {
    result.witness = Eigen::VectorXd::Zero(n);
    return result;
  }

  auto f = [&](double nu) { return sss_dual_objective(c, lambdas, nu, rho); };

  double best_nu = 0.0;
  double best = norm2;  // f(0)
  auto consider = [&](double nu, double value) {
    if (value < best) {
      best = value;
      best_nu = nu;
    }
  };

  constexpr double inv_phi = 0.6180339887498949;
  auto golden = [&](double lo, double hi) {
    const double width = hi - lo;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = f(a);
    double fb = f(b);
    consider(a, fa);
    consider(b, fb);
    while (hi - lo > 1e-10 * 0.5 * (lo + hi) && hi - lo > 1e-15 * width) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - inv_phi * (hi - lo);
        fa = f(a);
        consider(a, fa);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + inv_phi * (hi - lo);
        fb = f(b);
        consider(b, fb);
      }
    }
    consider(hi, f(hi));
  };

  // f(nu) >= nu rho guarantees the minimizer lies below ||y~||^2 / rho; the
  // bracket is still expanded if rounding leaves the minimizer on its edge.
  double lower = 0.0;
  double upper = norm2 / rho;
  for (int round = 0; round < 64; ++round) {
    golden(lower, upper);
    if (best_nu < upper * (1.0 - 1e-9)) break;
    lower = upper;
    upper *= 2.0;
  }
  result.value = std::max(best, 0.0);
  result.nu_star = best_nu;

  // Witness: z_i proportional to c_i / (theta + nu lambda_i) at the dual
  // optimum, scaled to the largest feasible multiple.
  const double theta = std::max(chi_max(c, lambdas, best_nu), 0.0);
  Eigen::VectorXd z(n - 1);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    const double d = theta + best_nu * lambdas[i];
    z[i] = d > 0.0 ? c[i] / d : 0.0;
  }
  const double zz = z.squaredNorm();
  const double zlz = z.dot(lambdas.cwiseProduct(z));
  if (zz > 0.0) {
    double s = 1.0 / std::sqrt(zz);
    if (zlz > 0.0) s = std::min(s, std::sqrt(rho / zlz));
    z *= s;
  }
  Eigen::VectorXd x = spectrum.vectors.rightCols(n - 1) * z;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x[i]) > 1e-14) {
      if (x[i] < 0) x = -x;
      break;
    }
  }
  result.witness = std::move(x);
  return result;
}

/// Independent primal evaluation of the spectral scan statistic by KKT case
/// analysis on max c^T z s.t. ||z|| <= 1, z^T diag(lambdas) z <= rho.
inline double sss_primal_oracle(const Spectrum& spectrum, const Eigen::VectorXd& y, double rho) {
  detail::check_sss_inputs(spectrum, y, rho);
  const Eigen::Index n = static_cast<Eigen::Index>(spectrum.size());
  const Eigen::VectorXd c = detail::reduced_coefficients(spectrum, center(y));
  const Eigen::VectorXd lambdas = spectrum.values.tail(n - 1);
  const double cc = c.squaredNorm();
  if (cc == 0.0) return 0.0;

  // Ball active only.
  const double clc = c.dot(lambdas.cwiseProduct(c));
  if (clc <= rho * cc) return cc;

  // Ellipsoid active only.
  const Eigen::VectorXd inv_lc = c.cwiseQuotient(lambdas);
  const double c_inv_c = c.dot(inv_lc);
  if (rho * inv_lc.squaredNorm() <= c_inv_c) return rho * c_inv_c;

  // Both active: z(t) ~ (I + t Lambda)^-1 c on the unit sphere with
  // z^T Lambda z = rho. The Rayleigh quotient decreases in t.
  auto quotient = [&](double t, Eigen::VectorXd& z) {
    z = c.array() / (1.0 + t * lambdas.array());
    const double zz = z.squaredNorm();
    return z.dot(lambdas.cwiseProduct(z)) / zz;
  };
  Eigen::VectorXd z;
  double lo = 0.0;
  double hi = 1.0 / lambdas[0];
  while (quotient(hi, z) > rho && hi < 1e300) hi *= 2.0;
  for (int iter = 0; iter < 400 && hi - lo > 1e-16 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (quotient(mid, z) > rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  quotient(hi, z);
  z.normalize();
  const double value = c.dot(z);
  return value * value;
}

// ---------------------------------------------------------------------------
// Spectrum export: one eigenvalue per line; eigenvectors one per line
// (column i of the basis on line i), comma separated. 17 significant digits.

inline void write_eigenvalues_csv(std::ostream& out, const Spectrum& s) {
  char buf[40];
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.values[i]);
    out << buf << '\n';
  }
}

inline void write_eigenvectors_csv(std::ostream& out, const Spectrum& s) {
  char buf[40];
  for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < s.vectors.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.vectors(i, j));
      if (i > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace graphscan
