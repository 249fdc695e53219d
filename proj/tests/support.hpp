#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own algorithms.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace testing_support {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline MatrixXd random_skew(std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixXd a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = nd(rng);
  }
  return (a - a.transpose()) / 2.0;
}

/// Largest rotation angle of exp(A), A skew: the largest |eigenvalue| of A.
inline double skew_angle(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.transpose() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Random skew matrix whose largest rotation angle is below max_angle.
inline MatrixXd random_skew_bounded(std::size_t dim, std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  MatrixXd a = random_skew(dim, rng);
  const double angle = skew_angle(a);
  if (angle > 0.0) a *= ud(rng) * max_angle / angle;
  return a;
}

/// Reference exponential (Pade scaling-and-squaring from Eigen unsupported).
inline MatrixXd expm(const MatrixXd& a) { return a.exp(); }

/// Reference logarithm (Schur-Parlett from Eigen unsupported).
inline MatrixXd logm(const MatrixXd& g) { return g.log(); }

inline MatrixXd random_rotation(std::size_t dim, std::mt19937_64& rng, double max_angle = 3.0) {
  return expm(random_skew_bounded(dim, rng, max_angle));
}

inline MatrixXd planar(double theta) {
  MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Geodesic distance between rotations through the reference logarithm.
inline double rotation_distance(const MatrixXd& a, const MatrixXd& b) {
  const MatrixXd l = logm(b * a.transpose());
  return ((l - l.transpose()) / 2.0).norm();
}

/// Partial correlation of samples i and j given the samples strictly between
/// them, from the inverse of the sub-matrix R[i..j, i..j].
inline double partial_correlation(const MatrixXd& r, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index len = j - i + 1;
  const MatrixXd p = r.block(i, i, len, len).inverse();
  return -p(0, len - 1) / std::sqrt(p(0, 0) * p(len - 1, len - 1));
}

/// Same quantity by regression residuals: regress x_i and x_j on the samples
/// in between and correlate the residuals.
inline double partial_correlation_regression(const MatrixXd& r, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index m = j - i - 1;
  if (m == 0) return r(i, j);
  const MatrixXd s = r.block(i + 1, i + 1, m, m);
  const VectorXd ci = r.block(i + 1, i, m, 1);
  const VectorXd cj = r.block(i + 1, j, m, 1);
  const VectorXd bi = s.ldlt().solve(ci);
  const VectorXd bj = s.ldlt().solve(cj);
  const double cov = r(i, j) - ci.dot(bj);
  const double vi = 1.0 - ci.dot(bi);
  const double vj = 1.0 - cj.dot(bj);
  return cov / std::sqrt(vi * vj);
}

/// Partial autocorrelations of a Toeplitz row by solving each Yule-Walker
/// system directly: pacf[p-1] is the last coefficient of the order-p solution.
inline std::vector<double> yule_walker_pacf(const std::vector<double>& row) {
  const Eigen::Index n = static_cast<Eigen::Index>(row.size());
  std::vector<double> out;
  for (Eigen::Index p = 1; p < n; ++p) {
    MatrixXd t(p, p);
    VectorXd rhs(p);
    for (Eigen::Index a = 0; a < p; ++a) {
      rhs(a) = row[static_cast<std::size_t>(a + 1)];
      for (Eigen::Index b = 0; b < p; ++b) t(a, b) = row[static_cast<std::size_t>(std::abs(a - b))];
    }
    out.push_back(t.ldlt().solve(rhs)(p - 1));
  }
  return out;
}

inline MatrixXd toeplitz(const std::vector<double>& row) {
  const Eigen::Index n = static_cast<Eigen::Index>(row.size());
  MatrixXd t(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) t(a, b) = row[static_cast<std::size_t>(std::abs(a - b))];
  }
  return t;
}

/// Random correlation matrix from a random factor model, well inside the cone.
inline MatrixXd random_correlation(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXd f(n, n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n + 2; ++j) f(i, j) = nd(rng);
  }
  MatrixXd c = f * f.transpose();
  const VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * c * d.asDiagonal();
}

/// Basis of so(n) as matrices E_ab - E_ba, a < b.
inline std::vector<MatrixXd> so_basis(std::size_t n) {
  std::vector<MatrixXd> basis;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      MatrixXd e = MatrixXd::Zero(n, n);
      e(a, b) = 1.0;
      e(b, a) = -1.0;
      basis.push_back(e);
    }
  }
  return basis;
}

/// Matrix of ad(A) = [A, .] in the basis above. The basis is orthogonal with
/// squared norm 2 under trace(X Y^T), so coordinates are trace(X E^T) / 2.
inline MatrixXd ad_matrix(const MatrixXd& a) {
  const auto basis = so_basis(static_cast<std::size_t>(a.rows()));
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  MatrixXd ad(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const MatrixXd img = a * basis[c] - basis[c] * a;
    for (Eigen::Index r = 0; r < k; ++r) ad(r, c) = (img * basis[r].transpose()).trace() / 2.0;
  }
  return ad;
}

}  // namespace testing_support
