#include "pcshape/corr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pcshape/error.hpp"
#include "pcshape/random.hpp"

namespace pcshape {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr std::size_t kMaxBurnIn = 1'000'000;

Eigen::MatrixXd unit_diagonal(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd scale = m.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = scale.asDiagonal() * m * scale.asDiagonal();
  // (i, j) and (j, i) round differently; averaging makes them bitwise equal.
  out = (0.5 * (out + out.transpose())).eval();
  out.diagonal().setOnes();
  return out;
}

// Burn-in length: whole periods, long enough for the initial condition to decay
// below double precision.
std::size_t burn_in_steps(double a, std::size_t period) {
  std::size_t steps = period;
  const double a2 = a * a;
  if (a2 > 0.0) {
    const double needed = std::ceil(std::log(1e-17) / std::log(a2));
    steps = std::max<std::size_t>(steps, static_cast<std::size_t>(std::min(needed, 1e6)));
  }
  steps = ((steps + period - 1) / period) * period;
  return std::min(steps, (kMaxBurnIn / period) * period);
}

}  // namespace

RealizationSet::RealizationSet(Eigen::MatrixXd samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    throw Error(Errc::insufficient_realizations, "realization set must be non-empty");
  }
}

CorrelationMatrix validate_spd(const Eigen::MatrixXd& matrix, double psd_tolerance) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    std::ostringstream os;
    os << "matrix is " << matrix.rows() << "x" << matrix.cols();
    throw Error(Errc::not_square, os.str());
  }
  if (psd_tolerance < 0.0) {
    throw Error(Errc::out_of_range, "psd_tolerance must be non-negative");
  }
  if (!matrix.allFinite()) {
    throw Error(Errc::not_positive_definite, "matrix has non-finite entries");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "max |R - R^T| = " << asym;
    throw Error(Errc::not_symmetric, os.str());
  }
  Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  for (Eigen::Index i = 0; i < sym.rows(); ++i) {
    if (!(sym(i, i) > 0.0)) {
      std::ostringstream os;
      os << "diagonal entry " << i << " = " << sym(i, i);
      throw Error(Errc::non_positive_diagonal, os.str());
    }
  }
  Eigen::MatrixXd unit = unit_diagonal(sym);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unit, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > psd_tolerance)) {
    std::ostringstream os;
    os << "smallest eigenvalue " << min_eig << " <= " << psd_tolerance;
    throw Error(Errc::not_positive_definite, os.str());
  }
  return CorrelationMatrix(std::move(unit));
}

bool is_toeplitz(const Eigen::MatrixXd& R, double tol) {
  const Eigen::Index n = R.rows();
  for (Eigen::Index lag = -(n - 1); lag <= n - 1; ++lag) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = std::max<Eigen::Index>(0, -lag); i < n && i + lag < n; ++i) {
      const double v = R(i, i + lag);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > tol) return false;
  }
  return true;
}

bool is_toeplitz(const CorrelationMatrix& R, double tol) { return is_toeplitz(R.matrix(), tol); }

Eigen::MatrixXd ensemble_second_moment(const RealizationSet& data, std::size_t n) {
  if (n == 0 || n > data.length()) {
    throw Error(Errc::index_error, "window length must be in [1, realization length]");
  }
  const auto cols = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd x = data.samples().leftCols(cols);
  return (x.transpose() * x) / static_cast<double>(data.count());
}

EstimatedCorrelation estimate_ensemble_correlation(const RealizationSet& data, std::size_t n,
                                                   const EstimationOptions& options) {
  if (data.count() < 2) {
    throw Error(Errc::insufficient_realizations, "need at least two realizations");
  }
  Eigen::MatrixXd moment = ensemble_second_moment(data, n);
  for (Eigen::Index i = 0; i < moment.rows(); ++i) {
    if (!(moment(i, i) > 0.0)) {
      std::ostringstream os;
      os << "sample " << i << " has zero ensemble variance";
      throw Error(Errc::degenerate_variance, os.str());
    }
  }
  Eigen::MatrixXd unit = unit_diagonal(0.5 * (moment + moment.transpose()));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unit);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig > options.psd_tolerance) {
    return {validate_spd(unit, options.psd_tolerance), false, min_eig};
  }
  if (!options.allow_repair) {
    return {validate_spd(unit, options.psd_tolerance), false, min_eig};  // throws
  }
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(kRepairEigenvalueFloor);
  Eigen::MatrixXd repaired =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  repaired = unit_diagonal(0.5 * (repaired + repaired.transpose()));
  // Re-normalising can push the smallest eigenvalue slightly below the floor.
  return {validate_spd(repaired, std::min(options.psd_tolerance, 0.5 * kRepairEigenvalueFloor)),
          true, min_eig};
}

CorrelationMatrix gen_stationary_ar(double coefficient, std::size_t n) {
  if (!(std::abs(coefficient) < 1.0)) {
    throw Error(Errc::out_of_range, "AR(1) coefficient must lie in (-1, 1)");
  }
  if (n == 0) throw Error(Errc::bad_dim, "n must be positive");
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd R(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      R(i, j) = std::pow(coefficient, static_cast<double>(std::abs(i - j)));
    }
  }
  return validate_spd(R, 0.0);
}

double pc_modulation(std::size_t t, std::size_t period, double depth) {
  const double phase = static_cast<double>(t % period) / static_cast<double>(period);
  return 1.0 + depth * std::cos(2.0 * std::numbers::pi * phase);
}

namespace {

void check_pc_arguments(double a, std::size_t period, double depth) {
  if (!(std::abs(a) < 1.0)) throw Error(Errc::out_of_range, "base coefficient must lie in (-1, 1)");
  if (period < 2) throw Error(Errc::out_of_range, "period must be at least 2");
  if (!(depth >= 0.0 && depth < 1.0)) throw Error(Errc::out_of_range, "depth must lie in [0, 1)");
}

}  // namespace

std::vector<double> pc_process_variance(double base_coefficient, std::size_t period, double depth,
                                        std::size_t n) {
  check_pc_arguments(base_coefficient, period, depth);
  const double a2 = base_coefficient * base_coefficient;
  const std::size_t burn = burn_in_steps(base_coefficient, period);
  double v = 1.0;
  for (std::size_t tau = 1; tau <= burn; ++tau) {
    const double m = pc_modulation(tau, period, depth);
    v = a2 * v + (1.0 - a2) * m * m;
  }
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const double m = pc_modulation(burn + t, period, depth);
      v = a2 * v + (1.0 - a2) * m * m;
    }
    out[t] = v;
  }
  return out;
}

RealizationSet gen_pc_process(double base_coefficient, std::size_t period, double depth,
                              std::size_t n, std::size_t count, std::uint64_t seed) {
  check_pc_arguments(base_coefficient, period, depth);
  if (n == 0 || count == 0) throw Error(Errc::bad_dim, "n and count must be positive");
  const double a = base_coefficient;
  const double innovation = std::sqrt(1.0 - a * a);
  const std::size_t burn = burn_in_steps(a, period);

  Rng rng(seed);
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    double x = rng.normal();
    for (std::size_t tau = 1; tau <= burn; ++tau) {
      x = a * x + pc_modulation(tau, period, depth) * innovation * rng.normal();
    }
    samples(r, 0) = x;
    for (Eigen::Index t = 1; t < samples.cols(); ++t) {
      const auto tau = burn + static_cast<std::size_t>(t);
      x = a * x + pc_modulation(tau, period, depth) * innovation * rng.normal();
      samples(r, t) = x;
    }
  }
  return RealizationSet(std::move(samples));
}

}  // namespace pcshape
