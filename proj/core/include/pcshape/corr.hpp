#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace pcshape {

inline constexpr double kDefaultPsdTolerance = 1e-10;
inline constexpr double kRepairEigenvalueFloor = 1e-8;

/// Symmetric positive-definite matrix with unit diagonal.
///
/// Instances only come out of validate_spd() or the estimators below, so a
/// CorrelationMatrix in hand always satisfies the four invariants.
class CorrelationMatrix {
 public:
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  explicit CorrelationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
  friend CorrelationMatrix validate_spd(const Eigen::MatrixXd&, double);

  Eigen::MatrixXd entries_;
};

/// Realisations of a scalar process, one per row.
class RealizationSet {
 public:
  explicit RealizationSet(Eigen::MatrixXd samples);

  std::size_t count() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t length() const noexcept { return static_cast<std::size_t>(samples_.cols()); }
  const Eigen::MatrixXd& samples() const noexcept { return samples_; }

 private:
  Eigen::MatrixXd samples_;
};

/// Checks squareness, symmetry (1e-10 relative), diagonal positivity and
/// positive-definiteness. A positive diagonal other than 1 is rescaled by
/// D^{-1/2} R D^{-1/2}. Input is never repaired.
CorrelationMatrix validate_spd(const Eigen::MatrixXd& matrix,
                               double psd_tolerance = kDefaultPsdTolerance);

/// true iff every diagonal of R has spread (max - min) at most tol.
bool is_toeplitz(const CorrelationMatrix& R, double tol);
bool is_toeplitz(const Eigen::MatrixXd& R, double tol);

/// Raw ensemble second moment E[x_i x_j] over the first n samples.
Eigen::MatrixXd ensemble_second_moment(const RealizationSet& data, std::size_t n);

struct EstimatedCorrelation {
  CorrelationMatrix matrix;
  bool repaired = false;
  double min_eigenvalue_before = 0.0;
};

struct EstimationOptions {
  double psd_tolerance = kDefaultPsdTolerance;
  bool allow_repair = true;
};

/// Ensemble correlation over the first n samples, normalised to a unit
/// diagonal. Sampling noise that leaves the estimate non-PD is repaired by
/// clipping eigenvalues at 1e-8 and re-normalising (flagged in the result)
/// unless options.allow_repair is false.
EstimatedCorrelation estimate_ensemble_correlation(const RealizationSet& data, std::size_t n,
                                                   const EstimationOptions& options = {});

/// AR(1) autocorrelation: R[i][j] = coefficient^|i-j|.
CorrelationMatrix gen_stationary_ar(double coefficient, std::size_t n);

/// Periodically correlated AR(1): x_t = a x_{t-1} + m(t) sqrt(1 - a^2) e_t with
/// m(t) = 1 + depth cos(2 pi t / period). The chain is started from N(0, 1)
/// and run through a burn-in of whole periods, so sample t of the output has
/// phase t mod period. Deterministic in seed.
RealizationSet gen_pc_process(double base_coefficient, std::size_t period, double depth,
                              std::size_t n, std::size_t count, std::uint64_t seed);

/// Per-sample variance of the gen_pc_process output in its periodic regime,
/// v_t = a^2 v_{t-1} + (1 - a^2) m(t)^2.
std::vector<double> pc_process_variance(double base_coefficient, std::size_t period,
                                        double depth, std::size_t n);

/// Modulation m(t) = 1 + depth cos(2 pi t / period).
double pc_modulation(std::size_t t, std::size_t period, double depth);

}  // namespace pcshape
