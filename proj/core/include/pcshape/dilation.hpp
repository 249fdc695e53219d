#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pcshape/corr.hpp"

namespace pcshape {

inline constexpr double kDefectFloor = 1e-8;
inline constexpr double kBoundaryTolerance = 1e-12;

/// Schur-Constantinescu parameters of an n x n correlation matrix: scalar
/// contractions gamma(i, j), 0 <= i < j < n (0-based). gamma(i, i+1) is the
/// lag-one correlation; gamma(i, j) is the partial correlation of samples i
/// and j given the samples strictly between them.
class SchurParams {
 public:
  explicit SchurParams(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const;
  /// Throws OutOfRange if |value| > 1 and IndexError unless i < j < n.
  void set(std::size_t i, std::size_t j, double value);

  /// |gamma(i, j)| = 1 within 1e-12.
  bool is_boundary(std::size_t i, std::size_t j) const;
  /// Entries that extract_schur_params could not determine because their
  /// defect product fell below the floor; they hold 0.
  const std::vector<std::pair<std::size_t, std::size_t>>& degenerate() const noexcept {
    return degenerate_;
  }
  void mark_degenerate(std::size_t i, std::size_t j);

  /// Strictly upper-triangular n x n view (zeros elsewhere).
  const Eigen::MatrixXd& triangle() const noexcept { return gamma_; }

 private:
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_;
  Eigen::MatrixXd gamma_;
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_;
};

/// Orthogonal dilation matrices W_0 .. W_{count-1}, all dim x dim.
class DilationSequence {
 public:
  explicit DilationSequence(std::vector<Eigen::MatrixXd> matrices);

  std::size_t count() const noexcept { return matrices_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const Eigen::MatrixXd& operator[](std::size_t i) const { return matrices_.at(i); }
  const std::vector<Eigen::MatrixXd>& matrices() const noexcept { return matrices_; }
  /// Common determinant sign of the matrices, +1 or -1.
  int determinant_sign() const noexcept { return det_sign_; }

 private:
  std::vector<Eigen::MatrixXd> matrices_;
  std::size_t dim_ = 0;
  int det_sign_ = 1;
};

/// sqrt(1 - gamma^2).
double defect(double gamma);

/// Identity except the 2x2 block [[g, D], [D, -g]] at rows/cols
/// (position, position + 1), 0-based.
Eigen::MatrixXd givens(double gamma, std::size_t position, std::size_t dim);

/// The 2x2 Julia operator [[g, D], [D, -g]].
Eigen::Matrix2d julia_operator(double gamma);

struct Contraction {
  double value = 0.0;
  bool boundary = false;
};

/// Scalar case of Y = X^{1/2} Gamma Z^{1/2}: returns y / sqrt(x z).
Contraction extract_contraction(double x, double y, double z);

/// Row contraction L_{k,j} = [g(k,k+1), D g(k,k+2), ..., D..D g(k,j)].
Eigen::RowVectorXd row_contraction(const SchurParams& params, std::size_t k, std::size_t j);
/// Column contraction C_{k,j} = [g(j-1,j), g(j-2,j) D, ..., g(k,j) D..D]^T.
Eigen::VectorXd column_contraction(const SchurParams& params, std::size_t k, std::size_t j);
/// U_{k,j} = G(g(k,k+1)) .. G(g(k,j)) (U_{k+1,j} (+) 1), size j-k+1, U_{k,k} = [1].
Eigen::MatrixXd upper_unitary(const SchurParams& params, std::size_t k, std::size_t j);

/// Correlation R(k, j), k < j, from the parameters alone.
double schur_reconstruct_entry(const SchurParams& params, std::size_t k, std::size_t j);

/// Full unit-diagonal matrix rebuilt entry by entry.
Eigen::MatrixXd schur_reconstruct(const SchurParams& params);

/// Inverse of schur_reconstruct, solved by increasing lag.
SchurParams extract_schur_params(const CorrelationMatrix& R);

enum class Coverage {
  /// W_i for i = 0 .. n-dim: every factor uses a parameter of the triangle.
  full,
  /// W_i for i = 0 .. n-2: parameters past the triangle are taken as 0, so
  /// every entry within the lag window can be reconstructed.
  padded,
};

/// W_i = G(g(i,i+1), 0) G(g(i,i+2), 1) ... G(g(i,i+dim-1), dim-2).
DilationSequence build_dilation_sequence(const SchurParams& params, std::size_t dim,
                                         Coverage coverage = Coverage::full);

/// Stationary dilation matrix evaluated entrywise from the lag parcors.
/// Parcors past parcors.size() are 0; the last column uses the truncated
/// product D_1 .. D_{dim-1}.
Eigen::MatrixXd naimark_matrix(const std::vector<double>& parcors, std::size_t dim);

/// e1^T W_i W_{i+1} .. W_{j-1} e1 for i < j.
double reconstruct_correlation(const DilationSequence& seq, std::size_t i, std::size_t j);

/// All entries with lag <= max_lag that the sequence covers; other entries
/// are 0 and the diagonal is 1. max_lag must not exceed dim - 1.
Eigen::MatrixXd reconstruct_band(const DilationSequence& seq, std::size_t max_lag);

struct LevinsonResult {
  std::vector<double> reflection;        // partial autocorrelations, orders 1..n-1
  std::vector<double> prediction_error;  // normalised error after each order
};

/// Levinson-Durbin on a Toeplitz first row (row[0] = 1). Reflection signs
/// follow the parcor convention: reflection[0] = row[1].
LevinsonResult levinson(const std::vector<double>& toeplitz_row);

}  // namespace pcshape
