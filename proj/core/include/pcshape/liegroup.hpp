#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace pcshape {

/// Scale of the bi-invariant metric <A, B> = metric_scale * trace(A B^T).
/// Kept at 1 (plain Frobenius pairing) so that dim 2 does not degenerate; the
/// Killing-form metric is (dim - 2) times this.
inline constexpr double kMetricScale = 1.0;
inline constexpr double kCutMargin = 1e-6;
inline constexpr double kGroupTolerance = 1e-9;
inline constexpr double kSkewTolerance = 1e-10;

class AlgebraElement;

/// Orthogonal matrix. The determinant sign is recorded; exp/log and curve
/// analysis only accept the identity component (sign +1).
class GroupElement {
 public:
  /// Throws NotOrthogonal if |g^T g - I|_max >= 1e-9.
  explicit GroupElement(Eigen::MatrixXd matrix);
  static GroupElement identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  int determinant_sign() const noexcept { return det_sign_; }

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;

 private:
  struct Trusted {};
  GroupElement(Eigen::MatrixXd matrix, int det_sign, Trusted)
      : matrix_(std::move(matrix)), det_sign_(det_sign) {}
  friend GroupElement exp_group(const AlgebraElement&);

  Eigen::MatrixXd matrix_;
  int det_sign_ = 1;
};

/// Skew-symmetric matrix (element of so(dim)).
class AlgebraElement {
 public:
  /// Throws NotSkew if |M + M^T|_max >= 1e-10.
  explicit AlgebraElement(Eigen::MatrixXd matrix);
  static AlgebraElement zero(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator-() const;
  AlgebraElement& operator+=(const AlgebraElement& other);
  friend AlgebraElement operator*(double s, const AlgebraElement& a);
  AlgebraElement operator*(double s) const { return s * *this; }
  AlgebraElement operator/(double s) const { return (1.0 / s) * *this; }

 private:
  struct Trusted {};
  AlgebraElement(Eigen::MatrixXd matrix, Trusted) : matrix_(std::move(matrix)) {}
  friend AlgebraElement project_skew(const Eigen::MatrixXd&);

  Eigen::MatrixXd matrix_;
};

/// (M - M^T) / 2.
AlgebraElement project_skew(const Eigen::MatrixXd& m);

/// Matrix exponential of a skew matrix; the result has determinant +1.
GroupElement exp_group(const AlgebraElement& omega);

/// Principal logarithm. Throws WrongComponent for det -1 and NearCutLocus when
/// a rotation angle is within kCutMargin of pi.
AlgebraElement log_group(const GroupElement& g);

/// Largest rotation angle of g (in [0, pi]).
double max_rotation_angle(const GroupElement& g);

double inner(const AlgebraElement& a, const AlgebraElement& b);
double norm(const AlgebraElement& a);

/// Right translation of a tangent vector at g to the identity: skew(v g^T).
AlgebraElement transport_to_identity(const GroupElement& g, const Eigen::MatrixXd& v);

/// exp(s log(g1 g0^T)) g0.
GroupElement geodesic(const GroupElement& g0, const GroupElement& g1, double s);

/// Length of the geodesic between g0 and g1: |log(g1 g0^T)|.
double group_distance(const GroupElement& g0, const GroupElement& g1);

/// A B - B A.
AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);

/// Reflection that moves a det -1 matrix onto the identity component by right
/// multiplication: diag(1, .., 1, -1) when det_sign < 0, identity otherwise.
Eigen::MatrixXd component_correction(std::size_t dim, int det_sign);

}  // namespace pcshape
