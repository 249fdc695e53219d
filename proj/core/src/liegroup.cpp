#include "pcshape/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pcshape/error.hpp"

namespace pcshape {

namespace {

using Index = Eigen::Index;

void require_same_dim(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "dimensions " << a.dim() << " and " << b.dim() << " differ";
    throw Error(Errc::dim_mismatch, os.str());
  }
}

// Rotation angles of the 2x2 diagonal blocks of a real Schur form; entries of
// 1x1 blocks give angle 0 (value +1) or pi (value -1).
struct SchurBlocks {
  Eigen::MatrixXd q;
  Eigen::MatrixXd t;
};

SchurBlocks real_schur(const Eigen::MatrixXd& m) {
  Eigen::RealSchur<Eigen::MatrixXd> schur(m, true);
  if (schur.info() != Eigen::Success) {
    throw Error(Errc::not_orthogonal, "real Schur decomposition did not converge");
  }
  return {schur.matrixU(), schur.matrixT()};
}

template <typename BlockFn, typename ScalarFn>
Eigen::MatrixXd map_blocks(const Eigen::MatrixXd& t, BlockFn on_block, ScalarFn on_scalar) {
  const Index n = t.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      out.block<2, 2>(i, i) = on_block(Eigen::Matrix2d(t.block<2, 2>(i, i)));
      i += 2;
    } else {
      out(i, i) = on_scalar(t(i, i));
      i += 1;
    }
  }
  return out;
}

Eigen::Matrix2d planar_rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

Eigen::Matrix2d planar_generator(double angle) {
  Eigen::Matrix2d r;
  r << 0.0, -angle, angle, 0.0;
  return r;
}

double block_angle(const Eigen::Matrix2d& b) {
  return std::atan2(0.5 * (b(1, 0) - b(0, 1)), 0.5 * (b(0, 0) + b(1, 1)));
}

}  // namespace

GroupElement::GroupElement(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(Errc::not_orthogonal, "group element must be a non-empty square matrix");
  }
  const double err =
      (matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (!(err < kGroupTolerance)) {
    std::ostringstream os;
    os << "|g^T g - I|_max = " << err;
    throw Error(Errc::not_orthogonal, os.str());
  }
  det_sign_ = matrix_.determinant() > 0.0 ? 1 : -1;
}

GroupElement GroupElement::identity(std::size_t dim) {
  const auto n = static_cast<Index>(dim);
  return GroupElement(Eigen::MatrixXd::Identity(n, n), 1, Trusted{});
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (dim() != other.dim()) throw Error(Errc::dim_mismatch, "group product of different sizes");
  return GroupElement(matrix_ * other.matrix_, det_sign_ * other.det_sign_, Trusted{});
}

GroupElement GroupElement::inverse() const {
  return GroupElement(matrix_.transpose(), det_sign_, Trusted{});
}

AlgebraElement::AlgebraElement(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(Errc::not_skew, "algebra element must be a non-empty square matrix");
  }
  const double err = (matrix_ + matrix_.transpose()).cwiseAbs().maxCoeff();
  if (!(err < kSkewTolerance)) {
    std::ostringstream os;
    os << "|M + M^T|_max = " << err;
    throw Error(Errc::not_skew, os.str());
  }
}

AlgebraElement AlgebraElement::zero(std::size_t dim) {
  const auto n = static_cast<Index>(dim);
  return AlgebraElement(Eigen::MatrixXd::Zero(n, n), Trusted{});
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
  require_same_dim(*this, other);
  return AlgebraElement(matrix_ + other.matrix_, Trusted{});
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const {
  require_same_dim(*this, other);
  return AlgebraElement(matrix_ - other.matrix_, Trusted{});
}

AlgebraElement AlgebraElement::operator-() const { return AlgebraElement(-matrix_, Trusted{}); }

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  require_same_dim(*this, other);
  matrix_ += other.matrix_;
  return *this;
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
  return AlgebraElement(s * a.matrix_, AlgebraElement::Trusted{});
}

AlgebraElement project_skew(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(Errc::not_square, "project_skew needs a non-empty square matrix");
  }
  return AlgebraElement(0.5 * (m - m.transpose()), AlgebraElement::Trusted{});
}

GroupElement exp_group(const AlgebraElement& omega) {
  if (omega.matrix().isZero(0.0)) return GroupElement::identity(omega.dim());
  const SchurBlocks s = real_schur(omega.matrix());
  const Eigen::MatrixXd e = map_blocks(
      s.t, [](const Eigen::Matrix2d& b) { return planar_rotation(0.5 * (b(1, 0) - b(0, 1))); },
      [](double) { return 1.0; });
  Eigen::MatrixXd g = s.q * e * s.q.transpose();
  // One Newton step towards the orthogonal polar factor removes rounding drift.
  g = 0.5 * (g + g.inverse().transpose());
  return GroupElement(std::move(g), 1, GroupElement::Trusted{});
}

AlgebraElement log_group(const GroupElement& g) {
  if (g.determinant_sign() < 0) {
    throw Error(Errc::wrong_component, "logarithm of a determinant -1 matrix");
  }
  const SchurBlocks s = real_schur(g.matrix());
  double worst = 0.0;
  const Eigen::MatrixXd l = map_blocks(
      s.t,
      [&worst](const Eigen::Matrix2d& b) {
        const double angle = block_angle(b);
        worst = std::max(worst, std::abs(angle));
        return Eigen::Matrix2d(planar_generator(angle));
      },
      [&worst](double v) {
        if (v < 0.0) worst = std::numbers::pi;
        return 0.0;
      });
  if (std::numbers::pi - worst < kCutMargin) {
    std::ostringstream os;
    os << "rotation angle " << worst << " is within " << kCutMargin << " of pi";
    throw Error(Errc::near_cut_locus, os.str());
  }
  return project_skew(s.q * l * s.q.transpose());
}

double max_rotation_angle(const GroupElement& g) {
  const SchurBlocks s = real_schur(g.matrix());
  double worst = 0.0;
  map_blocks(
      s.t,
      [&worst](const Eigen::Matrix2d& b) {
        worst = std::max(worst, std::abs(block_angle(b)));
        return Eigen::Matrix2d::Zero().eval();
      },
      [&worst](double v) {
        if (v < 0.0) worst = std::numbers::pi;
        return 0.0;
      });
  return worst;
}

double inner(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_dim(a, b);
  return kMetricScale * a.matrix().cwiseProduct(b.matrix()).sum();
}

double norm(const AlgebraElement& a) { return std::sqrt(inner(a, a)); }

AlgebraElement transport_to_identity(const GroupElement& g, const Eigen::MatrixXd& v) {
  if (v.rows() != g.matrix().rows() || v.cols() != g.matrix().cols()) {
    throw Error(Errc::dim_mismatch, "tangent vector and base point differ in size");
  }
  const Eigen::MatrixXd right = v * g.matrix().transpose();
  const double err = (right + right.transpose()).cwiseAbs().maxCoeff();
  if (err > 1e-8) {
    std::ostringstream os;
    os << "v g^T is not skew (|.|_max residual " << err << ")";
    throw Error(Errc::not_tangent, os.str());
  }
  return project_skew(right);
}

GroupElement geodesic(const GroupElement& g0, const GroupElement& g1, double s) {
  if (s == 0.0) return g0;
  const AlgebraElement step = log_group(g1 * g0.inverse());
  return exp_group(s * step) * g0;
}

double group_distance(const GroupElement& g0, const GroupElement& g1) {
  return norm(log_group(g1 * g0.inverse()));
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_dim(a, b);
  return project_skew(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

Eigen::MatrixXd component_correction(std::size_t dim, int det_sign) {
  const auto n = static_cast<Index>(dim);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  if (det_sign < 0) f(n - 1, n - 1) = -1.0;
  return f;
}

}  // namespace pcshape
