#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errc_helper.hpp"
#include "pcshape/liegroup.hpp"
#include "support.hpp"

using namespace pcshape;
using Eigen::MatrixXd;
using testing_support::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd planar_generator(double theta) {
  MatrixXd a(2, 2);
  a << 0, -theta, theta, 0;
  return a;
}

}  // namespace

TEST(ProjectSkew, Examples) {
  std::mt19937_64 rng(1);
  const MatrixXd a = testing_support::random_skew(4, rng);
  EXPECT_EQ(project_skew(a).matrix(), a);
  MatrixXd s = MatrixXd::Random(3, 3);
  s = (s + s.transpose()).eval();
  EXPECT_EQ(project_skew(s).matrix(), MatrixXd::Zero(3, 3));
  MatrixXd m(2, 2);
  m << 0, 1, 0, 0;
  MatrixXd expected(2, 2);
  expected << 0, 0.5, -0.5, 0;
  EXPECT_EQ(project_skew(m).matrix(), expected);
}

TEST(Elements, Validation) {
  EXPECT_EQ(code_of([] { GroupElement(MatrixXd::Identity(3, 3) * 2); }), Errc::not_orthogonal);
  EXPECT_EQ(code_of([] { AlgebraElement(MatrixXd::Identity(3, 3)); }), Errc::not_skew);
  MatrixXd flip = MatrixXd::Identity(3, 3);
  flip(2, 2) = -1;
  EXPECT_EQ(GroupElement(flip).determinant_sign(), -1);
  EXPECT_EQ(GroupElement::identity(4).determinant_sign(), 1);
}

TEST(ExpGroup, Examples) {
  EXPECT_EQ(exp_group(AlgebraElement::zero(3)).matrix(), MatrixXd::Identity(3, 3));
  MatrixXd quarter(2, 2);
  quarter << 0, -1, 1, 0;
  EXPECT_LT(max_abs(exp_group(AlgebraElement(planar_generator(kPi / 2))).matrix() - quarter), 1e-15);
  std::mt19937_64 rng(2);
  for (std::size_t dim = 2; dim <= 6; ++dim) {
    const AlgebraElement w(testing_support::random_skew(dim, rng, 2.0));
    const MatrixXd prod = exp_group(w).matrix() * exp_group(-w).matrix();
    EXPECT_LT(max_abs(prod - MatrixXd::Identity(dim, dim)), 1e-12);
  }
}

TEST(ExpGroup, MatchesReferenceExponential) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 6);
    const MatrixXd a = testing_support::random_skew(dim, rng, 1.5);
    const GroupElement g = exp_group(AlgebraElement(a));
    EXPECT_LT(max_abs(g.matrix() - testing_support::expm(a)), 1e-12);
    EXPECT_LT(max_abs(g.matrix().transpose() * g.matrix() - MatrixXd::Identity(dim, dim)), 1e-10);
    EXPECT_NEAR(g.matrix().determinant(), 1.0, 1e-10);
  }
}

TEST(LogGroup, Examples) {
  EXPECT_EQ(log_group(GroupElement::identity(3)).matrix(), MatrixXd::Zero(3, 3));
  EXPECT_LT(max_abs(log_group(GroupElement(testing_support::planar(0.3))).matrix() - planar_generator(0.3)),
            1e-15);
  EXPECT_EQ(code_of([] { log_group(GroupElement(testing_support::planar(kPi))); }), Errc::near_cut_locus);
  MatrixXd flip = MatrixXd::Identity(3, 3);
  flip(0, 0) = -1;
  EXPECT_EQ(code_of([&] { log_group(GroupElement(flip)); }), Errc::wrong_component);
  // pi rotation inside SO(3).
  MatrixXd half = MatrixXd::Identity(3, 3);
  half(0, 0) = -1;
  half(1, 1) = -1;
  EXPECT_EQ(code_of([&] { log_group(GroupElement(half)); }), Errc::near_cut_locus);
}

TEST(LogGroup, RoundTripsBothWays) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
    const MatrixXd a = testing_support::random_skew_bounded(dim, rng, kPi - 1e-3);
    const AlgebraElement w(a);
    EXPECT_LT(max_abs(log_group(exp_group(w)).matrix() - a), 1e-9);
    const GroupElement g(testing_support::expm(a));
    EXPECT_LT(max_abs(exp_group(log_group(g)).matrix() - g.matrix()), 1e-9);
    EXPECT_LT(max_abs(log_group(g).matrix() - testing_support::logm(g.matrix())), 1e-8);
  }
}

TEST(LogGroup, ClusteredAngles) {
  // Repeated and zero rotation angles in higher dimensions.
  std::mt19937_64 rng(5);
  for (std::size_t dim = 4; dim <= 7; ++dim) {
    MatrixXd a = MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k + 1 < dim; k += 2) {
      a(k, k + 1) = -1.2;
      a(k + 1, k) = 1.2;
    }
    const MatrixXd q = testing_support::random_rotation(dim, rng);
    a = q * a * q.transpose();
    EXPECT_LT(max_abs(log_group(exp_group(AlgebraElement(a))).matrix() - a), 1e-9);
    EXPECT_NEAR(max_rotation_angle(exp_group(AlgebraElement(a))), 1.2, 1e-12);
  }
}

TEST(Inner, Properties) {
  std::mt19937_64 rng(6);
  const auto basis = testing_support::so_basis(3);
  EXPECT_EQ(inner(AlgebraElement(basis[0]), AlgebraElement(basis[1])), 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
    const AlgebraElement a(testing_support::random_skew(dim, rng));
    const AlgebraElement b(testing_support::random_skew(dim, rng));
    EXPECT_GT(inner(a, a), 0.0);
    EXPECT_NEAR(inner(a, b), (a.matrix() * b.matrix().transpose()).trace(), 1e-12);
    const MatrixXd g = testing_support::random_rotation(dim, rng);
    const AlgebraElement ga(g * a.matrix() * g.transpose());
    const AlgebraElement gb(g * b.matrix() * g.transpose());
    EXPECT_NEAR(inner(ga, gb), inner(a, b), 1e-12);
  }
  EXPECT_EQ(inner(AlgebraElement::zero(3), AlgebraElement::zero(3)), 0.0);
  EXPECT_EQ(code_of([] { inner(AlgebraElement::zero(3), AlgebraElement::zero(2)); }), Errc::dim_mismatch);
}

TEST(KillingForm, TraceOfAdjointProduct) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {3u, 4u, 5u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const MatrixXd a = testing_support::random_skew(n, rng);
      const MatrixXd b = testing_support::random_skew(n, rng);
      const double killing = (testing_support::ad_matrix(a) * testing_support::ad_matrix(b)).trace();
      const double expected = -(static_cast<double>(n) - 2.0) * inner(AlgebraElement(a), AlgebraElement(b)) / kMetricScale;
      EXPECT_NEAR(killing, expected, 1e-9);
    }
  }
}

TEST(TransportToIdentity, Properties) {
  std::mt19937_64 rng(8);
  const MatrixXd w = testing_support::random_skew(4, rng);
  EXPECT_LT(max_abs(transport_to_identity(GroupElement::identity(4), w).matrix() - w), 1e-15);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
    const GroupElement g(testing_support::random_rotation(dim, rng));
    const MatrixXd om = testing_support::random_skew(dim, rng);
    const MatrixXd v = om * g.matrix();
    const AlgebraElement t = transport_to_identity(g, v);
    EXPECT_LT(max_abs(t.matrix() - om), 1e-12);
    // The bi-invariant metric at g is the same Frobenius pairing.
    EXPECT_NEAR(norm(t), v.norm(), 1e-10);
  }
  const GroupElement g(testing_support::random_rotation(3, rng));
  EXPECT_EQ(code_of([&] { transport_to_identity(g, MatrixXd::Identity(3, 3)); }), Errc::not_tangent);
}

TEST(Geodesic, Examples) {
  std::mt19937_64 rng(9);
  const GroupElement g0(testing_support::random_rotation(4, rng, 1.0));
  const GroupElement g1(testing_support::random_rotation(4, rng, 1.0));
  EXPECT_LT(max_abs(geodesic(g0, g1, 0.0).matrix() - g0.matrix()), 1e-10);
  EXPECT_LT(max_abs(geodesic(g0, g1, 1.0).matrix() - g1.matrix()), 1e-10);
  for (double s : {0.2, 0.5, 0.9}) EXPECT_LT(max_abs(geodesic(g0, g0, s).matrix() - g0.matrix()), 1e-12);
  const GroupElement mid = geodesic(GroupElement::identity(2), GroupElement(testing_support::planar(0.6)), 0.5);
  EXPECT_LT(max_abs(mid.matrix() - testing_support::planar(0.3)), 1e-15);
}

TEST(Geodesic, ConstantSpeed) {
  std::mt19937_64 rng(10);
  const GroupElement g0(testing_support::random_rotation(5, rng, 2.0));
  const GroupElement g1(testing_support::random_rotation(5, rng, 2.0));
  std::vector<double> speeds;
  GroupElement prev = g0;
  for (int k = 1; k <= 100; ++k) {
    const GroupElement cur = geodesic(g0, g1, k / 100.0);
    speeds.push_back(norm(log_group(cur * prev.inverse())));
    prev = cur;
  }
  const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
  EXPECT_LT((*hi - *lo) / *hi, 1e-8);
  EXPECT_NEAR(group_distance(g0, g1), testing_support::rotation_distance(g0.matrix(), g1.matrix()), 1e-9);
}

TEST(Bracket, Properties) {
  const auto e = testing_support::so_basis(3);
  // Basis order (0,1), (0,2), (1,2), each E_ab - E_ba. The usual rotation
  // generators are L1 = -e(1,2), L2 = e(0,2), L3 = -e(0,1).
  const AlgebraElement l1(-e[2]), l2(e[1]), l3(-e[0]);
  EXPECT_LT(max_abs(bracket(l1, l2).matrix() - l3.matrix()), 1e-15);
  EXPECT_LT(max_abs(bracket(l2, l3).matrix() - l1.matrix()), 1e-15);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 3 + static_cast<std::size_t>(trial % 4);
    const AlgebraElement a(testing_support::random_skew(dim, rng));
    const AlgebraElement b(testing_support::random_skew(dim, rng));
    const AlgebraElement c(testing_support::random_skew(dim, rng));
    EXPECT_EQ(max_abs(bracket(a, a).matrix()), 0.0);
    const AlgebraElement jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
    EXPECT_LT(max_abs(jac.matrix()), 1e-12);
  }
  EXPECT_EQ(code_of([] { bracket(AlgebraElement::zero(3), AlgebraElement::zero(4)); }), Errc::dim_mismatch);
}

TEST(ComponentCorrection, MovesOntoIdentityComponent) {
  MatrixXd flip = MatrixXd::Identity(3, 3);
  flip(1, 1) = -1;
  const MatrixXd f = component_correction(3, -1);
  EXPECT_NEAR((flip * f).determinant(), 1.0, 1e-15);
  EXPECT_EQ(component_correction(3, 1), MatrixXd::Identity(3, 3));
}
