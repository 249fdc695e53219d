#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "errc_helper.hpp"
#include "pcshape/curves.hpp"
#include "pcshape/shape.hpp"
#include "support.hpp"

using namespace pcshape;
using Eigen::MatrixXd;
using testing_support::expm;
using testing_support::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

using Fn = std::function<double(double)>;

ManifoldCurve planar_curve(const Fn& theta, std::size_t n) {
  std::vector<GroupElement> pts;
  for (std::size_t k = 0; k <= n; ++k) {
    pts.emplace_back(testing_support::planar(theta(static_cast<double>(k) / static_cast<double>(n))));
  }
  return ManifoldCurve(std::move(pts));
}

/// Scalar SRV of a sampled angle function: s_k = a_k / sqrt|a_k| with
/// a_k = N (theta_{k+1} - theta_k). For SO(2), |v| = sqrt(2) |theta'|, so the
/// TSRV distance is sqrt((sqrt(2) / N) sum (s0_k - s1_k)^2).
double flat_curve_distance(const Fn& t0, const Fn& t1, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    auto srv = [&](const Fn& th) {
      const double a = static_cast<double>(n) * (th(static_cast<double>(k + 1) / n) - th(static_cast<double>(k) / n));
      return a == 0.0 ? 0.0 : a / std::sqrt(std::abs(a));
    };
    const double d = srv(t0) - srv(t1);
    sum += d * d;
  }
  return std::sqrt(std::sqrt(2.0) * sum / static_cast<double>(n));
}

/// Shape distance between increasing angle curves of total turns T0, T1:
/// 2^(1/4) |sqrt(T0) - sqrt(T1)| (Cauchy-Schwarz on the optimal warp).
double flat_shape_distance(double total0, double total1) {
  return std::pow(2.0, 0.25) * std::abs(std::sqrt(total0) - std::sqrt(total1));
}

struct SmoothCurve {
  MatrixXd a;
  MatrixXd b;
  MatrixXd at(double t) const { return expm(t * a) * expm(std::sin(3.0 * t) * b); }
  ManifoldCurve sample(std::size_t n, const Fn& warp = [](double t) { return t; }) const {
    std::vector<GroupElement> pts;
    for (std::size_t k = 0; k <= n; ++k) pts.emplace_back(at(warp(static_cast<double>(k) / static_cast<double>(n))));
    return ManifoldCurve(std::move(pts));
  }
};

SmoothCurve smooth_curve(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {testing_support::random_skew(dim, rng, 1.0), testing_support::random_skew(dim, rng, 0.5)};
}

ManifoldCurve subgroup_curve(const MatrixXd& om, std::size_t n) {
  std::vector<GroupElement> pts;
  for (std::size_t k = 0; k <= n; ++k) pts.emplace_back(expm((static_cast<double>(k) / n) * om));
  return ManifoldCurve(std::move(pts));
}

double max_point_distance(const ManifoldCurve& a, const ManifoldCurve& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.points().size(); ++k) {
    worst = std::max(worst, testing_support::rotation_distance(a[k].matrix(), b[k].matrix()));
  }
  return worst;
}

/// Minimum over every monotone lattice path of the summed edge costs,
/// accumulated in path order.
double exhaustive_cost(const ElasticMatcher& m, std::size_t i, std::size_t j, double acc) {
  const std::size_t g = m.grid();
  if (i == g && j == g) return acc;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : m.steps()) {
    if (i + a > g || j + b > g) continue;
    best = std::min(best, exhaustive_cost(m, i + a, j + b, acc + m.edge_cost(i, j, a, b)));
  }
  return best;
}

const std::vector<Fn>& warps() {
  static const std::vector<Fn> w{
      [](double t) { return t * t * (3.0 - 2.0 * t) * 0.6 + 0.4 * t; },
      [](double t) { return std::pow(t, 1.6); },
      [](double t) { return t + 0.12 * std::sin(2.0 * kPi * t); },
  };
  return w;
}

}  // namespace

TEST(Tsrv, OneParameterSubgroup) {
  std::mt19937_64 rng(1);
  MatrixXd om = testing_support::random_skew(3, rng);
  om *= 4.0 / om.norm();
  const auto q = tsrv(subgroup_curve(om, 50));
  ASSERT_EQ(q.segments(), 50u);
  for (const auto& v : q.values) EXPECT_LT(max_abs(v.matrix() - om / 2.0), 1e-12);
  // Doubling the speed scales q by sqrt(2).
  const auto q2 = tsrv(subgroup_curve(2.0 * om, 50));
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_LT(max_abs(q2.values[k].matrix() - std::sqrt(2.0) * q.values[k].matrix()), 1e-12);
  }
}

TEST(Tsrv, VanishingVelocity) {
  std::vector<GroupElement> pts(4, GroupElement::identity(3));
  const ManifoldCurve c(pts);
  EXPECT_EQ(code_of([&] { tsrv(c); }), Errc::vanishing_velocity);
  const auto q = tsrv(c, VanishingPolicy::zero);
  for (const auto& v : q.values) EXPECT_EQ(max_abs(v.matrix()), 0.0);
}

TEST(TsrvInverse, Examples) {
  std::mt19937_64 rng(2);
  const MatrixXd om = testing_support::random_skew_bounded(3, rng, 2.5);
  const auto c = tsrv_inverse(tsrv(subgroup_curve(om, 100)));
  EXPECT_LT(max_abs(c.back().matrix() - expm(om)), 1e-8);
  const TsrvCurve empty{GroupElement::identity(3), {}};
  EXPECT_EQ(tsrv_inverse(empty).points().size(), 1u);
  // tsrv(tsrv_inverse(q)) = q for random q.
  TsrvCurve q{GroupElement(testing_support::random_rotation(4, rng)), {}};
  for (int k = 0; k < 30; ++k) q.values.emplace_back(testing_support::random_skew(4, rng, 1.0));
  const auto back = tsrv(tsrv_inverse(q));
  EXPECT_LT(max_abs(back.start.matrix() - q.start.matrix()), 1e-15);
  for (std::size_t k = 0; k < 30; ++k) EXPECT_LT(max_abs(back.values[k].matrix() - q.values[k].matrix()), 1e-8);
}

TEST(TsrvInverse, SmoothRoundTrip) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto c = smooth_curve(3, seed).sample(60);
    EXPECT_LT(max_point_distance(tsrv_inverse(tsrv(c)), c), 1e-6);
  }
}

TEST(CurveDistance, Examples) {
  const auto a = smooth_curve(3, 6).sample(40);
  const auto b = smooth_curve(3, 7).sample(40);
  EXPECT_EQ(curve_distance(a, a), 0.0);
  EXPECT_EQ(curve_distance(a, b), curve_distance(b, a));
  EXPECT_EQ(code_of([&] { curve_distance(a, smooth_curve(3, 7).sample(41)); }), Errc::grid_mismatch);
}

TEST(CurveDistance, PlanarClosedForm) {
  const Fn t0 = [](double t) { return 1.3 * t + 0.2 * std::sin(2 * t); };
  const Fn t1 = [](double t) { return -0.5 * t * t + 0.9 * t; };
  for (std::size_t n : {10u, 57u, 100u}) {
    EXPECT_NEAR(curve_distance(planar_curve(t0, n), planar_curve(t1, n)), flat_curve_distance(t0, t1, n), 1e-12);
  }
}

TEST(GeodesicBetween, Properties) {
  const auto c0 = smooth_curve(3, 8).sample(30);
  const auto c1 = smooth_curve(3, 9).sample(30);
  EXPECT_LT(max_point_distance(geodesic_between(c0, c1, 0.0).curve, c0), 1e-6);
  EXPECT_LT(max_point_distance(geodesic_between(c0, c1, 1.0).curve, c1), 1e-6);
  for (double s : {0.0, 0.3, 1.0}) EXPECT_LT(max_point_distance(geodesic_between(c0, c0, s).curve, c0), 1e-6);
  const double ds = 0.125;
  for (int i = 1; i < 7; ++i) {
    const auto qa = geodesic_between(c0, c1, (i - 1) * ds).tsrv;
    const auto qb = geodesic_between(c0, c1, i * ds).tsrv;
    const auto qc = geodesic_between(c0, c1, (i + 1) * ds).tsrv;
    for (std::size_t k = 0; k < 30; ++k) {
      const MatrixXd second = qa.values[k].matrix() - 2.0 * qb.values[k].matrix() + qc.values[k].matrix();
      EXPECT_LT(max_abs(second), 1e-12);
    }
  }
}

TEST(GeodesicBetween, FlagsVanishingSegments) {
  // A planar curve and its mirror image: at s = 1/2 every q cancels.
  const auto c0 = planar_curve([](double t) { return 0.8 * t; }, 10);
  const auto c1 = planar_curve([](double t) { return -0.8 * t; }, 10);
  const auto mid = geodesic_between(c0, c1, 0.5);
  EXPECT_EQ(mid.vanishing.size(), 10u);
  for (const auto& x : mid.curve.points()) EXPECT_LT(max_abs(x.matrix() - MatrixXd::Identity(2, 2)), 1e-15);
  const auto path = geodesic_path(c0, c1, 4);
  EXPECT_NEAR(path_energy(path), std::pow(curve_distance(c0, c1), 2), 1e-9);
}

TEST(GeodesicPath, EnergyMatchesSquaredDistance) {
  const auto c0 = smooth_curve(4, 10).sample(25);
  const auto c1 = smooth_curve(4, 11).sample(25);
  const double e = path_energy(geodesic_path(c0, c1, 10));
  const double d2 = std::pow(curve_distance(c0, c1), 2);
  EXPECT_NEAR(e / d2, 1.0, 0.01);
}

TEST(Reparametrization, Validation) {
  EXPECT_EQ(code_of([] { Reparametrization({0.0, 0.6, 0.5, 1.0}); }), Errc::out_of_range);
  EXPECT_EQ(code_of([] { Reparametrization({0.1, 1.0}); }), Errc::out_of_range);
  const Reparametrization phi({0.0, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(phi(0.25), 0.25);
  const Reparametrization id = Reparametrization::identity(4);
  EXPECT_EQ(id.pieces(), 4u);
  EXPECT_DOUBLE_EQ(id(0.7), 0.7);
}

TEST(Compose, IdentityAndPlanarOracle) {
  const auto c = smooth_curve(3, 12).sample(20);
  const auto q = tsrv(c);
  const auto same = compose(q, Reparametrization::identity(20), 20);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_LT(max_abs(same.values[k].matrix() - q.values[k].matrix()), 1e-14);
  // Constant-speed planar curve warped by phi(t) = t^2 (sampled at 41 knots):
  // (q o phi) sqrt(phi') averaged over each output cell.
  const auto line = planar_curve([](double t) { return t; }, 10);
  std::vector<double> knots(41);
  for (std::size_t i = 0; i <= 40; ++i) knots[i] = std::pow(i / 40.0, 2);
  const auto warped = compose(tsrv(line), Reparametrization(knots), 10);
  const double q0 = tsrv(line).values[0].matrix()(1, 0);
  for (std::size_t k = 0; k < 10; ++k) {
    double expected = 0.0;
    for (std::size_t i = 4 * k; i < 4 * k + 4; ++i) expected += std::sqrt((knots[i + 1] - knots[i]) * 40.0) / 4.0;
    EXPECT_NEAR(warped.values[k].matrix()(1, 0), q0 * expected, 1e-12);
  }
}

TEST(ElasticMatcher, EdgeCostMatchesQuadrature) {
  const auto q0 = tsrv(smooth_curve(3, 13).sample(7));
  const auto q1 = tsrv(smooth_curve(3, 14).sample(5));
  const ElasticMatcher m(q0, q1, 9);
  auto piece = [](const TsrvCurve& q, double t) {
    const std::size_t n = q.segments();
    const std::size_t k = std::min(n - 1, static_cast<std::size_t>(t * n));
    return q.values[k].matrix();
  };
  for (const auto& [a, b] : m.steps()) {
    for (std::size_t i = 0; i + a <= 9; i += 2) {
      for (std::size_t j = 0; j + b <= 9; j += 3) {
        const double slope = static_cast<double>(b) / static_cast<double>(a);
        const int samples = 20000;
        double sum = 0.0;
        for (int s = 0; s < samples; ++s) {
          const double t = (i + (s + 0.5) / samples * a) / 9.0;
          const double u = (j + (s + 0.5) / samples * b) / 9.0;
          sum += (piece(q0, t) - std::sqrt(slope) * piece(q1, u)).squaredNorm();
        }
        const double quad = sum * (static_cast<double>(a) / 9.0) / samples;
        EXPECT_NEAR(m.edge_cost(i, j, a, b), quad, 2e-3 * std::max(1.0, quad)) << i << "," << j << " " << a << "/" << b;
      }
    }
  }
}

TEST(ShapeDistance, Basics) {
  const auto c = smooth_curve(3, 15).sample(30);
  const auto self = shape_distance(c, c, 60);
  EXPECT_EQ(self.distance, 0.0);
  for (std::size_t i = 0; i <= 60; ++i) EXPECT_DOUBLE_EQ(self.phi.values()[i], i / 60.0);
  const auto other = smooth_curve(3, 16).sample(30);
  EXPECT_LE(shape_distance(c, other, 60).distance, curve_distance(c, other) + 1e-12);
  EXPECT_EQ(code_of([&] { shape_distance(c, other, 20); }), Errc::grid_mismatch);
  EXPECT_EQ(code_of([&] { shape_distance(c, smooth_curve(4, 1).sample(30), 60); }), Errc::dim_mismatch);
  std::vector<GroupElement> still(5, GroupElement::identity(3));
  EXPECT_EQ(code_of([&] { shape_distance(tsrv(ManifoldCurve(still), VanishingPolicy::zero), tsrv(c), 60); }),
            Errc::degenerate_curve);
}

TEST(ShapeDistance, DynamicProgrammeIsExhaustiveOptimum) {
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto q0 = tsrv(smooth_curve(3, 100 + n).sample(n));
    const auto q1 = tsrv(smooth_curve(3, 200 + n).sample(n));
    const ElasticMatcher m(q0, q1, n);
    const double brute = exhaustive_cost(m, 0, 0, 0.0);
    EXPECT_EQ(m.solve().distance, std::sqrt(brute)) << "n=" << n;
  }
}

TEST(ShapeDistance, WarpInvariance) {
  // A warped copy is close in shape but not in the curve metric. The residue
  // comes from piecewise-constant TSRVs and lattice slopes, and shrinks with N.
  const auto sc = smooth_curve(3, 17);
  for (const auto& w : warps()) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {50u, 100u, 200u}) {
      const auto c = sc.sample(n);
      const auto cw = sc.sample(n, w);
      const double ratio = shape_distance(c, cw, 2 * n).distance / curve_distance(c, cw);
      EXPECT_LT(ratio, 0.8 * prev) << "n=" << n;
      prev = ratio;
    }
    EXPECT_LT(prev, 0.07);
  }
}

TEST(ShapeDistance, WiderNeighbourhoodHelps) {
  const auto sc = smooth_curve(3, 17);
  const auto c = sc.sample(60);
  const auto cw = sc.sample(60, warps()[2]);
  const double narrow = shape_distance(c, cw, 120, 3).distance;
  const double wide = shape_distance(c, cw, 120).distance;
  EXPECT_LT(wide, 0.6 * narrow);
  EXPECT_EQ(code_of([&] { shape_distance(c, cw, 120, 0); }), Errc::out_of_range);
  EXPECT_EQ(code_of([&] { shape_distance(c, cw, 120, 17); }), Errc::out_of_range);
  EXPECT_EQ(slope_steps(3).size(), 7u);
}

TEST(ShapeDistance, GapShrinksWithGrid) {
  const auto s0 = smooth_curve(3, 18);
  const auto s1 = smooth_curve(3, 19);
  const Fn w = warps()[1];
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {25u, 50u, 100u}) {
    const auto c0 = s0.sample(n);
    const auto c0w = s0.sample(n, w);
    const auto c1 = s1.sample(n);
    const double base = shape_distance(c0, c1, 2 * n).distance;
    const double gap = std::abs(shape_distance(c0w, c1, 2 * n).distance - base) / base;
    EXPECT_LT(gap, prev * 1.0001);
    prev = gap;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(ShapeDistance, PlanarClosedFormAndSymmetry) {
  const Fn t0 = [](double t) { return 1.2 * (t + 0.15 * std::sin(2 * kPi * t)); };
  const Fn t1 = [](double t) { return 0.7 * t * (1.0 + 0.5 * t) / 1.5; };
  const auto c0 = planar_curve(t0, 100);
  const auto c1 = planar_curve(t1, 100);
  const double exact = flat_shape_distance(1.2, 0.7);
  const double d01 = shape_distance(c0, c1, 200).distance;
  const double d10 = shape_distance(c1, c0, 200).distance;
  EXPECT_NEAR(d01 / exact, 1.0, 0.02);
  EXPECT_NEAR(d10 / d01, 1.0, 0.02);
}

TEST(ShapeDistance, PlanarTriangleInequality) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> total(0.3, 2.0);
  std::uniform_real_distribution<double> wiggle(-0.1, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<ManifoldCurve> cs;
    for (int i = 0; i < 3; ++i) {
      const double tt = total(rng);
      const double w = wiggle(rng);
      cs.push_back(planar_curve([=](double t) { return tt * (t + w * std::sin(2 * kPi * t)); }, 60));
    }
    const double ab = shape_distance(cs[0], cs[1], 120).distance;
    const double bc = shape_distance(cs[1], cs[2], 120).distance;
    const double ac = shape_distance(cs[0], cs[2], 120).distance;
    EXPECT_LE(ac, (ab + bc) * 1.01);
  }
}

TEST(ClosedShapeDistance, ShiftInvariance) {
  // Closed loop c(t) = exp(cos(2 pi t) A + sin(2 pi t) B), re-started at
  // different samples and translated back to the identity.
  std::mt19937_64 rng(21);
  const MatrixXd a = testing_support::random_skew(3, rng, 0.6);
  const MatrixXd b = testing_support::random_skew(3, rng, 0.6);
  auto loop = [&](double t) { return expm(std::cos(2 * kPi * t) * a + std::sin(2 * kPi * t) * b); };
  const std::size_t n = 40;
  auto sample = [&](double shift) {
    const MatrixXd base = loop(shift).transpose();
    std::vector<GroupElement> pts;
    for (std::size_t k = 0; k <= n; ++k) pts.emplace_back(loop(shift + static_cast<double>(k) / n) * base);
    return close_curve(ManifoldCurve(std::move(pts), true));
  };
  const auto c = sample(0.0);
  // Size of the curve: its TSRV distance from a constant curve.
  const double scale = tsrv_distance(tsrv(c), TsrvCurve{c.front(), std::vector<AlgebraElement>(n, AlgebraElement::zero(3))});
  EXPECT_EQ(closed_shape_distance(c, c, 2 * n).distance, 0.0);
  const auto on_grid = closed_shape_distance(c, sample(7.0 / n), 2 * n);
  EXPECT_LT(on_grid.distance, 1e-9);
  EXPECT_EQ(on_grid.shift, n - 7);
  // Off-grid starts leave a discretisation residue proportional to the offset.
  const double quarter = closed_shape_distance(c, sample(7.25 / n), 2 * n).distance;
  const double half = closed_shape_distance(c, sample(7.5 / n), 2 * n).distance;
  EXPECT_LT(half, 0.1 * scale);
  EXPECT_LT(half, 0.1 * curve_distance(c, sample(7.5 / n)));
  EXPECT_NEAR(half / quarter, 2.0, 0.2);
  EXPECT_EQ(code_of([&] { closed_shape_distance(c, smooth_curve(3, 1).sample(n), 2 * n); }), Errc::not_closed);
}

TEST(KarcherMean, TrivialCases) {
  const auto c = smooth_curve(3, 22).sample(20);
  EXPECT_LT(max_point_distance(karcher_mean({c}).mean, c), 1e-8);
  EXPECT_LT(max_point_distance(karcher_mean({c, c}).mean, c), 1e-8);
  EXPECT_EQ(code_of([&] { karcher_mean({c, smooth_curve(3, 1).sample(21)}); }), Errc::grid_mismatch);
}

TEST(KarcherMean, PlanarTsrvMidpoint) {
  const double a = 0.4, b = 1.6;
  const auto mean = karcher_mean({planar_curve([=](double t) { return a * t; }, 30),
                                  planar_curve([=](double t) { return b * t; }, 30)});
  const double rate = std::pow((std::sqrt(a) + std::sqrt(b)) / 2.0, 2);
  const auto expected = planar_curve([=](double t) { return rate * t; }, 30);
  EXPECT_LT(max_point_distance(mean.mean, expected), 1e-9);
}
