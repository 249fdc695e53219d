#include "pcshape/curves.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "pcshape/error.hpp"

namespace pcshape {

namespace {

using Index = Eigen::Index;

constexpr double kCloseTolerance = 1e-9;
constexpr double kVelocityFloor = 1e-10;
constexpr std::size_t kSplineReachBack = 2;
constexpr std::size_t kSplineReachForward = 3;

// Cubic spline with not-a-knot ends through values at the integer knots
// 0 .. p-1; each knot value is a column vector (one row per matrix entry).
// Two knots give the chord, three the interpolating parabola.
class UniformSpline {
 public:
  explicit UniformSpline(Eigen::MatrixXd knots) : y_(std::move(knots)) {
    const Index p = y_.cols();
    second_ = Eigen::MatrixXd::Zero(y_.rows(), p);
    if (p == 3) {
      const Eigen::VectorXd curvature = y_.col(0) - 2.0 * y_.col(1) + y_.col(2);
      second_.colwise() = curvature;
    } else if (p >= 4) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(p, y_.rows());
      a(0, 0) = 1.0;
      a(0, 1) = -2.0;
      a(0, 2) = 1.0;
      for (Index i = 1; i + 1 < p; ++i) {
        a(i, i - 1) = 1.0;
        a(i, i) = 4.0;
        a(i, i + 1) = 1.0;
        rhs.row(i) = 6.0 * (y_.col(i + 1) - 2.0 * y_.col(i) + y_.col(i - 1)).transpose();
      }
      a(p - 1, p - 3) = 1.0;
      a(p - 1, p - 2) = -2.0;
      a(p - 1, p - 1) = 1.0;
      second_ = a.partialPivLu().solve(rhs).transpose();
    }
  }

  Eigen::VectorXd operator()(double u) const {
    const Index last = y_.cols() - 1;
    const Index i = std::clamp<Index>(static_cast<Index>(std::floor(u)), 0, last - 1);
    const double b = u - static_cast<double>(i);
    const double a = 1.0 - b;
    return second_.col(i) * (a * a * a / 6.0) + second_.col(i + 1) * (b * b * b / 6.0) +
           (y_.col(i) - second_.col(i) / 6.0) * a + (y_.col(i + 1) - second_.col(i + 1) / 6.0) * b;
  }

 private:
  Eigen::MatrixXd y_;
  Eigen::MatrixXd second_;
};

// Spline of segment k in the chart x = exp(y) x_k.
struct SegmentChart {
  std::size_t first_knot = 0;
  UniformSpline spline;
};

std::optional<AlgebraElement> try_log(const GroupElement& g) {
  try {
    return log_group(g);
  } catch (const Error& e) {
    if (e.code() == Errc::near_cut_locus) return std::nullopt;
    throw;
  }
}

SegmentChart build_chart(const ManifoldCurve& c, std::size_t k) {
  const std::size_t n = c.segments();
  const GroupElement base_inv = c[k].inverse();
  const std::size_t lo_limit = k >= kSplineReachBack ? k - kSplineReachBack : 0;
  const std::size_t hi_limit = std::min(n, k + kSplineReachForward);

  std::vector<std::optional<AlgebraElement>> lifts(hi_limit - lo_limit + 1);
  std::size_t lo = k;
  std::size_t hi = k + 1;
  for (std::size_t j = k + 1; j <= hi_limit; ++j) {
    auto y = try_log(c[j] * base_inv);
    if (!y) {
      if (j == k + 1) {
        std::ostringstream os;
        os << "points " << k << " and " << k + 1 << " are too far apart for a chart";
        throw Error(Errc::near_cut_locus, os.str());
      }
      break;
    }
    lifts[j - lo_limit] = std::move(y);
    hi = j;
  }
  for (std::size_t j = k; j-- > lo_limit;) {
    auto y = try_log(c[j] * base_inv);
    if (!y) break;
    lifts[j - lo_limit] = std::move(y);
    lo = j;
  }
  lifts[k - lo_limit] = AlgebraElement::zero(c.dim());

  const auto entries = static_cast<Index>(c.dim() * c.dim());
  Eigen::MatrixXd knots(entries, static_cast<Index>(hi - lo + 1));
  for (std::size_t j = lo; j <= hi; ++j) {
    knots.col(static_cast<Index>(j - lo)) =
        Eigen::Map<const Eigen::VectorXd>(lifts[j - lo_limit]->matrix().data(), entries);
  }
  return {lo, UniformSpline(std::move(knots))};
}

GroupElement evaluate_chart(const ManifoldCurve& c, const SegmentChart& chart, std::size_t k,
                            double local) {
  const double u = static_cast<double>(k - chart.first_knot) + local;
  const Eigen::VectorXd y = chart.spline(u);
  const auto d = static_cast<Index>(c.dim());
  const Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(y.data(), d, d);
  return exp_group(project_skew(m)) * c[k];
}

// Square-root velocity of one log-velocity; vanishing velocities map to zero.
AlgebraElement srv_or_zero(const AlgebraElement& v) {
  const double speed = norm(v);
  if (speed < kVelocityFloor) return AlgebraElement::zero(v.dim());
  return v / std::sqrt(speed);
}

}  // namespace

ManifoldCurve::ManifoldCurve(std::vector<GroupElement> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
  if (points_.empty()) throw Error(Errc::degenerate_curve, "curve has no points");
  const std::size_t d = points_.front().dim();
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k].dim() != d) throw Error(Errc::dim_mismatch, "curve points differ in size");
    if (points_[k].determinant_sign() < 0) {
      std::ostringstream os;
      os << "point " << k << " is not on the identity component";
      throw Error(Errc::wrong_component, os.str());
    }
  }
}

ManifoldCurve close_curve(const ManifoldCurve& c) {
  std::vector<GroupElement> pts = c.points();
  const double gap = (pts.back().matrix() - pts.front().matrix()).cwiseAbs().maxCoeff();
  if (pts.size() > 1 && gap <= kCloseTolerance) {
    pts.back() = pts.front();
  } else {
    pts.push_back(pts.front());
  }
  return ManifoldCurve(std::move(pts), true);
}

ManifoldCurve translate(const ManifoldCurve& c, const GroupElement& h) {
  std::vector<GroupElement> pts;
  pts.reserve(c.points().size());
  for (const auto& x : c.points()) pts.push_back(x * h);
  return ManifoldCurve(std::move(pts), c.closed());
}

ManifoldCurve from_dilation(const DilationSequence& seq, bool closed) {
  const Eigen::MatrixXd f = component_correction(seq.dim(), seq.determinant_sign());
  const Eigen::MatrixXd base_inv = (seq[0] * f).transpose();
  std::vector<GroupElement> pts;
  pts.reserve(seq.count());
  for (const auto& w : seq.matrices()) pts.emplace_back(w * f * base_inv);
  return ManifoldCurve(std::move(pts), closed);
}

ManifoldCurve spline_resample(const ManifoldCurve& c, std::size_t m) {
  const std::size_t n = c.segments();
  if (m < n || m == 0) {
    std::ostringstream os;
    os << "cannot resample " << n << " segments to " << m;
    throw Error(Errc::grid_mismatch, os.str());
  }
  if (n == 0) return ManifoldCurve(std::vector<GroupElement>(m + 1, c[0]), c.closed());

  std::vector<std::optional<SegmentChart>> charts(n);
  std::vector<GroupElement> out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const std::size_t scaled = i * n;  // t * N * M
    const std::size_t k = std::min(scaled / m, n - 1);
    const std::size_t remainder = scaled - k * m;
    if (remainder == 0) {
      out.push_back(c[k]);
      continue;
    }
    if (remainder == m) {  // t = 1 at the last segment
      out.push_back(c[n]);
      continue;
    }
    if (!charts[k]) charts[k] = build_chart(c, k);
    out.push_back(evaluate_chart(c, *charts[k], k,
                                 static_cast<double>(remainder) / static_cast<double>(m)));
  }
  return ManifoldCurve(std::move(out), c.closed());
}

GroupElement piecewise_geodesic(const ManifoldCurve& c, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::out_of_range, "curve parameter outside [0, 1]");
  const std::size_t n = c.segments();
  if (n == 0) return c[0];
  const double u = t * static_cast<double>(n);
  const std::size_t k = std::min(static_cast<std::size_t>(u), n - 1);
  const double local = u - static_cast<double>(k);
  if (local == 0.0) return c[k];
  if (local == 1.0) return c[k + 1];
  return geodesic(c[k], c[k + 1], local);
}

ManifoldCurve sample_piecewise_geodesic(const ManifoldCurve& c, std::size_t m) {
  if (m == 0) throw Error(Errc::grid_mismatch, "need at least one segment");
  const std::size_t n = c.segments();
  std::vector<GroupElement> out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    if (n == 0) {
      out.push_back(c[0]);
      continue;
    }
    const std::size_t scaled = i * n;
    const std::size_t k = std::min(scaled / m, n - 1);
    const std::size_t remainder = scaled - k * m;
    if (remainder == 0) {
      out.push_back(c[k]);
    } else if (remainder == m) {
      out.push_back(c[k + 1]);
    } else {
      out.push_back(
          geodesic(c[k], c[k + 1], static_cast<double>(remainder) / static_cast<double>(m)));
    }
  }
  return ManifoldCurve(std::move(out), c.closed());
}

TangentCurve discrete_velocity(const ManifoldCurve& c) {
  const std::size_t n = c.segments();
  TangentCurve v;
  v.values.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    v.values.push_back(static_cast<double>(n) * log_group(c[k + 1] * c[k].inverse()));
  }
  return v;
}

double path_energy(const std::vector<ManifoldCurve>& path) {
  if (path.size() < 2) return 0.0;
  const std::size_t n = path.front().segments();
  const std::size_t d = path.front().dim();
  std::vector<std::vector<AlgebraElement>> srv;
  srv.reserve(path.size());
  for (const auto& c : path) {
    if (c.segments() != n || c.dim() != d) {
      throw Error(Errc::grid_mismatch, "path curves differ in segment count or dimension");
    }
    std::vector<AlgebraElement> q;
    q.reserve(n);
    for (const auto& v : discrete_velocity(c).values) q.push_back(srv_or_zero(v));
    srv.push_back(std::move(q));
  }
  const double ds = 1.0 / static_cast<double>(path.size() - 1);
  double energy = 0.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const AlgebraElement start_step = log_group(path[s + 1].front() * path[s].front().inverse());
    double term = inner(start_step, start_step);
    double interior = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const AlgebraElement dq = srv[s + 1][k] - srv[s][k];
      interior += inner(dq, dq);
    }
    if (n > 0) term += interior / static_cast<double>(n);
    energy += term / ds;
  }
  return energy;
}

}  // namespace pcshape
