#include "pcshape/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pcshape/error.hpp"

namespace pcshape {

namespace {

using Index = Eigen::Index;

void require_common_grid(const TsrvCurve& q0, const TsrvCurve& q1) {
  if (q0.segments() != q1.segments() || q0.dim() != q1.dim()) {
    std::ostringstream os;
    os << "curves have " << q0.segments() << " and " << q1.segments() << " segments in dims "
       << q0.dim() << " and " << q1.dim();
    throw Error(Errc::grid_mismatch, os.str());
  }
}

// Coordinates u with u . u' = inner(q, q') (strict upper triangle, scaled).
Eigen::VectorXd metric_coordinates(const AlgebraElement& q) {
  const auto d = static_cast<Index>(q.dim());
  Eigen::VectorXd u(d * (d - 1) / 2);
  const double w = std::sqrt(2.0 * kMetricScale);
  Index k = 0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) u(k++) = w * q.matrix()(i, j);
  }
  return u;
}

std::size_t cell_of(double x, std::size_t cells) {
  const auto c = static_cast<std::ptrdiff_t>(std::floor(x * static_cast<double>(cells)));
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(cells) - 1));
}

bool all_vanishing(const TsrvCurve& q) {
  return std::all_of(q.values.begin(), q.values.end(),
                     [](const AlgebraElement& v) { return norm(v) < kQFloor; });
}

}  // namespace

Reparametrization::Reparametrization(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2 || values_.front() != 0.0 || values_.back() != 1.0) {
    throw Error(Errc::out_of_range, "warp must have at least two samples running from 0 to 1");
  }
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] >= values_[i - 1])) {
      throw Error(Errc::out_of_range, "warp samples must be non-decreasing");
    }
  }
}

Reparametrization Reparametrization::identity(std::size_t pieces) {
  std::vector<double> v(pieces + 1);
  for (std::size_t i = 0; i <= pieces; ++i) {
    v[i] = static_cast<double>(i) / static_cast<double>(pieces);
  }
  return Reparametrization(std::move(v));
}

double Reparametrization::operator()(double t) const {
  const std::size_t p = pieces();
  const double u = std::clamp(t, 0.0, 1.0) * static_cast<double>(p);
  const std::size_t i = std::min(static_cast<std::size_t>(u), p - 1);
  const double f = u - static_cast<double>(i);
  return values_[i] + f * (values_[i + 1] - values_[i]);
}

TsrvCurve tsrv(const ManifoldCurve& c, VanishingPolicy policy) {
  const TangentCurve v = discrete_velocity(c);
  TsrvCurve out{c.front(), {}};
  out.values.reserve(v.values.size());
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    const double speed = norm(v.values[k]);
    if (speed < kQFloor) {
      if (policy == VanishingPolicy::reject) {
        std::ostringstream os;
        os << "segment " << k << " has speed " << speed;
        throw Error(Errc::vanishing_velocity, os.str());
      }
      out.values.push_back(AlgebraElement::zero(c.dim()));
      continue;
    }
    out.values.push_back(v.values[k] / std::sqrt(speed));
  }
  return out;
}

ManifoldCurve tsrv_inverse(const TsrvCurve& q) {
  const std::size_t n = q.segments();
  std::vector<GroupElement> pts;
  pts.reserve(n + 1);
  pts.push_back(q.start);
  for (std::size_t k = 0; k < n; ++k) {
    if (!q.values[k].matrix().allFinite()) {
      throw Error(Errc::out_of_range, "TSRV value is not finite");
    }
    const AlgebraElement step = (norm(q.values[k]) / static_cast<double>(n)) * q.values[k];
    pts.push_back(exp_group(step) * pts.back());
  }
  return ManifoldCurve(std::move(pts), false);
}

double tsrv_distance(const TsrvCurve& q0, const TsrvCurve& q1) {
  require_common_grid(q0, q1);
  const std::size_t n = q0.segments();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const AlgebraElement d = q0.values[k] - q1.values[k];
    sum += inner(d, d);
  }
  return std::sqrt(sum / static_cast<double>(n));
}

double curve_distance(const ManifoldCurve& c0, const ManifoldCurve& c1) {
  if (c0.segments() != c1.segments() || c0.dim() != c1.dim()) {
    throw Error(Errc::grid_mismatch, "curve_distance needs a common grid and dimension");
  }
  return tsrv_distance(tsrv(c0), tsrv(c1));
}

CurveGeodesicPoint geodesic_between(const ManifoldCurve& c0, const ManifoldCurve& c1, double s) {
  if (c0.segments() != c1.segments() || c0.dim() != c1.dim()) {
    throw Error(Errc::grid_mismatch, "geodesic endpoints need a common grid and dimension");
  }
  const TsrvCurve q0 = tsrv(c0);
  const TsrvCurve q1 = tsrv(c1);
  TsrvCurve qs{geodesic(c0.front(), c1.front(), s), {}};
  qs.values.reserve(q0.segments());
  std::vector<std::size_t> vanishing;
  for (std::size_t k = 0; k < q0.segments(); ++k) {
    qs.values.push_back((1.0 - s) * q0.values[k] + s * q1.values[k]);
    if (norm(qs.values.back()) < kQFloor) vanishing.push_back(k);
  }
  ManifoldCurve curve = tsrv_inverse(qs);
  return {std::move(curve), std::move(qs), std::move(vanishing)};
}

std::vector<ManifoldCurve> geodesic_path(const ManifoldCurve& c0, const ManifoldCurve& c1,
                                         std::size_t steps) {
  if (steps == 0) throw Error(Errc::grid_mismatch, "geodesic path needs at least one step");
  std::vector<ManifoldCurve> path;
  path.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(steps);
    path.push_back(geodesic_between(c0, c1, s).curve);
  }
  return path;
}

TsrvCurve compose(const TsrvCurve& q, const Reparametrization& phi, std::size_t segments) {
  if (segments == 0) throw Error(Errc::grid_mismatch, "compose needs at least one segment");
  const std::size_t n1 = q.segments();
  if (n1 == 0) throw Error(Errc::degenerate_curve, "cannot compose an empty TSRV");
  const std::size_t pieces = phi.pieces();
  const auto& knots = phi.values();
  const double dn1 = static_cast<double>(n1);
  const double dp = static_cast<double>(pieces);

  TsrvCurve out{q.start, {}};
  out.values.reserve(segments);
  std::vector<double> cuts;
  for (std::size_t k = 0; k < segments; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(segments);
    const double w = static_cast<double>(k + 1) / static_cast<double>(segments);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Index>(q.dim()), static_cast<Index>(q.dim()));
    const std::size_t p_first = std::min(static_cast<std::size_t>(u * dp), pieces - 1);
    for (std::size_t p = p_first; p < pieces; ++p) {
      const double piece_lo = static_cast<double>(p) / dp;
      const double piece_hi = static_cast<double>(p + 1) / dp;
      if (piece_lo >= w) break;
      const double a = std::max(u, piece_lo);
      const double b = std::min(w, piece_hi);
      if (!(b > a)) continue;
      const double slope = (knots[p + 1] - knots[p]) * dp;
      if (!(slope > 0.0)) continue;
      const double phi_a = knots[p] + slope * (a - piece_lo);
      const double phi_b = knots[p] + slope * (b - piece_lo);
      cuts.assign({a, b});
      for (auto r = static_cast<std::size_t>(std::floor(phi_a * dn1)) + 1;
           static_cast<double>(r) / dn1 < phi_b; ++r) {
        cuts.push_back(a + (static_cast<double>(r) / dn1 - phi_a) / slope);
      }
      std::sort(cuts.begin(), cuts.end());
      const double root = std::sqrt(slope);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double len = cuts[c + 1] - cuts[c];
        if (!(len > 0.0)) continue;
        const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
        const double phi_mid = phi_a + slope * (mid - a);
        acc += (len * root) * q.values[cell_of(phi_mid, n1)].matrix();
      }
    }
    out.values.push_back(project_skew(static_cast<double>(segments) * acc));
  }
  return out;
}

ManifoldCurve reparametrize(const ManifoldCurve& c, const Reparametrization& phi) {
  const TsrvCurve q = tsrv(c, VanishingPolicy::zero);
  const ManifoldCurve warped = tsrv_inverse(compose(q, phi, c.segments()));
  return ManifoldCurve(warped.points(), c.closed());
}

std::vector<std::pair<std::size_t, std::size_t>> slope_steps(std::size_t max_step) {
  if (max_step == 0 || max_step > 16) throw Error(Errc::out_of_range, "DP max step must be in [1, 16]");
  std::vector<std::pair<std::size_t, std::size_t>> steps;
  for (std::size_t a = 1; a <= max_step; ++a) {
    for (std::size_t b = 1; b <= max_step; ++b) {
      if (std::gcd(a, b) == 1) steps.emplace_back(a, b);
    }
  }
  return steps;
}

ElasticMatcher::ElasticMatcher(const TsrvCurve& q0, const TsrvCurve& q1, std::size_t grid,
                               std::size_t max_step)
    : grid_(grid), steps_(slope_steps(max_step)), n0_(q0.segments()), n1_(q1.segments()) {
  if (q0.dim() != q1.dim()) throw Error(Errc::dim_mismatch, "curves live in different groups");
  if (n0_ == 0 || n1_ == 0 || all_vanishing(q0) || all_vanishing(q1)) {
    throw Error(Errc::degenerate_curve, "shape distance needs curves of positive length");
  }
  if (grid_ < std::max(n0_, n1_)) {
    std::ostringstream os;
    os << "grid " << grid_ << " is coarser than the curves (" << n0_ << ", " << n1_ << ")";
    throw Error(Errc::grid_mismatch, os.str());
  }
  u0_.reserve(n0_);
  u1_.reserve(n1_);
  for (const auto& q : q0.values) u0_.push_back(metric_coordinates(q));
  for (const auto& q : q1.values) u1_.push_back(metric_coordinates(q));
}

double ElasticMatcher::edge_cost(std::size_t i, std::size_t j, std::size_t a,
                                 std::size_t b) const {
  const double g = static_cast<double>(grid_);
  const double t0 = static_cast<double>(i) / g;
  const double t1 = static_cast<double>(i + a) / g;
  const double s0 = static_cast<double>(j) / g;
  const double slope = static_cast<double>(b) / static_cast<double>(a);
  const double root = std::sqrt(slope);

  thread_local std::vector<double> cuts;
  cuts.assign({t0, t1});
  // q0 jumps at p / n0 strictly inside (t0, t1).
  for (std::size_t p = i * n0_ / grid_ + 1; p * grid_ < (i + a) * n0_; ++p) {
    if (p * grid_ > i * n0_) cuts.push_back(static_cast<double>(p) / static_cast<double>(n0_));
  }
  // q1 o phi jumps where phi crosses r / n1 strictly inside (s0, s1).
  for (std::size_t r = j * n1_ / grid_ + 1; r * grid_ < (j + b) * n1_; ++r) {
    if (r * grid_ > j * n1_) {
      const double offset = static_cast<double>(r * grid_ - j * n1_) / static_cast<double>(n1_);
      cuts.push_back((static_cast<double>(i) + offset / slope) / g);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double cost = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double len = cuts[c + 1] - cuts[c];
    if (!(len > 0.0)) continue;
    const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
    const std::size_t k0 = cell_of(mid, n0_);
    const std::size_t k1 = cell_of(s0 + slope * (mid - t0), n1_);
    cost += len * (u0_[k0] - root * u1_[k1]).squaredNorm();
  }
  return cost;
}

ShapeMatch ElasticMatcher::solve() const {
  const std::size_t side = grid_ + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(side * side, kInf);
  std::vector<std::uint16_t> move(side * side, 0);
  best[0] = 0.0;
  for (std::size_t i = 1; i < side; ++i) {
    for (std::size_t j = 1; j < side; ++j) {
      double value = kInf;
      std::uint16_t choice = 0;
      for (std::size_t s = 0; s < steps_.size(); ++s) {
        const auto [a, b] = steps_[s];
        if (a > i || b > j) continue;
        const double from = best[(i - a) * side + (j - b)];
        if (from == kInf) continue;
        const double candidate = from + edge_cost(i - a, j - b, a, b);
        if (candidate < value) {
          value = candidate;
          choice = static_cast<std::uint16_t>(s);
        }
      }
      best[i * side + j] = value;
      move[i * side + j] = choice;
    }
  }

  // Walk back from (grid, grid) and sample the warp at every t-node.
  std::vector<std::pair<std::size_t, std::size_t>> path{{grid_, grid_}};
  while (path.back().first != 0) {
    const auto [i, j] = path.back();
    const auto [a, b] = steps_[move[i * side + j]];
    path.emplace_back(i - a, j - b);
  }
  std::reverse(path.begin(), path.end());
  std::vector<double> warp(side, 0.0);
  for (std::size_t e = 0; e + 1 < path.size(); ++e) {
    const auto [i0, j0] = path[e];
    const auto [i1, j1] = path[e + 1];
    for (std::size_t i = i0; i <= i1; ++i) {
      const double f = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
      warp[i] = (static_cast<double>(j0) + f * static_cast<double>(j1 - j0)) /
                static_cast<double>(grid_);
    }
  }
  warp.front() = 0.0;
  warp.back() = 1.0;
  const double total = best[side * side - 1];
  return {std::sqrt(std::max(0.0, total)), Reparametrization(std::move(warp))};
}

ShapeMatch shape_distance(const TsrvCurve& q0, const TsrvCurve& q1, std::size_t grid,
                          std::size_t max_step) {
  return ElasticMatcher(q0, q1, grid, max_step).solve();
}

ShapeMatch shape_distance(const ManifoldCurve& c0, const ManifoldCurve& c1, std::size_t grid,
                          std::size_t max_step) {
  if (c0.dim() != c1.dim()) throw Error(Errc::dim_mismatch, "curves live in different groups");
  return shape_distance(tsrv(c0), tsrv(c1), grid, max_step);
}

ClosedShapeMatch closed_shape_distance(const ManifoldCurve& c0, const ManifoldCurve& c1,
                                       std::size_t grid, std::size_t max_step) {
  if (!c0.closed() || !c1.closed()) {
    throw Error(Errc::not_closed, "closed shape distance needs two closed curves");
  }
  const TsrvCurve q0 = tsrv(close_curve(c0));
  const TsrvCurve q1 = tsrv(close_curve(c1));
  const std::size_t n1 = q1.segments();
  ClosedShapeMatch best{std::numeric_limits<double>::infinity(), 0, Reparametrization::identity(1)};
  TsrvCurve shifted = q1;
  for (std::size_t r = 0; r < n1; ++r) {
    std::rotate_copy(q1.values.begin(), q1.values.begin() + static_cast<std::ptrdiff_t>(r),
                     q1.values.end(), shifted.values.begin());
    ShapeMatch m = shape_distance(q0, shifted, grid, max_step);
    if (m.distance < best.distance) best = {m.distance, r, std::move(m.phi)};
  }
  return best;
}

KarcherResult karcher_mean(const std::vector<ManifoldCurve>& curves,
                           const KarcherOptions& options) {
  if (curves.empty()) throw Error(Errc::degenerate_curve, "mean of no curves");
  const std::size_t n = curves.front().segments();
  const std::size_t d = curves.front().dim();
  std::vector<TsrvCurve> qs;
  qs.reserve(curves.size());
  for (const auto& c : curves) {
    if (c.segments() != n || c.dim() != d) {
      throw Error(Errc::grid_mismatch, "mean needs curves on a common grid and dimension");
    }
    qs.push_back(tsrv(c));
  }
  const std::size_t grid = options.grid == 0 ? 2 * n : options.grid;
  const double weight = 1.0 / static_cast<double>(qs.size());

  auto average = [&](const std::vector<TsrvCurve>& aligned) {
    TsrvCurve mean{curves.front().front(), std::vector<AlgebraElement>(n, AlgebraElement::zero(d))};
    for (const auto& q : aligned) {
      for (std::size_t k = 0; k < n; ++k) mean.values[k] += weight * q.values[k];
    }
    return mean;
  };

  TsrvCurve mean = average(qs);
  KarcherResult result{tsrv_inverse(mean), 0, 0.0};
  if (n == 0) return result;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    std::vector<TsrvCurve> aligned;
    aligned.reserve(qs.size());
    for (const auto& q : qs) {
      const ShapeMatch match = shape_distance(mean, q, grid, options.max_step);
      aligned.push_back(compose(q, match.phi, n));
    }
    TsrvCurve next = average(aligned);
    result.last_change = tsrv_distance(next, mean);
    result.iterations = it + 1;
    mean = std::move(next);
    if (result.last_change < options.tolerance) break;
  }
  result.mean = tsrv_inverse(mean);
  return result;
}

}  // namespace pcshape
