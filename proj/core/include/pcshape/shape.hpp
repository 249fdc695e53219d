#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pcshape/curves.hpp"

namespace pcshape {

/// TSRVs below this norm count as vanishing.
inline constexpr double kQFloor = 1e-10;

/// Transported square-root-velocity representation of a discrete curve:
/// starting point plus q_0 .. q_{N-1} in the Lie algebra, piecewise constant
/// on [k/N, (k+1)/N).
struct TsrvCurve {
  GroupElement start;
  std::vector<AlgebraElement> values;

  std::size_t segments() const noexcept { return values.size(); }
  std::size_t dim() const noexcept { return start.dim(); }
};

/// Monotone warp of [0, 1] sampled at t = i / (size - 1), linear in between.
class Reparametrization {
 public:
  /// Throws OutOfRange unless values are non-decreasing from 0 to 1.
  explicit Reparametrization(std::vector<double> values);
  static Reparametrization identity(std::size_t pieces);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t pieces() const noexcept { return values_.size() - 1; }
  double operator()(double t) const;

 private:
  std::vector<double> values_;
};

enum class VanishingPolicy {
  reject,  ///< throw VanishingVelocity
  zero,    ///< keep the zero velocity as q = 0
};

/// q_k = v_k / sqrt(|v_k|) with v_k = N log(x_{k+1} x_k^T).
TsrvCurve tsrv(const ManifoldCurve& c, VanishingPolicy policy = VanishingPolicy::reject);

/// x_{k+1} = exp(q_k |q_k| / N) x_k from the stored start.
ManifoldCurve tsrv_inverse(const TsrvCurve& q);

/// L2 distance between TSRVs on a common grid: sqrt((1/N) sum |q0_k - q1_k|^2).
double tsrv_distance(const TsrvCurve& q0, const TsrvCurve& q1);

/// tsrv_distance of the two curves (phi = identity).
double curve_distance(const ManifoldCurve& c0, const ManifoldCurve& c1);

struct CurveGeodesicPoint {
  ManifoldCurve curve;
  TsrvCurve tsrv;
  /// Segments whose interpolated q fell below kQFloor; they contribute zero length.
  std::vector<std::size_t> vanishing;
};

/// Point s of the geodesic between c0 and c1: the inverse TSRV of
/// (1 - s) q0 + s q1.
CurveGeodesicPoint geodesic_between(const ManifoldCurve& c0, const ManifoldCurve& c1, double s);

/// Curves at s = i / steps, i = 0 .. steps.
std::vector<ManifoldCurve> geodesic_path(const ManifoldCurve& c0, const ManifoldCurve& c1,
                                         std::size_t steps);

/// (q o phi) sqrt(phi') averaged exactly over each of `segments` output cells.
TsrvCurve compose(const TsrvCurve& q, const Reparametrization& phi, std::size_t segments);

/// c o phi, built through the TSRV: compose() then tsrv_inverse() from c's start.
ManifoldCurve reparametrize(const ManifoldCurve& c, const Reparametrization& phi);

/// Default DP neighbourhood: lattice moves (a, b), a cells in t and b cells in
/// phi, with 1 <= a, b <= 10. Local warp slopes are limited to the ratios b / a,
/// and the sqrt(phi') weight inherits that quantisation: with a, b <= 3 the
/// distance between a curve and a warped copy of itself stays at 15-40% of
/// their curve distance, which is why the neighbourhood is this wide. Cost
/// grows quadratically with max_step.
inline constexpr std::size_t kDefaultMaxStep = 10;

/// Moves (a, b) with 1 <= a, b <= max_step and gcd(a, b) = 1. The others are
/// chains of these through lattice nodes and add no paths.
std::vector<std::pair<std::size_t, std::size_t>> slope_steps(std::size_t max_step);

struct ShapeMatch {
  double distance = 0.0;
  Reparametrization phi;
};

/// Dynamic-programming solver for
///   min_phi integral |q0(t) - q1(phi(t)) sqrt(phi'(t))|^2 dt
/// over piecewise-linear phi whose knots lie on a grid x grid lattice and
/// whose pieces are slope_steps(max_step) moves. Each lattice edge cost is the exact
/// integral for piecewise-constant q0 and q1.
class ElasticMatcher {
 public:
  ElasticMatcher(const TsrvCurve& q0, const TsrvCurve& q1, std::size_t grid,
                 std::size_t max_step = kDefaultMaxStep);

  std::size_t grid() const noexcept { return grid_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& steps() const noexcept { return steps_; }

  /// Cost of the straight piece from lattice node (i, j) to (i + a, j + b).
  double edge_cost(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const;

  /// Minimal total cost (squared distance) and its warp.
  ShapeMatch solve() const;

 private:
  std::size_t grid_;
  std::vector<std::pair<std::size_t, std::size_t>> steps_;
  std::size_t n0_;
  std::size_t n1_;
  std::vector<Eigen::VectorXd> u0_;  // metric coordinates of q0_k
  std::vector<Eigen::VectorXd> u1_;
};

/// Elastic shape distance; the returned phi warps c1 onto c0.
ShapeMatch shape_distance(const ManifoldCurve& c0, const ManifoldCurve& c1, std::size_t grid,
                          std::size_t max_step = kDefaultMaxStep);
ShapeMatch shape_distance(const TsrvCurve& q0, const TsrvCurve& q1, std::size_t grid,
                          std::size_t max_step = kDefaultMaxStep);

struct ClosedShapeMatch {
  double distance = 0.0;
  std::size_t shift = 0;  ///< start index of c1 giving the minimum
  Reparametrization phi;
};

/// Minimum of shape_distance over cyclic shifts of c1's starting sample.
/// Both curves must be flagged closed; the closing point is enforced first.
ClosedShapeMatch closed_shape_distance(const ManifoldCurve& c0, const ManifoldCurve& c1,
                                       std::size_t grid, std::size_t max_step = kDefaultMaxStep);

struct KarcherOptions {
  std::size_t iterations = 20;
  std::size_t grid = 0;  ///< DP lattice size; 0 means 2N
  std::size_t max_step = kDefaultMaxStep;
  double tolerance = 1e-8;
};

struct KarcherResult {
  ManifoldCurve mean;
  std::size_t iterations = 0;
  double last_change = 0.0;
};

/// Fixed-point mean in the TSRV domain: align every curve to the current
/// mean, average the aligned TSRVs, invert, repeat.
KarcherResult karcher_mean(const std::vector<ManifoldCurve>& curves,
                           const KarcherOptions& options = {});

}  // namespace pcshape
