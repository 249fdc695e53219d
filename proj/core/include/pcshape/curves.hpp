#pragma once

#include <cstddef>
#include <vector>

#include "pcshape/dilation.hpp"
#include "pcshape/liegroup.hpp"

namespace pcshape {

/// Samples x_0 .. x_N of a curve on the rotation group at t = k / N.
///
/// All points share one dimension and lie on the identity component. A
/// closed curve is only a flag here; close_curve() makes x_N equal x_0.
class ManifoldCurve {
 public:
  ManifoldCurve(std::vector<GroupElement> points, bool closed = false);

  /// Number of segments N (points().size() - 1).
  std::size_t segments() const noexcept { return points_.size() - 1; }
  std::size_t dim() const noexcept { return points_.front().dim(); }
  bool closed() const noexcept { return closed_; }
  const std::vector<GroupElement>& points() const noexcept { return points_; }
  const GroupElement& operator[](std::size_t k) const { return points_.at(k); }
  const GroupElement& front() const { return points_.front(); }
  const GroupElement& back() const { return points_.back(); }

 private:
  std::vector<GroupElement> points_;
  bool closed_ = false;
};

/// Right-trivialised log-velocities v_0 .. v_{N-1} on a uniform grid of step 1/N.
struct TangentCurve {
  std::vector<AlgebraElement> values;
};

/// Marks the curve closed and makes the last point equal the first: a last
/// point within 1e-9 of x_0 is snapped onto it, otherwise x_0 is appended.
ManifoldCurve close_curve(const ManifoldCurve& c);

/// Right-multiplies every point by h.
ManifoldCurve translate(const ManifoldCurve& c, const GroupElement& h);

/// Curve x_k = (W_k F)(W_0 F)^T built from a dilation sequence, where F is the
/// component correction of the sequence. Starts at the identity.
ManifoldCurve from_dilation(const DilationSequence& seq, bool closed);

/// Resamples to M + 1 points with a cubic spline in segment-local charts.
///
/// Segment k is interpolated in the chart y = log(x x_k^T) around x_k: the
/// knots x_{k-2} .. x_{k+3} (those that exist and are inside the injectivity
/// radius) are lifted, a not-a-knot cubic spline is fitted per matrix entry,
/// and exp maps the result back. Knots are reproduced exactly.
ManifoldCurve spline_resample(const ManifoldCurve& c, std::size_t m);

/// exp((tN - k) log(x_{k+1} x_k^T)) x_k on segment k.
GroupElement piecewise_geodesic(const ManifoldCurve& c, double t);

/// Samples piecewise_geodesic at t = i / m, i = 0 .. m.
ManifoldCurve sample_piecewise_geodesic(const ManifoldCurve& c, std::size_t m);

/// v_k = N log(x_{k+1} x_k^T).
TangentCurve discrete_velocity(const ManifoldCurve& c);

/// Discrete path energy of a path of curves c^0 .. c^S on a uniform grid in s:
/// sum_s (|log(x_0^{s+1} (x_0^s)^T)|^2 + (1/N) sum_k |q_k^{s+1} - q_k^s|^2) / ds,
/// where q is the TSRV of each curve. Throws GridMismatch unless all curves
/// share N and dim.
double path_energy(const std::vector<ManifoldCurve>& path);

}  // namespace pcshape
