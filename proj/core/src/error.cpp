#include "pcshape/error.hpp"

namespace pcshape {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::not_square: return "NotSquare";
    case Errc::not_symmetric: return "NotSymmetric";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::non_positive_diagonal: return "NonPositiveDiagonal";
    case Errc::insufficient_realizations: return "InsufficientRealizations";
    case Errc::degenerate_variance: return "DegenerateVariance";
    case Errc::degenerate_defect: return "DegenerateDefect";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::bad_position: return "BadPosition";
    case Errc::not_a_contraction: return "NotAContraction";
    case Errc::index_error: return "IndexError";
    case Errc::bad_dim: return "BadDim";
    case Errc::truncation_window_exceeded: return "TruncationWindowExceeded";
    case Errc::singular_step: return "SingularStep";
    case Errc::near_cut_locus: return "NearCutLocus";
    case Errc::wrong_component: return "WrongComponent";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::not_tangent: return "NotTangent";
    case Errc::not_orthogonal: return "NotOrthogonal";
    case Errc::not_skew: return "NotSkew";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::vanishing_velocity: return "VanishingVelocity";
    case Errc::degenerate_curve: return "DegenerateCurve";
    case Errc::not_closed: return "NotClosed";
    case Errc::io: return "IOError";
    case Errc::parse: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace pcshape
