#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcshape {

/// Failure categories raised by the library. Every throwing operation raises
/// pcshape::Error carrying one of these codes.
enum class Errc {
  // corr
  not_square,
  not_symmetric,
  not_positive_definite,
  non_positive_diagonal,
  insufficient_realizations,
  degenerate_variance,
  degenerate_defect,
  // dilation
  out_of_range,
  bad_position,
  not_a_contraction,
  index_error,
  bad_dim,
  truncation_window_exceeded,
  singular_step,
  // liegroup
  near_cut_locus,
  wrong_component,
  dim_mismatch,
  not_tangent,
  not_orthogonal,
  not_skew,
  // curves / shape
  grid_mismatch,
  vanishing_velocity,
  degenerate_curve,
  not_closed,
  // io
  io,
  parse,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pcshape
