#pragma once

#include <cstdint>
#include <random>

namespace pcshape {

/// Seeded generator with a fully specified output sequence.
///
/// Engine: std::mt19937_64 (its output is fixed by the C++ standard).
/// Uniforms: the top 53 bits of one engine draw, scaled by 2^-53, in [0, 1).
/// Normals: Box-Muller on two uniforms, returning the cosine branch and
/// caching the sine branch for the next call. The distribution classes of
/// <random> are avoided because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pcshape
