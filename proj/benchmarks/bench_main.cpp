#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "pcshape/corr.hpp"
#include "pcshape/curves.hpp"
#include "pcshape/dilation.hpp"
#include "pcshape/liegroup.hpp"
#include "pcshape/shape.hpp"

using namespace pcshape;

namespace {

AlgebraElement random_algebra(std::size_t dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
  return project_skew(m);
}

ManifoldCurve wiggle(std::size_t dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto a = random_algebra(dim, rng, 1.0);
  const auto b = random_algebra(dim, rng, 0.5);
  std::vector<GroupElement> pts;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    pts.push_back(exp_group(t * a) * exp_group(std::sin(3.0 * t) * b));
  }
  return ManifoldCurve(std::move(pts));
}

}  // namespace

static void BM_ExpLog(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto a = random_algebra(dim, rng, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(log_group(exp_group(a)));
}
BENCHMARK(BM_ExpLog)->DenseRange(2, 6);

static void BM_ExtractSchurParams(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = gen_pc_process(0.5, 4, 0.5, n, 500, 3);
  const auto r = estimate_ensemble_correlation(data, n).matrix;
  for (auto _ : state) benchmark::DoNotOptimize(extract_schur_params(r));
}
BENCHMARK(BM_ExtractSchurParams)->Arg(8)->Arg(32)->Arg(64);

static void BM_ShapeDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q0 = tsrv(wiggle(3, n, 5));
  const auto q1 = tsrv(wiggle(3, n, 6));
  for (auto _ : state) benchmark::DoNotOptimize(shape_distance(q0, q1, 2 * n));
}
BENCHMARK(BM_ShapeDistance)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
static void BM_ShapeDistanceNeighbourhood(benchmark::State& state) {
  const auto q0 = tsrv(wiggle(3, 50, 5));
  const auto q1 = tsrv(wiggle(3, 50, 6));
  const auto max_step = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shape_distance(q0, q1, 100, max_step));
}
BENCHMARK(BM_ShapeDistanceNeighbourhood)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
