#include <benchmark/benchmark.h>

#include "qkg/acq/qkg.hpp"
#include "qkg/baselines/qei.hpp"
#include "qkg/gp/mle.hpp"
#include "qkg/gp/posterior.hpp"

using namespace qkg;

namespace {

gp::Dataset make_data(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  gp::Dataset data;
  data.points = BoxDomain::cube(d, 0.0, 1.0).uniform(n, rng);
  data.values = Vector(n);
  for (Index i = 0; i < n; ++i) data.values[i] = (data.points.row(i).array() - 0.4).square().sum();
  return data;
}

gp::ModelSpec make_spec(Index d, double noise) {
  gp::ModelSpec spec;
  spec.signal_variance = 1.0;
  spec.length_scales = Vector::Constant(d, 0.4);
  spec.noise_variance = noise;
  return spec;
}

sampling::DiscreteSet make_disc(Index m, Index d, const gp::Dataset& data) {
  Rng rng(99);
  sampling::DiscreteSet disc;
  disc.points = BoxDomain::cube(d, 0.0, 1.0).uniform(m, rng);
  disc.provenance.assign(static_cast<std::size_t>(m), sampling::Provenance::posterior_minimum_sample);
  disc.add_rows(data.points, sampling::Provenance::past_observation);
  return disc;
}

}  // namespace

static void BM_KernelMatrix(benchmark::State& state) {
  const Index n = state.range(0);
  const gp::Dataset data = make_data(n, 4, 1);
  const gp::ModelSpec spec = make_spec(4, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(gp::kernel_matrix(data.points, data.points, spec));
  state.SetComplexityN(n);
}
BENCHMARK(BM_KernelMatrix)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);

static void BM_PosteriorFit(benchmark::State& state) {
  const gp::Dataset data = make_data(state.range(0), 2, 2);
  const gp::ModelSpec spec = make_spec(2, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(gp::Posterior(data, spec));
}
BENCHMARK(BM_PosteriorFit)->Arg(20)->Arg(60)->Arg(120);

static void BM_MleFit(benchmark::State& state) {
  const gp::Dataset data = make_data(state.range(0), 2, 3);
  const gp::HyperBounds bounds = gp::default_bounds(data, BoxDomain::cube(2, 0.0, 1.0));
  gp::MleOptions options;
  options.restarts = 3;
  options.max_iterations = 60;
  for (auto _ : state) {
    Rng rng(4);
    benchmark::DoNotOptimize(gp::fit_hyperparameters_mle(data, bounds, rng, options));
  }
}
BENCHMARK(BM_MleFit)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

// Arguments: discretization size, batch size.
static void BM_QkgGradient(benchmark::State& state) {
  const Index m = state.range(0), q = state.range(1);
  const gp::Dataset data = make_data(20, 2, 5);
  const gp::Posterior post(data, make_spec(2, 0.01));
  const acq::QkgEvaluator eval(post, make_disc(m, 2, data));
  Rng rng(6);
  const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(q, rng));
  McOptions mc;
  mc.n_mc = 64;
  for (auto _ : state) benchmark::DoNotOptimize(eval.gradient(batch, mc));
}
BENCHMARK(BM_QkgGradient)->Args({100, 4})->Args({1000, 1})->Args({1000, 4})->Unit(benchmark::kMicrosecond);

static void BM_QkgValue(benchmark::State& state) {
  const gp::Dataset data = make_data(20, 2, 7);
  const gp::Posterior post(data, make_spec(2, 0.01));
  const acq::QkgEvaluator eval(post, make_disc(1000, 2, data));
  Rng rng(8);
  const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(4, rng));
  McOptions mc;
  mc.n_mc = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval.value(batch, mc));
}
BENCHMARK(BM_QkgValue)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_QeiGradient(benchmark::State& state) {
  const gp::Dataset data = make_data(20, 2, 9);
  const gp::Posterior post(data, make_spec(2, 0.0));
  Rng rng(10);
  const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(state.range(0), rng));
  McOptions mc;
  mc.n_mc = 64;
  for (auto _ : state) benchmark::DoNotOptimize(baselines::qei_value(post, batch, mc, true));
}
BENCHMARK(BM_QeiGradient)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
