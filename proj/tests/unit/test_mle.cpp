#include <doctest.h>

#include <Eigen/Cholesky>

#include "qkg/gp/mle.hpp"
#include "test_support.hpp"

using namespace qkg;

namespace {

gp::ModelSpec generating_spec() {
  gp::ModelSpec spec;
  spec.mean_const = 0.5;
  spec.signal_variance = 4.0;
  spec.length_scales = Vector::Constant(2, 0.5);
  spec.noise_variance = 0.25;
  return spec;
}

gp::Dataset sample_from_gp(const gp::ModelSpec& spec, Index n, Rng& rng) {
  gp::Dataset data;
  data.points = BoxDomain::cube(spec.dim(), 0.0, 1.0).uniform(n, rng);
  Matrix k = gp::kernel_matrix(data.points, data.points, spec);
  k.diagonal().array() += spec.noise_variance;
  std::normal_distribution<double> normal;
  Vector z(n);
  for (Index i = 0; i < n; ++i) z[i] = normal(rng);
  data.values = Vector::Constant(n, spec.mean_const) + Eigen::LLT<Matrix>(k).matrixL() * z;
  return data;
}

}  // namespace

TEST_CASE("default bounds follow the data scale") {
  Rng rng(1);
  const gp::Dataset data = testing::random_data(10, 2, rng);
  const gp::HyperBounds b = gp::default_bounds(data, BoxDomain::cube(2, 0.0, 2.0));
  CHECK(b.length_lower[0] == doctest::Approx(2e-3));
  CHECK(b.length_upper[1] == doctest::Approx(20.0));
  CHECK(b.noise_upper > b.noise_lower);
  b.validate(2);
}

TEST_CASE("fit recovers the noise variance of a known GP") {
  const gp::ModelSpec truth = generating_spec();
  int bracketed = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const gp::Dataset data = sample_from_gp(truth, 40, rng);
    const gp::ModelSpec fit = gp::fit_hyperparameters_mle(data, gp::default_bounds(data, BoxDomain::cube(2, 0, 1)), rng);
    if (fit.noise_variance >= 0.125 && fit.noise_variance <= 0.5) ++bracketed;
  }
  CHECK(bracketed >= 18);
}

TEST_CASE("fit dominates the generating spec when seeded with it") {
  const gp::ModelSpec truth = generating_spec();
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(static_cast<std::uint64_t>(200 + seed));
    const gp::Dataset data = sample_from_gp(truth, 30, rng);
    gp::MleOptions opts;
    opts.restarts = 2;
    opts.extra_starts.push_back(truth);
    const gp::ModelSpec fit =
        gp::fit_hyperparameters_mle(data, gp::default_bounds(data, BoxDomain::cube(2, 0, 1)), rng, opts);
    CHECK(gp::log_marginal_likelihood(data, fit) >= gp::profile_log_likelihood(data, truth) - 1e-6);
    CHECK(gp::profile_log_likelihood(data, truth) >= gp::log_marginal_likelihood(data, truth) - 1e-9);
  }
}

TEST_CASE("log marginal likelihood matches the dense Gaussian density") {
  Rng rng(3);
  const gp::Dataset data = testing::random_data(5, 2, rng);
  const gp::ModelSpec spec = testing::random_spec(2, 0.1, rng);
  Matrix k = gp::kernel_matrix(data.points, data.points, spec);
  k.diagonal().array() += spec.noise_variance;
  const Vector r = data.values - Vector::Constant(5, spec.mean_const);
  const Eigen::LLT<Matrix> llt(k);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double expected = -0.5 * r.dot(llt.solve(r)) - 0.5 * logdet - 2.5 * std::log(2.0 * 3.14159265358979323846);
  CHECK(gp::log_marginal_likelihood(data, spec) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("flat two-point data keeps every hyperparameter inside its bounds") {
  gp::Dataset data;
  data.points = Points(2, 2);
  data.points << 0.1, 0.2, 0.8, 0.9;
  data.values = Vector::Constant(2, 1.5);
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  const gp::HyperBounds b = gp::default_bounds(data, box);
  Rng rng(4);
  const gp::ModelSpec fit = gp::fit_hyperparameters_mle(data, b, rng);
  for (Index j = 0; j < 2; ++j) {
    CHECK(fit.length_scales[j] >= b.length_lower[j]);
    CHECK(fit.length_scales[j] <= b.length_upper[j]);
  }
  CHECK(std::isfinite(fit.signal_variance));
  CHECK(fit.noise_variance <= b.noise_upper);
}

TEST_CASE("fixed noise bounds pin the noise variance") {
  Rng rng(5);
  const gp::Dataset data = testing::random_data(8, 2, rng);
  gp::HyperBounds b = gp::default_bounds(data, BoxDomain::cube(2, 0.0, 1.0));
  b.noise_lower = b.noise_upper = 0.0;
  CHECK(gp::fit_hyperparameters_mle(data, b, rng).noise_variance == 0.0);
}

TEST_CASE("fit needs two observations") {
  Rng rng(6);
  const gp::Dataset data = testing::random_data(1, 2, rng);
  CHECK_THROWS_AS(gp::fit_hyperparameters_mle(data, gp::default_bounds(data, BoxDomain::cube(2, 0, 1)), rng),
                  PreconditionError);
}
