#include <doctest.h>

#include <Eigen/LU>

#include "qkg/gp/posterior.hpp"
#include "test_support.hpp"

using namespace qkg;
using testing::random_data;
using testing::random_spec;

namespace {

// Dense-inverse posterior: mu = m + k^T K^{-1} (y - m), cov = k(a, b) - k_a^T K^{-1} k_b.
struct DensePosterior {
  gp::Dataset data;
  gp::ModelSpec spec;
  Matrix kinv;

  DensePosterior(gp::Dataset d, gp::ModelSpec s, double jitter) : data(std::move(d)), spec(std::move(s)) {
    const Index n = data.size();
    Matrix k(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        k(i, j) = gp::kernel_eval(data.points.row(i).transpose(), data.points.row(j).transpose(), spec);
    k.diagonal().array() += spec.noise_variance + jitter;
    kinv = k.inverse();
  }

  Vector cross(const Vector& x) const {
    Vector out(data.size());
    for (Index i = 0; i < data.size(); ++i) out[i] = gp::kernel_eval(data.points.row(i).transpose(), x, spec);
    return out;
  }
  double mean(const Vector& x) const {
    return spec.mean_const + cross(x).dot(kinv * (data.values.array() - spec.mean_const).matrix());
  }
  double cov(const Vector& a, const Vector& b) const {
    return gp::kernel_eval(a, b, spec) - cross(a).dot(kinv * cross(b));
  }
};

}  // namespace

TEST_CASE("empty data gives the prior") {
  Rng rng(1);
  const gp::ModelSpec spec = random_spec(2, 0.0, rng);
  gp::Dataset data;
  data.points.resize(0, 2);
  const gp::Posterior post(data, spec);
  for (int t = 0; t < 5; ++t) {
    const Vector x = Vector::Random(2);
    CHECK(post.mean(x) == spec.mean_const);
    CHECK(post.cov(x, x) == doctest::Approx(spec.signal_variance));
  }
}

TEST_CASE("single noise-free observation is interpolated") {
  Rng rng(2);
  const gp::Dataset data = random_data(1, 3, rng);
  const gp::Posterior post(data, random_spec(3, 0.0, rng));
  const Vector x1 = data.points.row(0).transpose();
  CHECK(post.mean(x1) == doctest::Approx(data.values[0]).epsilon(1e-6));
  CHECK(std::abs(post.cov(x1, x1)) < 1e-6);
  CHECK(post.mean_grad(x1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("factored posterior equals the dense-inverse evaluation") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 4;
    const Index n = 1 + t % 6;
    const gp::Dataset data = random_data(n, d, rng);
    const gp::ModelSpec spec = random_spec(d, t % 2 ? 0.2 : 0.0, rng);
    const gp::Posterior post(data, spec);
    const DensePosterior dense(data, spec, post.jitter());
    const Points x = BoxDomain::cube(d, 0.0, 1.0).uniform(3, rng);
    const Matrix cov = post.covs(x, x);
    for (Index i = 0; i < 3; ++i) {
      const Vector xi = x.row(i).transpose();
      CHECK(std::abs(post.mean(xi) - dense.mean(xi)) < 1e-8);
      for (Index j = 0; j < 3; ++j) CHECK(std::abs(cov(i, j) - dense.cov(xi, x.row(j).transpose())) < 1e-8);
    }
    CHECK((post.means(x) - Vector{{post.mean(x.row(0).transpose()), post.mean(x.row(1).transpose()),
                                   post.mean(x.row(2).transpose())}})
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((post.variance(x) - cov.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("posterior variance is nonnegative") {
  Rng rng(4);
  const gp::Dataset data = random_data(6, 2, rng);
  const gp::Posterior post(data, random_spec(2, 0.0, rng));
  const Points x = BoxDomain::cube(2, 0.0, 1.0).uniform(100, rng);
  CHECK(post.variance(x).minCoeff() >= -1e-12);
}

TEST_CASE("posterior mean gradient matches finite differences") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const gp::Dataset data = random_data(3, 2, rng);
    const gp::Posterior post(data, random_spec(2, 0.05, rng));
    const Vector x = BoxDomain::cube(2, 0.0, 1.0).uniform(1, rng).row(0).transpose();
    const Vector fd = testing::central_difference([&](const Vector& z) { return post.mean(z); }, x, 1e-6);
    CHECK(testing::max_rel_err(post.mean_grad(x), fd, 1e-2) < 1e-5);
  }
}

TEST_CASE("free-function wrappers agree with the class") {
  Rng rng(6);
  const gp::Dataset data = random_data(4, 2, rng);
  const gp::ModelSpec spec = random_spec(2, 0.1, rng);
  const gp::Posterior post = gp::build_posterior(data, spec);
  const Vector x = Vector::Constant(2, 0.3), y = Vector::Constant(2, 0.6);
  CHECK(gp::posterior_mean(post, x) == post.mean(x));
  CHECK(gp::posterior_cov(post, x, y) == post.cov(x, y));
  CHECK((gp::posterior_mean_grad(post, x) - post.mean_grad(x)).norm() == 0.0);
}

TEST_CASE("mismatched data is rejected") {
  Rng rng(7);
  gp::Dataset data = random_data(3, 2, rng);
  data.values.conservativeResize(2);
  CHECK_THROWS_AS(gp::Posterior(data, random_spec(2, 0.0, rng)), std::invalid_argument);
  const gp::Dataset ok = random_data(3, 2, rng);
  CHECK_THROWS_AS(gp::Posterior(ok, random_spec(3, 0.0, rng)), std::invalid_argument);
}
