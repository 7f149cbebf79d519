#include <doctest.h>

#include <algorithm>
#include <numbers>

#include <Eigen/LU>

#include "qkg/baselines/qei.hpp"
#include "qkg/baselines/ucb.hpp"
#include "test_support.hpp"

using namespace qkg;
using testing::random_data;
using testing::random_spec;

namespace {

McOptions mc(std::size_t n, std::uint64_t seed) {
  McOptions m;
  m.n_mc = n;
  m.seed = seed;
  return m;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

gp::Posterior prior(Index d, double ls) {
  gp::Dataset data;
  data.points.resize(0, d);
  gp::ModelSpec spec;
  spec.length_scales = Vector::Constant(d, ls);
  return gp::Posterior(data, spec);
}

}  // namespace

TEST_CASE("single-point q-EI matches the closed-form expected improvement") {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const gp::Dataset data = random_data(4, 2, rng);
    const gp::Posterior post(data, random_spec(2, 0.0, rng));
    const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(1, rng));
    const double mu = post.mean(batch.row(0));
    const double sd = std::sqrt(post.cov(batch.row(0), batch.row(0)));
    const double best = data.values.minCoeff();
    const double u = (best - mu) / sd;
    const double exact = (best - mu) * normal_cdf(u) + sd * normal_pdf(u);
    const acq::StochasticEstimate est = baselines::qei_value(post, batch, mc(20000, t));
    CHECK(std::abs(est.value - exact) <= 3.0 * est.value_stderr + 1e-6);
  }
}

TEST_CASE("q-EI at the incumbent is zero and never negative") {
  Rng rng(2);
  const gp::Dataset data = random_data(5, 2, rng);
  const gp::Posterior post(data, random_spec(2, 0.0, rng));
  Index best = 0;
  data.values.minCoeff(&best);
  const acq::StochasticEstimate at = baselines::qei_value(post, acq::Batch(data.points.row(best)), mc(2000, 1));
  CHECK(at.value <= 3.0 * at.value_stderr + 1e-9);
  for (int t = 0; t < 30; ++t) {
    const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(1 + t % 4, rng));
    CHECK(baselines::qei_value(post, batch, mc(64, t)).value >= 0.0);
  }
}

TEST_CASE("q-EI gradient agrees with common-random-number finite differences") {
  Rng rng(3);
  const double h = 1e-5;
  int total = 0, passed = 0;
  for (int t = 0; t < 10; ++t) {
    const gp::Dataset data = random_data(4, 2, rng);
    const gp::Posterior post(data, random_spec(2, t % 2 ? 0.2 : 0.0, rng));
    const acq::Batch batch(BoxDomain::cube(2, 0.0, 1.0).uniform(2, rng));
    const McOptions m = mc(4096, 50 + t);
    const acq::StochasticEstimate g = baselines::qei_value(post, batch, m, true);
    baselines::QeiOptions keep;
    keep.keep_samples = true;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        acq::Batch plus = batch, minus = batch;
        plus.points(i, j) += h;
        minus.points(i, j) -= h;
        const Vector diff = (baselines::qei_value(post, plus, m, false, keep).samples -
                             baselines::qei_value(post, minus, m, false, keep).samples) / (2.0 * h);
        const double nd = static_cast<double>(diff.size());
        const double fd = diff.mean();
        const double se_fd = std::sqrt((diff.array() - fd).square().sum() / (nd - 1.0) / nd);
        ++total;
        if (std::abs(fd - g.gradient(i, j)) <= 3.0 * std::hypot(se_fd, g.gradient_stderr(i, j)) + 1e-6) ++passed;
      }
  }
  CHECK(passed >= total - 1);
}

TEST_CASE("UCB selection with q = 1 is the LCB minimizer") {
  Rng rng(4);
  const gp::Dataset data = random_data(5, 2, rng);
  const gp::Posterior post(data, random_spec(2, 0.0, rng));
  const Points pool = BoxDomain::cube(2, 0.0, 1.0).uniform(300, rng);
  const double beta = 2.0;
  const Vector lcb = baselines::lower_confidence_bound(post.means(pool), post.variance(pool).cwiseMax(0.0).cwiseSqrt(), beta);
  Index best = 0;
  lcb.minCoeff(&best);
  const acq::Batch b = baselines::gp_bucb_select(post, pool, 1, beta);
  const acq::Batch pe = baselines::gp_ucb_pe_select(post, pool, 1, beta);
  CHECK(b.points.row(0) == pool.row(best));
  CHECK(pe.points == b.points);
}

TEST_CASE("GP-BUCB with beta = 0 repeats the mean minimizer") {
  Rng rng(5);
  const gp::Dataset data = random_data(5, 2, rng);
  const gp::Posterior post(data, random_spec(2, 0.0, rng));
  const Points pool = BoxDomain::cube(2, 0.0, 1.0).uniform(200, rng);
  Index best = 0;
  post.means(pool).minCoeff(&best);
  const acq::Batch b = baselines::gp_bucb_select(post, pool, 4, 0.0);
  for (Index i = 0; i < 4; ++i) CHECK(b.points.row(i) == pool.row(best));
}

TEST_CASE("hallucinated conditioning zeroes the variance at the selected point") {
  Rng rng(6);
  const gp::Dataset data = random_data(4, 2, rng);
  const gp::Posterior post(data, random_spec(2, 0.1, rng));
  const Points pool = BoxDomain::cube(2, 0.0, 1.0).uniform(100, rng);
  baselines::HallucinatedVariance var(post, pool);
  const Vector before = var.variance();
  var.condition_on(17);
  var.condition_on(42);
  CHECK(var.stddev()[17] <= 1e-3);
  CHECK(var.stddev()[42] <= 1e-3);
  CHECK((var.variance().array() <= before.array() + 1e-12).all());

  // agrees with exact noise-free conditioning on the two pool points
  Points sel(2, 2);
  sel.row(0) = pool.row(17);
  sel.row(1) = pool.row(42);
  Matrix c = post.covs(sel, sel);
  const Matrix cross = post.covs(pool, sel);
  const Vector exact = before - (cross * c.inverse() * cross.transpose()).diagonal();
  CHECK((var.variance() - exact).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("GP-UCB-PE spreads a batch under the prior") {
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  const gp::Posterior post = prior(2, 0.2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Points pool = box.uniform(200, rng);
    std::vector<double> dists;
    for (Index i = 0; i < pool.rows(); ++i)
      for (Index j = i + 1; j < pool.rows(); ++j) dists.push_back((pool.row(i) - pool.row(j)).norm());
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(dists.size() / 2), dists.end());
    const double median = dists[dists.size() / 2];
    const acq::Batch b = baselines::gp_ucb_pe_select(post, pool, 2, 1.0);
    CHECK((b.points.row(0) - b.points.row(1)).norm() >= 0.5 * median);
    CHECK(box.contains_rows(b.points));
  }
}

TEST_CASE("pool-drawing overloads stay in the box") {
  Rng rng(7);
  const BoxDomain box = BoxDomain::cube(3, -2.0, 2.0);
  const gp::Dataset data = random_data(6, 3, rng, -2.0, 2.0);
  const gp::Posterior post(data, random_spec(3, 0.0, rng));
  baselines::BaselineConfig config = baselines::default_baseline_config();
  config.candidate_pool_size = 300;
  CHECK(config.beta_schedule(2) > config.beta_schedule(1));
  CHECK(box.contains_rows(baselines::gp_bucb_select(post, 4, config, box, rng, 3).points));
  CHECK(box.contains_rows(baselines::gp_ucb_pe_select(post, 4, config, box, rng, 3).points));
}
