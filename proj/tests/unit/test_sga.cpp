#include <doctest.h>

#include "qkg/opt/sga.hpp"
#include "test_support.hpp"

using namespace qkg;

namespace {

// Estimator for f(z) = -||z - c||^2 with exact gradients.
opt::BatchEstimator quadratic(const Points& c) {
  return [c](const acq::Batch& b, std::uint64_t seed) {
    acq::StochasticEstimate est;
    est.value = -(b.points - c).squaredNorm();
    est.gradient = -2.0 * (b.points - c);
    est.seed = seed;
    return est;
  };
}

}  // namespace

TEST_CASE("projection clamps, keeps interior points and is idempotent") {
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  const Points z{{0.3, 0.7}, {1.4, -0.2}};
  const Points p = opt::project_to_box(z, box);
  CHECK(p.row(0) == z.row(0));
  CHECK(p(1, 0) == 1.0);
  CHECK(p(1, 1) == 0.0);
  CHECK(opt::project_to_box(p, box) == p);
}

TEST_CASE("schedule validation follows the step-size conditions") {
  opt::SgaSchedule s;
  s.validate();
  for (double alpha : {0.5, 0.3, 1.2}) {
    s.alpha = alpha;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  s.alpha = 1.0;
  s.validate();
  s.a = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  opt::SgaSchedule t;
  CHECK(t.step(1) > t.step(2));
  CHECK(opt::SgaSchedule::defaults_for(BoxDomain::cube(2, -15.0, 15.0)).a == doctest::Approx(9.0));
}

TEST_CASE("quadratic with an interior optimum converges") {
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  const Points c{{0.3, 0.8}};
  opt::SgaSchedule s;
  s.a = 0.5;
  s.offset = 10.0;
  s.alpha = 0.7;
  s.max_steps = 200;
  s.n_starts = 4;
  Rng rng(1);
  const opt::SgaResult r = opt::sga_maximize(quadratic(c), quadratic(c), box, 1, s, rng);
  CHECK((r.best.points - c).cwiseAbs().maxCoeff() < 1e-2);
  for (const auto& t : r.trajectories) CHECK((t.final.points - c).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("quadratic with an exterior optimum converges to the closest box point") {
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  const Points c{{1.6, 0.4}, {-0.5, -0.5}};
  opt::SgaSchedule s;
  s.a = 0.5;
  s.max_steps = 200;
  s.n_starts = 2;
  Rng rng(2);
  const opt::SgaResult r = opt::sga_maximize(quadratic(c), quadratic(c), box, 2, s, rng);
  const Points expected{{1.0, 0.4}, {0.0, 0.0}};
  CHECK((r.best.points - expected).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("zero steps return the projected start") {
  const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
  opt::SgaSchedule s;
  s.max_steps = 0;
  s.n_starts = 1;
  opt::SgaOptions options;
  options.initial_batches.push_back(acq::Batch(Points{{1.5, 0.25}}));
  Rng rng(3);
  const Points c{{0.5, 0.5}};
  const opt::SgaResult r = opt::sga_maximize(quadratic(c), quadratic(c), box, 1, s, rng, options);
  CHECK(r.best.points == Points{{1.0, 0.25}});
}

TEST_CASE("the step displacement is capped per coordinate") {
  const BoxDomain box = BoxDomain::cube(1, 0.0, 10.0);
  opt::SgaSchedule s;
  s.a = 100.0;
  s.max_steps = 1;
  s.n_starts = 1;
  opt::SgaOptions options;
  options.initial_batches.push_back(acq::Batch(Points{{5.0}}));
  Rng rng(4);
  const Points c{{10.0}};
  const opt::SgaResult r = opt::sga_maximize(quadratic(c), quadratic(c), box, 1, s, rng, options);
  CHECK(r.best.points(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("sga is deterministic for a fixed generator state") {
  const BoxDomain box = BoxDomain::cube(3, -1.0, 1.0);
  const Points c = Points::Constant(2, 3, 0.2);
  // a noisy estimator whose noise depends only on the seed
  const opt::BatchEstimator noisy = [c](const acq::Batch& b, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    acq::StochasticEstimate est;
    est.value = -(b.points - c).squaredNorm() + 0.01 * normal(rng);
    est.gradient = -2.0 * (b.points - c);
    for (Index k = 0; k < est.gradient.size(); ++k) est.gradient.data()[k] += 0.1 * normal(rng);
    return est;
  };
  opt::SgaSchedule s;
  Rng a(5), b(5);
  CHECK(opt::sga_maximize(noisy, noisy, box, 2, s, a).best.points ==
        opt::sga_maximize(noisy, noisy, box, 2, s, b).best.points);
}

TEST_CASE("diverging trajectories are dropped and total divergence throws") {
  const BoxDomain box = BoxDomain::cube(1, 0.0, 1.0);
  const opt::BatchEstimator broken = [](const acq::Batch&, std::uint64_t) {
    acq::StochasticEstimate est;
    est.gradient = Matrix::Constant(1, 1, std::nan(""));
    return est;
  };
  opt::SgaSchedule s;
  s.n_starts = 2;
  Rng rng(6);
  CHECK_THROWS_AS(opt::sga_maximize(broken, broken, box, 1, s, rng), NumericalError);
}
