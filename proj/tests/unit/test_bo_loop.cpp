#include <doctest.h>

#include "qkg/bench/bo_loop.hpp"
#include "qkg/bench/speedup.hpp"
#include "test_support.hpp"

using namespace qkg;
using bench::Policy;

namespace {

// Small settings that keep a run well under a second.
bench::RunConfig quick(Policy policy, Index q, int iterations, std::uint64_t seed = 1) {
  bench::RunConfig c;
  c.objective = "branin2";
  c.policy = policy;
  c.q = q;
  c.iterations = iterations;
  c.seed = seed;
  c.discretization_samples = 50;
  c.tuning.sga_starts = 2;
  c.tuning.sga_steps = 10;
  c.tuning.sga_mc = 16;
  c.tuning.selection_mc = 64;
  c.tuning.minima_pool = 50;
  c.tuning.mle_restarts = 1;
  c.tuning.ucb_pool = 200;
  return c;
}

void check_same(const bench::RunTrace& a, const bench::RunTrace& b) {
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].recommended == b.records[k].recommended);
    CHECK(a.records[k].recommended_value == b.records[k].recommended_value);
    CHECK(a.records[k].batch.points == b.records[k].batch.points);
  }
  CHECK(a.observed_values == b.observed_values);
}

}  // namespace

TEST_CASE("one sequential iteration consumes one evaluation") {
  const bench::RunTrace t = bench::run_bo_loop(quick(Policy::qkg, 1, 1));
  REQUIRE(t.records.size() == 2);
  CHECK(t.records[0].evaluations == 6);
  CHECK(t.records[1].evaluations == 7);
  CHECK(t.observed_values.size() == 7);
}

TEST_CASE("zero iterations are rejected") {
  bench::RunConfig c = quick(Policy::qkg, 1, 1);
  c.iterations = -1;
  CHECK_THROWS_AS(bench::run_bo_loop(c), std::invalid_argument);
  c = quick(Policy::qkg, 1, 1);
  c.initial_samples = 1;
  CHECK_THROWS_AS(bench::run_bo_loop(c), std::invalid_argument);
}

TEST_CASE("evaluation accounting and nonnegative regret for every policy") {
  for (Policy p : {Policy::qkg, Policy::qei, Policy::gp_bucb, Policy::gp_ucb_pe}) {
    const bench::RunTrace t = bench::run_bo_loop(quick(p, 3, 2, 4));
    REQUIRE(t.records.size() == 3);
    for (std::size_t s = 0; s < t.records.size(); ++s) {
      CHECK(t.records[s].evaluations == 6 + static_cast<Index>(s) * 3);
      CHECK(t.records[s].regret >= 0.0);
      CHECK(t.records[s].log10_regret >= -12.0);
      CHECK(bench::make_objective("branin2").box.contains(t.records[s].recommended));
    }
    CHECK(t.observed_values.size() == 12);
    CHECK(t.records.back().batch.q() == 0);
  }
}

TEST_CASE("identical configurations give identical traces") {
  for (Policy p : {Policy::qkg, Policy::gp_ucb_pe}) {
    bench::RunConfig c = quick(p, 2, 2, 9);
    c.noise_sd = 0.5;
    check_same(bench::run_bo_loop(c), bench::run_bo_loop(c));
  }
}

TEST_CASE("q-KG and q-EI choose the same batches on the restricted discretization") {
  bench::RunConfig kg = quick(Policy::qkg, 2, 2, 3);
  kg.tuning.restrict_discretization = true;
  bench::RunConfig ei = kg;
  ei.policy = Policy::qei;
  const bench::RunTrace a = bench::run_bo_loop(kg);
  const bench::RunTrace b = bench::run_bo_loop(ei);
  for (std::size_t s = 0; s + 1 < a.records.size(); ++s)
    CHECK((a.records[s].batch.points - b.records[s].batch.points).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("recommendation minimizes the posterior mean, not the observed values") {
  // a single low noisy observation among consistently high neighbours
  gp::Dataset data;
  data.points = Points{{0.1}, {0.2}, {0.3}, {0.4}, {0.5}, {0.6}, {0.7}, {0.8}, {0.9}};
  data.values = Vector{{0.40, 0.20, 0.05, 0.00, 0.05, 0.20, 0.40, -0.30, 0.90}};
  gp::ModelSpec spec;
  spec.signal_variance = 0.3;
  spec.length_scales = Vector::Constant(1, 0.25);
  spec.noise_variance = 0.25;
  const gp::Posterior post(data, spec);
  const BoxDomain box = BoxDomain::cube(1, 0.0, 1.0);
  const Vector rec = bench::recommend(post, data.points, box, 0);
  Index by_mean = 0, by_value = 0;
  post.means(data.points).minCoeff(&by_mean);
  data.values.minCoeff(&by_value);
  CHECK(by_mean != by_value);
  CHECK(rec[0] == data.points(by_mean, 0));
  const Vector polished = bench::recommend(post, data.points, box, 30);
  CHECK(post.mean(polished) <= post.mean(rec));
}

TEST_CASE("asynchronous runs hold points back and keep the accounting") {
  bench::RunConfig c = quick(Policy::qkg, 4, 2, 5);
  const bench::RunTrace sync = bench::run_bo_loop(c);
  c.async_pending = 0;
  check_same(sync, bench::run_bo_loop(c));
  c.async_pending = 2;
  const bench::RunTrace async = bench::run_bo_loop(c);
  REQUIRE(async.records.size() == 3);
  CHECK(async.records[2].evaluations == 14);
  CHECK(async.observed_values.size() == 14);
  CHECK(async.records[1].batch.q() == 4);
  c.async_pending = 4;
  CHECK_THROWS_AS(bench::run_bo_loop(c), std::invalid_argument);
  c = quick(Policy::qei, 4, 2);
  c.async_pending = 1;
  CHECK_THROWS_AS(bench::run_bo_loop(c), std::invalid_argument);
}

TEST_CASE("policy names round-trip") {
  for (Policy p : {Policy::qkg, Policy::qei, Policy::gp_bucb, Policy::gp_ucb_pe})
    CHECK(bench::parse_policy(bench::policy_name(p)) == p);
  CHECK_THROWS_AS(bench::parse_policy("random"), std::invalid_argument);
}

TEST_CASE("log10 regret floor") {
  CHECK(bench::log10_regret(0.0) == -12.0);
  CHECK(bench::log10_regret(1e-3) == doctest::Approx(-3.0));
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(bench::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(bench::median({1.0, 2.0, 3.0, 4.0}) == 2.5);
  CHECK(bench::quantile({0.0, 10.0}, 0.25) == 2.5);
  CHECK_THROWS_AS(bench::quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("speed-up table shape and the sequential case") {
  bench::RunConfig base = quick(Policy::qkg, 1, 2);
  base.noise_sd = 0.5;
  const std::vector<bench::SpeedupRow> seq = bench::speedup_experiment(base, {1}, {1, 2});
  REQUIRE(seq.size() == 3);
  const bench::RunTrace one = bench::run_bo_loop(base);
  bench::RunConfig other = base;
  other.seed = 2;
  const bench::RunTrace two = bench::run_bo_loop(other);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(seq[k].q == 1);
    CHECK(seq[k].iteration == static_cast<int>(k));
    CHECK(seq[k].median_regret == doctest::Approx(0.5 * (one.records[k].regret + two.records[k].regret)));
  }
  const std::vector<bench::SpeedupRow> rows = bench::speedup_experiment(base, {1, 2}, {1});
  CHECK(rows.size() == 2 * 3);
  CHECK(rows[3].q == 2);
  CHECK(rows[5].evaluations == 6 + 2 * 2);
}
