#pragma once

#include <functional>

#include "qkg/acq/batch.hpp"
#include "qkg/gp/posterior.hpp"

namespace qkg::baselines {

struct BaselineConfig {
  /// Exploration width beta_t for iteration t >= 1.
  std::function<double(int)> beta_schedule;
  Index candidate_pool_size = 2000;
  std::size_t n_mc = 1024;
};

/// beta_t = 2 log(|pool| t^2 pi^2 / (6 delta)) with delta = 0.1.
std::function<double(int)> standard_beta_schedule(Index pool_size);

BaselineConfig default_baseline_config();

/// Posterior variance over a fixed pool, updated by kernel-only conditioning on
/// noise-free hallucinated observations (the mean is never touched).
class HallucinatedVariance {
 public:
  HallucinatedVariance(const gp::Posterior& post, Points pool);

  const Points& pool() const { return pool_; }
  const Vector& variance() const { return variance_; }
  Vector stddev() const { return variance_.cwiseMax(0.0).cwiseSqrt(); }

  /// Conditions on a hallucinated observation at pool point `index`.
  void condition_on(Index index);

 private:
  const gp::Posterior* post_;
  Points pool_;
  Matrix whitened_;                 // L^{-1} K(X, pool)
  std::vector<Vector> directions_;  // normalized rank-one updates
  Vector variance_;
};

/// Lower confidence bound mu - sqrt(beta) sigma (minimization orientation).
Vector lower_confidence_bound(const Vector& mean, const Vector& stddev, double beta);

/// GP-BUCB on an explicit pool: each pick minimizes mu^{(n)} - sqrt(beta) sigma_cond.
acq::Batch gp_bucb_select(const gp::Posterior& post, const Points& pool, Index q, double beta);

/// GP-UCB-PE on an explicit pool: LCB minimizer first, then maximal sigma_cond.
acq::Batch gp_ucb_pe_select(const gp::Posterior& post, const Points& pool, Index q, double beta);

/// Pool drawn as a Latin hypercube of config.candidate_pool_size points; beta from
/// config.beta_schedule(iteration).
acq::Batch gp_bucb_select(const gp::Posterior& post, Index q, const BaselineConfig& config, const BoxDomain& box,
                          Rng& rng, int iteration = 1);
acq::Batch gp_ucb_pe_select(const gp::Posterior& post, Index q, const BaselineConfig& config, const BoxDomain& box,
                            Rng& rng, int iteration = 1);

}  // namespace qkg::baselines
