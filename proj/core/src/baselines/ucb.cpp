#include "qkg/baselines/ucb.hpp"

#include <cmath>
#include <numbers>

#include "qkg/sampling/latin_hypercube.hpp"

namespace qkg::baselines {

namespace {

// Variance below which a hallucinated observation carries no information.
constexpr double kVarianceFloor = 1e-10;

Index argmin(const Vector& v) {
  Index best = 0;
  for (Index k = 1; k < v.size(); ++k) {
    if (v[k] < v[best]) best = k;
  }
  return best;
}

Index argmax(const Vector& v) {
  Index best = 0;
  for (Index k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best;
}

void check_selection(const gp::Posterior& post, const Points& pool, Index q, double beta) {
  if (q < 1) throw std::invalid_argument("UCB selection: q must be at least 1");
  if (pool.rows() < 1 || pool.cols() != post.dim()) throw std::invalid_argument("UCB selection: invalid pool");
  if (!(beta >= 0.0)) throw std::invalid_argument("UCB selection: beta must be nonnegative");
}

}  // namespace

std::function<double(int)> standard_beta_schedule(Index pool_size) {
  const double size = static_cast<double>(pool_size);
  return [size](int t) {
    const double tt = static_cast<double>(std::max(t, 1));
    return 2.0 * std::log(size * tt * tt * std::numbers::pi * std::numbers::pi / (6.0 * 0.1));
  };
}

BaselineConfig default_baseline_config() {
  BaselineConfig config;
  config.beta_schedule = standard_beta_schedule(config.candidate_pool_size);
  return config;
}

HallucinatedVariance::HallucinatedVariance(const gp::Posterior& post, Points pool)
    : post_(&post), pool_(std::move(pool)) {
  whitened_ = post.whitened_cross(pool_);
  variance_ = post.variance(pool_);
}

void HallucinatedVariance::condition_on(Index index) {
  if (index < 0 || index >= pool_.rows()) throw std::out_of_range("HallucinatedVariance: index out of range");
  const double var_s = variance_[index];
  if (!(var_s > kVarianceFloor)) return;
  Points s = pool_.row(index);
  // conditional covariance between every pool point and the selected one
  Vector c = gp::kernel_matrix(pool_, s, post_->spec()).col(0);
  if (post_->size() > 0) c.noalias() -= whitened_.transpose() * whitened_.col(index);
  for (const Vector& u : directions_) c -= u * u[index];
  Vector u = c / std::sqrt(var_s);
  variance_ -= u.cwiseProduct(u);
  variance_[index] = 0.0;
  directions_.push_back(std::move(u));
}

Vector lower_confidence_bound(const Vector& mean, const Vector& stddev, double beta) {
  return mean - std::sqrt(beta) * stddev;
}

acq::Batch gp_bucb_select(const gp::Posterior& post, const Points& pool, Index q, double beta) {
  check_selection(post, pool, q, beta);
  const Vector mean = post.means(pool);
  HallucinatedVariance var(post, pool);
  Points out(q, pool.cols());
  for (Index k = 0; k < q; ++k) {
    const Index pick = argmin(lower_confidence_bound(mean, var.stddev(), beta));
    out.row(k) = pool.row(pick);
    var.condition_on(pick);
  }
  return acq::Batch(std::move(out));
}

acq::Batch gp_ucb_pe_select(const gp::Posterior& post, const Points& pool, Index q, double beta) {
  check_selection(post, pool, q, beta);
  const Vector mean = post.means(pool);
  HallucinatedVariance var(post, pool);
  Points out(q, pool.cols());
  const Index first = argmin(lower_confidence_bound(mean, var.stddev(), beta));
  out.row(0) = pool.row(first);
  var.condition_on(first);
  for (Index k = 1; k < q; ++k) {
    const Index pick = argmax(var.variance());
    out.row(k) = pool.row(pick);
    var.condition_on(pick);
  }
  return acq::Batch(std::move(out));
}

acq::Batch gp_bucb_select(const gp::Posterior& post, Index q, const BaselineConfig& config, const BoxDomain& box,
                          Rng& rng, int iteration) {
  const Points pool = sampling::latin_hypercube(config.candidate_pool_size, box, rng);
  const double beta = config.beta_schedule ? config.beta_schedule(iteration) : 0.0;
  return gp_bucb_select(post, pool, q, beta);
}

acq::Batch gp_ucb_pe_select(const gp::Posterior& post, Index q, const BaselineConfig& config, const BoxDomain& box,
                            Rng& rng, int iteration) {
  const Points pool = sampling::latin_hypercube(config.candidate_pool_size, box, rng);
  const double beta = config.beta_schedule ? config.beta_schedule(iteration) : 0.0;
  return gp_ucb_pe_select(post, pool, q, beta);
}

}  // namespace qkg::baselines
