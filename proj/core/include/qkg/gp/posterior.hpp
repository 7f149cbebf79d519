#pragma once

#include "qkg/gp/cholesky.hpp"
#include "qkg/gp/kernel.hpp"

namespace qkg::gp {

/// Immutable fitted-GP snapshot.
///
/// Holds the jittered Cholesky factor L of K(X, X) + diag(noise) and the weights
/// alpha = (K + diag(noise))^{-1} (y - mean). Safe to share read-only across threads.
class Posterior {
 public:
  /// Throws NumericalError if the Gram matrix cannot be factored at any jitter level.
  Posterior(Dataset data, ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }
  const Matrix& chol_factor() const { return chol_; }
  const Vector& weights() const { return weights_; }
  double jitter() const { return jitter_; }
  Index size() const { return data_.size(); }
  Index dim() const { return spec_.dim(); }

  double mean(const Eigen::Ref<const Vector>& x) const;
  Vector means(const Points& pts) const;
  Vector mean_grad(const Eigen::Ref<const Vector>& x) const;

  double cov(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2) const;
  /// Posterior cross-covariance K^{(n)}(A, B).
  Matrix covs(const Points& a, const Points& b) const;
  /// Posterior variances at each row of `pts`.
  Vector variance(const Points& pts) const;

  /// L^{-1} K(X, pts): n x |pts|. Reused by callers that need many cross-covariances.
  Matrix whitened_cross(const Points& pts) const;
  /// (K + diag(noise))^{-1} b.
  Vector solve(const Eigen::Ref<const Vector>& b) const;
  Matrix solve_many(const Matrix& b) const;

 private:
  Dataset data_;
  ModelSpec spec_;
  Matrix chol_;
  Vector weights_;
  double jitter_ = 0.0;
};

Posterior build_posterior(Dataset data, ModelSpec spec);
double posterior_mean(const Posterior& post, const Eigen::Ref<const Vector>& x);
double posterior_cov(const Posterior& post, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2);
Vector posterior_mean_grad(const Posterior& post, const Eigen::Ref<const Vector>& x);

}  // namespace qkg::gp
