#pragma once

#include <vector>

#include "qkg/acq/batch.hpp"
#include "qkg/gp/posterior.hpp"

namespace qkg::acq {

/// Posterior quantities of one candidate batch z^{1:q} that every reparameterized
/// estimator needs:
///
///   C = K^{(n)}(Z, Z) + diag(noise(z_i)),   D = chol(C) (jittered),
///   sigma_tilde(x) = K^{(n)}(x, Z) D^{-T},
///
/// so that mu^{(n+q)}(x) = mu^{(n)}(x) + sigma_tilde(x) Z_q with Z_q standard normal.
///
/// With gradients enabled it also holds, for every free row i and coordinate j,
/// dC/dz_ij and the matching Cholesky derivative dD/dz_ij.
///
/// The model keeps a pointer to `post`; the posterior must outlive it.
class BatchModel {
 public:
  /// `gradient_rows` < 0 means no gradient pieces; otherwise rows [0, gradient_rows) are free.
  BatchModel(const gp::Posterior& post, Points batch, Index gradient_rows = -1);

  Index q() const { return batch_.rows(); }
  Index dim() const { return batch_.cols(); }
  Index gradient_rows() const { return gradient_rows_; }
  const Points& points() const { return batch_; }
  const gp::Posterior& posterior() const { return *post_; }

  const Matrix& factor() const { return factor_; }
  double jitter() const { return jitter_; }
  /// mu^{(n)}(z_r) for every row.
  const Vector& mean() const { return mean_; }
  /// K^{(n)}(Z, Z) without the noise diagonal.
  const Matrix& cross_batch() const { return cross_batch_; }

  /// K^{(n)}(A, Z) given whitened_a = L^{-1} K(X, A).
  Matrix cross(const Points& a, const Matrix& whitened_a) const;
  /// sigma_tilde for each row of a cross-covariance block: kn D^{-T}.
  Matrix sigma_tilde(const Matrix& kn) const;
  /// D^{-T} z, the weights that turn d(sigma_tilde) into d(sigma_tilde Z_q).
  Vector whiten(const Vector& z) const;

  /// Row i: gradient of mu^{(n)} at z_i.
  const Matrix& mean_grad() const { return mean_grad_; }
  const Matrix& d_cov(Index i, Index j) const { return d_cov_[slot(i, j)]; }
  const Matrix& d_factor(Index i, Index j) const { return d_factor_[slot(i, j)]; }

  /// For a point a that does not move with the batch: entry (i, j) is
  /// d K^{(n)}(a, z_i) / d z_ij. `kinv_k` is (K + diag(noise))^{-1} K(X, a).
  Matrix cross_grad_fixed(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& kinv_k) const;

 private:
  std::size_t slot(Index i, Index j) const { return static_cast<std::size_t>(i * dim() + j); }

  const gp::Posterior* post_;
  Points batch_;
  Index gradient_rows_;
  Matrix whitened_;    // L^{-1} K(X, Z)
  Matrix kinv_cross_;  // (K + noise)^{-1} K(X, Z)
  Matrix cross_batch_;
  Matrix factor_;
  double jitter_ = 0.0;
  Vector mean_;
  Matrix mean_grad_;
  std::vector<Matrix> grad_rows_;  // per free row i: grad_{z_i} k(z_i, X_l), n x d
  std::vector<Matrix> d_cov_;
  std::vector<Matrix> d_factor_;
};

/// Moves rows that coincide (within 1e-12) with an earlier row by 1e-9 x box width,
/// staying inside the box. Returns the number of rows moved.
Index separate_duplicate_rows(Points& batch, const BoxDomain* box);

}  // namespace qkg::acq
