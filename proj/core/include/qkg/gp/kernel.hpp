#pragma once

#include "qkg/common.hpp"

namespace qkg::gp {

/// Hyperparameters of a constant-mean GP prior with an ARD Matern 5/2 kernel.
struct ModelSpec {
  double mean_const = 0.0;
  double signal_variance = 1.0;
  Vector length_scales;
  double noise_variance = 0.0;

  Index dim() const { return length_scales.size(); }

  /// Observation noise variance at `x`. Only homoscedastic noise ships.
  double noise_at(const Eigen::Ref<const Vector>& /*x*/) const { return noise_variance; }

  /// Throws std::invalid_argument on non-positive scales or negative noise.
  void validate() const;
  void validate(Index expected_dim) const;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.mean_const == b.mean_const && a.signal_variance == b.signal_variance &&
           a.length_scales == b.length_scales && a.noise_variance == b.noise_variance;
  }
};

/// Observed design points (one per row) and their values.
struct Dataset {
  Points points;
  Vector values;

  Index size() const { return values.size(); }
  Index dim() const { return points.cols(); }

  void validate() const;
  void append(const Eigen::Ref<const Vector>& x, double y);
};

/// k(x1, x2) = s^2 (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r),  r^2 = sum_j (x1_j - x2_j)^2 / l_j^2.
double kernel_eval(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                   const ModelSpec& spec);

/// Gradient of k with respect to its first argument; zero when x1 == x2.
Vector kernel_grad_x1(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                      const ModelSpec& spec);

/// Gram matrix K(A, B) for row-stored point sets.
Matrix kernel_matrix(const Points& a, const Points& b, const ModelSpec& spec);

/// Rows: grad_{x} k(x, b_l) for every row b_l of `b`, i.e. an |b| x d matrix.
Matrix kernel_grad_x1_rows(const Eigen::Ref<const Vector>& x, const Points& b, const ModelSpec& spec);

/// d k / d log(l_j) for every pair, one matrix per dimension (used by MLE).
std::vector<Matrix> kernel_log_lengthscale_derivs(const Points& a, const ModelSpec& spec);

namespace detail {

// Raw-pointer kernel used by the matrix builders; `inv_ls2` holds 1 / l_j^2.
double matern52(const double* a, const double* b, const double* inv_ls2, Index dim, double s2);

}  // namespace detail

}  // namespace qkg::gp
