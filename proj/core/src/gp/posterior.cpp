#include "qkg/gp/posterior.hpp"

#include <Eigen/Cholesky>

namespace qkg::gp {

Posterior::Posterior(Dataset data, ModelSpec spec) : data_(std::move(data)), spec_(std::move(spec)) {
  spec_.validate();
  data_.validate();
  const Index n = data_.size();
  if (n == 0) {
    data_.points.resize(0, spec_.dim());
    chol_.resize(0, 0);
    weights_.resize(0);
    return;
  }
  if (data_.dim() != spec_.dim()) throw std::invalid_argument("Posterior: data dimension does not match spec");

  Matrix gram = kernel_matrix(data_.points, data_.points, spec_);
  for (Index i = 0; i < n; ++i) gram(i, i) += spec_.noise_at(data_.points.row(i).transpose());
  CholeskyFactor factor = cholesky_with_jitter(gram);
  chol_ = std::move(factor.lower);
  jitter_ = factor.jitter;

  const Vector resid = data_.values.array() - spec_.mean_const;
  weights_ = solve(resid);
}

double Posterior::mean(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("Posterior::mean: dimension mismatch");
  if (size() == 0) return spec_.mean_const;
  Points row = x.transpose();
  return spec_.mean_const + (kernel_matrix(row, data_.points, spec_) * weights_)(0);
}

Vector Posterior::means(const Points& pts) const {
  if (size() == 0) return Vector::Constant(pts.rows(), spec_.mean_const);
  Vector out = kernel_matrix(pts, data_.points, spec_) * weights_;
  out.array() += spec_.mean_const;
  return out;
}

Vector Posterior::mean_grad(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("Posterior::mean_grad: dimension mismatch");
  if (size() == 0) return Vector::Zero(dim());
  return kernel_grad_x1_rows(x, data_.points, spec_).transpose() * weights_;
}

double Posterior::cov(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2) const {
  const double prior = kernel_eval(x1, x2, spec_);
  if (size() == 0) return prior;
  Points p1 = x1.transpose();
  Points p2 = x2.transpose();
  return prior - whitened_cross(p1).col(0).dot(whitened_cross(p2).col(0));
}

Matrix Posterior::covs(const Points& a, const Points& b) const {
  Matrix out = kernel_matrix(a, b, spec_);
  if (size() == 0) return out;
  out.noalias() -= whitened_cross(a).transpose() * whitened_cross(b);
  return out;
}

Vector Posterior::variance(const Points& pts) const {
  Vector out = Vector::Constant(pts.rows(), spec_.signal_variance);
  if (size() == 0) return out;
  out -= whitened_cross(pts).colwise().squaredNorm().transpose();
  return out;
}

Matrix Posterior::whitened_cross(const Points& pts) const {
  if (size() == 0) return Matrix(0, pts.rows());
  Matrix cross = kernel_matrix(data_.points, pts, spec_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(cross);
  return cross;
}

Vector Posterior::solve(const Eigen::Ref<const Vector>& b) const {
  Vector out = chol_.triangularView<Eigen::Lower>().solve(b);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(out);
  return out;
}

Matrix Posterior::solve_many(const Matrix& b) const {
  Matrix out = chol_.triangularView<Eigen::Lower>().solve(b);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(out);
  return out;
}

Posterior build_posterior(Dataset data, ModelSpec spec) { return Posterior(std::move(data), std::move(spec)); }

double posterior_mean(const Posterior& post, const Eigen::Ref<const Vector>& x) { return post.mean(x); }

double posterior_cov(const Posterior& post, const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2) {
  return post.cov(x1, x2);
}

Vector posterior_mean_grad(const Posterior& post, const Eigen::Ref<const Vector>& x) { return post.mean_grad(x); }

}  // namespace qkg::gp
