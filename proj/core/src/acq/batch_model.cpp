#include "qkg/acq/batch_model.hpp"

#include <string>

namespace qkg::acq {

void Batch::validate(const BoxDomain& box) const {
  if (q() < 1) throw std::invalid_argument("Batch: at least one row is required");
  if (dim() != box.dim()) throw std::invalid_argument("Batch: dimension does not match the box");
  if (!box.contains_rows(points)) throw std::invalid_argument("Batch: rows must lie inside the box");
}

Batch stack(const Batch& top, const Batch& bottom) {
  if (bottom.q() == 0) return top;
  if (top.q() > 0 && top.dim() != bottom.dim()) throw std::invalid_argument("stack: dimension mismatch");
  Points out(top.q() + bottom.q(), std::max(top.dim(), bottom.dim()));
  if (top.q() > 0) out.topRows(top.q()) = top.points;
  out.bottomRows(bottom.q()) = bottom.points;
  return Batch(std::move(out));
}

BatchModel::BatchModel(const gp::Posterior& post, Points batch, Index gradient_rows)
    : post_(&post), batch_(std::move(batch)), gradient_rows_(gradient_rows) {
  if (q() < 1) throw std::invalid_argument("BatchModel: empty batch");
  if (dim() != post.dim()) throw std::invalid_argument("BatchModel: batch dimension does not match the model");
  if (gradient_rows_ > q()) throw std::invalid_argument("BatchModel: gradient_rows exceeds batch size");
  const gp::ModelSpec& spec = post.spec();
  const Index n = post.size();

  whitened_ = post.whitened_cross(batch_);
  cross_batch_ = gp::kernel_matrix(batch_, batch_, spec);
  if (n > 0) cross_batch_.noalias() -= whitened_.transpose() * whitened_;
  mean_ = post.means(batch_);

  Matrix c = cross_batch_;
  for (Index r = 0; r < q(); ++r) c(r, r) += spec.noise_at(batch_.row(r).transpose());
  gp::CholeskyFactor chol = gp::cholesky_with_jitter(c);
  factor_ = std::move(chol.lower);
  jitter_ = chol.jitter;

  if (gradient_rows_ < 0) return;

  const Index d = dim();
  kinv_cross_ = n > 0 ? Matrix(post.chol_factor().transpose().triangularView<Eigen::Upper>().solve(whitened_))
                      : Matrix(0, q());
  mean_grad_ = Matrix::Zero(q(), d);
  grad_rows_.resize(static_cast<std::size_t>(gradient_rows_));
  d_cov_.assign(static_cast<std::size_t>(gradient_rows_ * d), Matrix::Zero(q(), q()));
  d_factor_.resize(static_cast<std::size_t>(gradient_rows_ * d));

  for (Index i = 0; i < gradient_rows_; ++i) {
    const Vector zi = batch_.row(i).transpose();
    Matrix& g = grad_rows_[static_cast<std::size_t>(i)];
    g = n > 0 ? gp::kernel_grad_x1_rows(zi, post.data().points, spec) : Matrix(0, d);
    if (n > 0) mean_grad_.row(i) = (g.transpose() * post.weights()).transpose();
    // prior part of dC: grad_{z_i} k(z_i, z_l)
    const Matrix prior_grad = gp::kernel_grad_x1_rows(zi, batch_, spec);
    // data part: -grad_{z_i} k(z_i, X) (K + noise)^{-1} k(X, z_l)
    const Matrix data_grad = n > 0 ? Matrix(g.transpose() * kinv_cross_) : Matrix::Zero(d, q());
    for (Index j = 0; j < d; ++j) {
      Matrix& dc = d_cov_[slot(i, j)];
      for (Index l = 0; l < q(); ++l) {
        const double v = (l == i) ? -2.0 * data_grad(j, i) : prior_grad(l, j) - data_grad(j, l);
        dc(i, l) = v;
        dc(l, i) = v;
      }
      d_factor_[slot(i, j)] = gp::cholesky_derivative(factor_, dc);
    }
  }
}

Matrix BatchModel::cross(const Points& a, const Matrix& whitened_a) const {
  Matrix out = gp::kernel_matrix(a, batch_, post_->spec());
  if (post_->size() > 0) out.noalias() -= whitened_a.transpose() * whitened_;
  return out;
}

Matrix BatchModel::sigma_tilde(const Matrix& kn) const {
  return factor_.triangularView<Eigen::Lower>().solve(kn.transpose()).transpose();
}

Vector BatchModel::whiten(const Vector& z) const {
  return factor_.transpose().triangularView<Eigen::Upper>().solve(z);
}

Matrix BatchModel::cross_grad_fixed(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& kinv_k) const {
  const Index d = dim();
  Matrix out(gradient_rows_, d);
  for (Index i = 0; i < gradient_rows_; ++i) {
    out.row(i) = gp::kernel_grad_x1(batch_.row(i).transpose(), a, post_->spec()).transpose();
    if (post_->size() > 0) out.row(i) -= (grad_rows_[static_cast<std::size_t>(i)].transpose() * kinv_k).transpose();
  }
  return out;
}

Index separate_duplicate_rows(Points& batch, const BoxDomain* box) {
  Index moved = 0;
  for (Index r = 1; r < batch.rows(); ++r) {
    Index copies = 0;
    for (Index s = 0; s < r; ++s) {
      if ((batch.row(r) - batch.row(s)).cwiseAbs().maxCoeff() < 1e-12) ++copies;
    }
    if (copies == 0) continue;
    ++moved;
    for (Index j = 0; j < batch.cols(); ++j) {
      const double width = box ? box->width()[j] : 1.0;
      const double shift = 1e-9 * width * static_cast<double>(copies);
      double v = batch(r, j) + shift;
      if (box && v > box->upper()[j]) v = batch(r, j) - shift;
      batch(r, j) = v;
    }
  }
  return moved;
}

}  // namespace qkg::acq
