#include "qkg/gp/kernel.hpp"

#include <cmath>
#include <string>

namespace qkg::gp {

namespace {

#ifdef QKG_CORRUPT_KERNEL_CONSTANT
constexpr double kQuadCoeff = 5.0 / 4.0;
#else
constexpr double kQuadCoeff = 5.0 / 3.0;
#endif

const double kSqrt5 = std::sqrt(5.0);

void check_dims(Index a, Index b, const ModelSpec& spec) {
  if (a != spec.dim() || b != spec.dim()) {
    throw std::invalid_argument("kernel: point dimension " + std::to_string(a) + "/" + std::to_string(b) +
                                " does not match model dimension " + std::to_string(spec.dim()));
  }
}

Vector inverse_squared_scales(const ModelSpec& spec) {
  return spec.length_scales.array().square().inverse().matrix();
}

}  // namespace

void ModelSpec::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw std::invalid_argument("ModelSpec: signal_variance must be positive");
  if (length_scales.size() == 0) throw std::invalid_argument("ModelSpec: length_scales must be nonempty");
  for (Index j = 0; j < length_scales.size(); ++j) {
    if (!(length_scales[j] > 0.0) || !std::isfinite(length_scales[j]))
      throw std::invalid_argument("ModelSpec: length_scales must be positive");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    throw std::invalid_argument("ModelSpec: noise_variance must be nonnegative");
  if (!std::isfinite(mean_const)) throw std::invalid_argument("ModelSpec: mean_const must be finite");
}

void ModelSpec::validate(Index expected_dim) const {
  validate();
  if (dim() != expected_dim)
    throw std::invalid_argument("ModelSpec: expected " + std::to_string(expected_dim) + " length scales, got " +
                                std::to_string(dim()));
}

void Dataset::validate() const {
  if (points.rows() != values.size())
    throw std::invalid_argument("Dataset: point count does not match value count");
  if (!points.allFinite() || !values.allFinite()) throw std::invalid_argument("Dataset: non-finite entries");
}

void Dataset::append(const Eigen::Ref<const Vector>& x, double y) {
  if (points.rows() == 0 && points.cols() == 0) points.resize(0, x.size());
  if (x.size() != points.cols()) throw std::invalid_argument("Dataset::append: dimension mismatch");
  points.conservativeResize(points.rows() + 1, Eigen::NoChange);
  points.row(points.rows() - 1) = x.transpose();
  values.conservativeResize(values.size() + 1);
  values[values.size() - 1] = y;
}

namespace detail {

double matern52(const double* a, const double* b, const double* inv_ls2, Index dim, double s2) {
  double r2 = 0.0;
  for (Index j = 0; j < dim; ++j) {
    const double diff = a[j] - b[j];
    r2 += diff * diff * inv_ls2[j];
  }
  const double r = std::sqrt(r2);
  return s2 * (1.0 + kSqrt5 * r + kQuadCoeff * r2) * std::exp(-kSqrt5 * r);
}

}  // namespace detail

double kernel_eval(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                   const ModelSpec& spec) {
  check_dims(x1.size(), x2.size(), spec);
  const Vector inv = inverse_squared_scales(spec);
  return detail::matern52(x1.data(), x2.data(), inv.data(), spec.dim(), spec.signal_variance);
}

Vector kernel_grad_x1(const Eigen::Ref<const Vector>& x1, const Eigen::Ref<const Vector>& x2,
                      const ModelSpec& spec) {
  check_dims(x1.size(), x2.size(), spec);
  const Vector inv = inverse_squared_scales(spec);
  const Vector diff = x1 - x2;
  const double r = std::sqrt(diff.array().square().matrix().dot(inv));
  // dk/dr = -(5/3) s^2 r (1 + sqrt5 r) e^{-sqrt5 r};  dr/dx1_j = diff_j / (l_j^2 r).
  const double scale = -(5.0 / 3.0) * spec.signal_variance * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
  return scale * diff.cwiseProduct(inv);
}

Matrix kernel_matrix(const Points& a, const Points& b, const ModelSpec& spec) {
  check_dims(a.cols(), b.cols(), spec);
  const Vector inv = inverse_squared_scales(spec);
  const Index d = spec.dim();
  Matrix out(a.rows(), b.rows());
  if (&a == &b) {
    for (Index i = 0; i < a.rows(); ++i) {
      out(i, i) = spec.signal_variance;
      for (Index l = 0; l < i; ++l) {
        out(i, l) = detail::matern52(a.row(i).data(), a.row(l).data(), inv.data(), d, spec.signal_variance);
        out(l, i) = out(i, l);
      }
    }
    return out;
  }
  for (Index l = 0; l < b.rows(); ++l) {
    for (Index i = 0; i < a.rows(); ++i)
      out(i, l) = detail::matern52(a.row(i).data(), b.row(l).data(), inv.data(), d, spec.signal_variance);
  }
  return out;
}

Matrix kernel_grad_x1_rows(const Eigen::Ref<const Vector>& x, const Points& b, const ModelSpec& spec) {
  check_dims(x.size(), b.cols(), spec);
  const Vector inv = inverse_squared_scales(spec);
  const Index d = spec.dim();
  Matrix out(b.rows(), d);
  for (Index l = 0; l < b.rows(); ++l) {
    double r2 = 0.0;
    for (Index j = 0; j < d; ++j) {
      const double diff = x[j] - b(l, j);
      r2 += diff * diff * inv[j];
    }
    const double r = std::sqrt(r2);
    const double scale = -(5.0 / 3.0) * spec.signal_variance * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    for (Index j = 0; j < d; ++j) out(l, j) = scale * (x[j] - b(l, j)) * inv[j];
  }
  return out;
}

std::vector<Matrix> kernel_log_lengthscale_derivs(const Points& a, const ModelSpec& spec) {
  check_dims(a.cols(), a.cols(), spec);
  const Vector inv = inverse_squared_scales(spec);
  const Index d = spec.dim();
  const Index n = a.rows();
  std::vector<Matrix> out(static_cast<std::size_t>(d), Matrix::Zero(n, n));
  for (Index i = 0; i < n; ++i) {
    for (Index l = 0; l < i; ++l) {
      double r2 = 0.0;
      for (Index j = 0; j < d; ++j) {
        const double diff = a(i, j) - a(l, j);
        r2 += diff * diff * inv[j];
      }
      const double r = std::sqrt(r2);
      // dk/dlog(l_j) = (5/3) s^2 (1 + sqrt5 r) e^{-sqrt5 r} diff_j^2 / l_j^2
      const double scale = (5.0 / 3.0) * spec.signal_variance * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
      for (Index j = 0; j < d; ++j) {
        const double diff = a(i, j) - a(l, j);
        const double v = scale * diff * diff * inv[j];
        out[static_cast<std::size_t>(j)](i, l) = v;
        out[static_cast<std::size_t>(j)](l, i) = v;
      }
    }
  }
  return out;
}

}  // namespace qkg::gp
