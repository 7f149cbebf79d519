#include "qkg/baselines/qei.hpp"

#include <cmath>
#include <string>

namespace qkg::baselines {

acq::StochasticEstimate qei_value(const gp::Posterior& post, const acq::Batch& batch, const McOptions& mc,
                                  bool with_gradient, const QeiOptions& options) {
  if (post.size() < 1) throw PreconditionError("qei_value: at least one observation is required");
  if (mc.n_mc < 2) throw std::invalid_argument("qei_value: n_mc must be at least 2");
  if (batch.q() < 1 || batch.dim() != post.dim()) throw std::invalid_argument("qei_value: invalid batch");

  Points z = batch.points;
  acq::separate_duplicate_rows(z, options.box ? &*options.box : nullptr);
  const acq::BatchModel model(post, std::move(z), with_gradient ? batch.q() : -1);
  const Index q = model.q();
  const Index d = model.dim();
  const double best = post.data().values.minCoeff();
  const Matrix sigma = model.sigma_tilde(model.cross_batch());
  const NormalSource normals = mc.normals();

  const auto n_mc = static_cast<Index>(mc.n_mc);
  Vector samples(n_mc);
  Matrix grad_sum = Matrix::Zero(with_gradient ? q : 0, d);
  Matrix grad_sq = grad_sum;
  Matrix contrib(with_gradient ? q : 0, d);
  Vector zq(q);
  for (Index k = 0; k < n_mc; ++k) {
    normals(static_cast<std::uint64_t>(k), zq);
    const Vector h = model.mean() + sigma * zq;
    Index after = 0;
    for (Index r = 1; r < q; ++r) {
      if (h[r] < h[after]) after = r;
    }
    const double improvement = best - h[after];
    if (!std::isfinite(improvement))
      throw NumericalError("qei_value: non-finite sample at MC index " + std::to_string(k));
    samples[k] = std::max(improvement, 0.0);
    if (!with_gradient) continue;
    if (improvement <= 0.0) continue;

    const Vector w = model.whiten(zq);
    for (Index i = 0; i < q; ++i) {
      for (Index j = 0; j < d; ++j) {
        const double d_cross = model.d_cov(i, j).row(after).dot(w);
        const double d_factor = sigma.row(after).dot(model.d_factor(i, j).transpose() * w);
        double dh = d_cross - d_factor;
        if (after == i) dh += model.mean_grad()(i, j);
        contrib(i, j) = -dh;
      }
    }
    if (!contrib.allFinite()) throw NumericalError("qei_value: non-finite gradient at MC index " + std::to_string(k));
    grad_sum += contrib;
    grad_sq += contrib.cwiseProduct(contrib);
  }

  acq::StochasticEstimate est;
  est.n_mc = mc.n_mc;
  est.seed = mc.seed;
  const double nd = static_cast<double>(n_mc);
  est.value = samples.sum() / nd;
  est.value_stderr = std::sqrt((samples.array() - est.value).square().sum() / (nd - 1.0) / nd);
  if (with_gradient) {
    est.gradient = grad_sum / nd;
    const Matrix var_g = ((grad_sq / nd - est.gradient.cwiseProduct(est.gradient)) * (nd / (nd - 1.0))).cwiseMax(0.0);
    est.gradient_stderr = (var_g / nd).cwiseSqrt();
  }
  if (options.keep_samples) est.samples = std::move(samples);
  return est;
}

}  // namespace qkg::baselines
