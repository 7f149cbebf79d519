#include "qkg/acq/qkg.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

namespace qkg::acq {

namespace {

constexpr Index kChunk = 256;

// The discretization as seen by one batch: cached fixed points followed by the
// batch rows that do not coincide with a fixed point.
struct EvalSet {
  Vector mean;
  Matrix sigma;               // m x q
  std::vector<Index> owner;   // batch row that moves the point, or -1
  std::vector<Index> row_at;  // batch row r -> evaluation index
  Index before = 0;
};

Index argmin(const Eigen::Ref<const Vector>& v, Index limit) {
  Index best = 0;
  double best_value = v[0];
  for (Index k = 1; k < limit; ++k) {
    if (v[k] < best_value) {
      best_value = v[k];
      best = k;
    }
  }
  return best;
}

Index find_row(const Points& pts, const Eigen::Ref<const Vector>& x) {
  for (Index i = 0; i < pts.rows(); ++i) {
    if ((pts.row(i).transpose() - x).cwiseAbs().maxCoeff() <= sampling::kDuplicateTolerance) return i;
  }
  return -1;
}

}  // namespace

QkgEvaluator::QkgEvaluator(gp::Posterior post, const sampling::DiscreteSet& disc, QkgOptions options)
    : post_(std::move(post)), options_(std::move(options)) {
  if (disc.size() > 0 && disc.dim() != post_.dim())
    throw std::invalid_argument("QkgEvaluator: discretization dimension does not match the model");
  const sampling::DiscreteSet fixed = disc.without_candidates();
  fixed_ = fixed.points;
  if (fixed_.cols() != post_.dim()) fixed_.resize(fixed_.rows(), post_.dim());
  fixed_mean_ = post_.means(fixed_);
  fixed_whitened_ = post_.whitened_cross(fixed_);
}

StochasticEstimate QkgEvaluator::value(const Batch& batch, const McOptions& mc) const {
  return estimate(batch, mc, -1);
}

StochasticEstimate QkgEvaluator::gradient(const Batch& batch, const McOptions& mc, Index free_rows) const {
  return estimate(batch, mc, free_rows < 0 ? batch.q() : free_rows);
}

namespace {

EvalSet build_eval_set(const BatchModel& model, const Points& fixed, const Vector& fixed_mean,
                       const Matrix& fixed_whitened, bool exclude_batch_from_incumbent) {
  EvalSet set;
  const Index q = model.q();
  const Index m_fixed = fixed.rows();
  std::vector<Index> appended;
  set.row_at.resize(static_cast<std::size_t>(q));
  for (Index r = 0; r < q; ++r) {
    const Index hit = find_row(fixed, model.points().row(r).transpose());
    if (hit >= 0) {
      set.row_at[static_cast<std::size_t>(r)] = hit;
    } else {
      set.row_at[static_cast<std::size_t>(r)] = m_fixed + static_cast<Index>(appended.size());
      appended.push_back(r);
    }
  }
  const Index m = m_fixed + static_cast<Index>(appended.size());
  set.mean.resize(m);
  Matrix kn(m, q);
  set.owner.assign(static_cast<std::size_t>(m), -1);
  if (m_fixed > 0) {
    set.mean.head(m_fixed) = fixed_mean;
    kn.topRows(m_fixed) = model.cross(fixed, fixed_whitened);
  }
  for (std::size_t k = 0; k < appended.size(); ++k) {
    const Index r = appended[k];
    const Index idx = m_fixed + static_cast<Index>(k);
    set.mean[idx] = model.mean()[r];
    kn.row(idx) = model.cross_batch().row(r);
    set.owner[static_cast<std::size_t>(idx)] = r;
  }
  set.sigma = model.sigma_tilde(kn);
  const Index incumbent_limit = (exclude_batch_from_incumbent && m_fixed > 0) ? m_fixed : m;
  set.before = argmin(set.mean, incumbent_limit);
  return set;
}

}  // namespace

StochasticEstimate QkgEvaluator::estimate(const Batch& batch, const McOptions& mc, Index free_rows) const {
  if (mc.n_mc < 2) throw std::invalid_argument("q-KG estimator: n_mc must be at least 2");
  if (batch.q() < 1 || batch.dim() != post_.dim()) throw std::invalid_argument("q-KG estimator: invalid batch");
  const bool with_grad = free_rows >= 0;
  if (free_rows > batch.q()) throw std::invalid_argument("q-KG estimator: free_rows exceeds batch size");

  Points z = batch.points;
  separate_duplicate_rows(z, options_.box ? &*options_.box : nullptr);
  const BatchModel model(post_, std::move(z), with_grad ? free_rows : -1);
  const EvalSet set = build_eval_set(model, fixed_, fixed_mean_, fixed_whitened_, options_.exclude_batch_from_incumbent);

  const Index q = model.q();
  const Index d = model.dim();
  const Index m = set.mean.size();
  const auto n_mc = static_cast<Index>(mc.n_mc);
  const double before_value = set.mean[set.before];
  const Index before_owner = set.owner[static_cast<std::size_t>(set.before)];
  const NormalSource normals = mc.normals();

  Vector samples(n_mc);
  Matrix grad_sum, grad_sq;
  if (with_grad) {
    grad_sum = Matrix::Zero(free_rows, d);
    grad_sq = Matrix::Zero(free_rows, d);
  }
  std::unordered_map<Index, Matrix> fixed_cross_grad;
  std::vector<Matrix> factor_t;  // d_factor(i,j)^T, reused across samples
  if (with_grad) {
    for (Index i = 0; i < free_rows; ++i)
      for (Index j = 0; j < d; ++j) factor_t.push_back(model.d_factor(i, j).transpose());
  }

  Matrix zs(q, kChunk);
  Matrix contrib(std::max<Index>(free_rows, 0), d);
  for (Index start = 0; start < n_mc; start += kChunk) {
    const Index count = std::min(kChunk, n_mc - start);
    for (Index c = 0; c < count; ++c) normals(static_cast<std::uint64_t>(start + c), zs.col(c));
    Matrix h = set.sigma * zs.leftCols(count);
    h.colwise() += set.mean;
    for (Index c = 0; c < count; ++c) {
      const Index k = start + c;
      const Index after = argmin(h.col(c), m);
      const double g = before_value - h(after, c);
      if (!std::isfinite(g)) throw NumericalError("q-KG estimator: non-finite sample at MC index " + std::to_string(k));
      samples[k] = g;
      if (!with_grad) continue;

      const Index after_owner = set.owner[static_cast<std::size_t>(after)];
      const Vector w = model.whiten(zs.col(c));
      const Matrix* cross_grad = nullptr;
      if (after_owner < 0) {
        auto it = fixed_cross_grad.find(after);
        if (it == fixed_cross_grad.end()) {
          const Vector a = fixed_.row(after).transpose();
          Vector kinv_k(0);
          if (post_.size() > 0)
            kinv_k = post_.chol_factor().transpose().triangularView<Eigen::Upper>().solve(fixed_whitened_.col(after));
          it = fixed_cross_grad.emplace(after, model.cross_grad_fixed(a, kinv_k)).first;
        }
        cross_grad = &it->second;
      }
      const auto sigma_after = set.sigma.row(after);
      for (Index i = 0; i < free_rows; ++i) {
        for (Index j = 0; j < d; ++j) {
          // d(sigma_tilde(after)) Z_q = dKn(after, Z) w - sigma_tilde(after) dD^T w
          const double d_cross = after_owner >= 0 ? model.d_cov(i, j).row(after_owner).dot(w)
                                                  : (*cross_grad)(i, j) * w[i];
          const double d_factor = sigma_after.dot(factor_t[static_cast<std::size_t>(i * d + j)] * w);
          double v = -(d_cross - d_factor);
          if (before_owner == i) v += model.mean_grad()(i, j);
          if (after_owner == i) v -= model.mean_grad()(i, j);
          contrib(i, j) = v;
        }
      }
      if (!contrib.allFinite())
        throw NumericalError("q-KG estimator: non-finite gradient at MC index " + std::to_string(k));
      grad_sum += contrib;
      grad_sq += contrib.cwiseProduct(contrib);
    }
  }

  StochasticEstimate est;
  est.n_mc = mc.n_mc;
  est.seed = mc.seed;
  const double nd = static_cast<double>(n_mc);
  est.value = samples.sum() / nd;
  const double var = (samples.array() - est.value).square().sum() / (nd - 1.0);
  est.value_stderr = std::sqrt(var / nd);
  if (with_grad) {
    est.gradient = grad_sum / nd;
    const Matrix var_g = ((grad_sq / nd - est.gradient.cwiseProduct(est.gradient)) * (nd / (nd - 1.0))).cwiseMax(0.0);
    est.gradient_stderr = (var_g / nd).cwiseSqrt();
  }
  if (options_.keep_samples) est.samples = std::move(samples);
  return est;
}

InnerSample QkgEvaluator::inner(const Batch& batch, const Vector& zq) const {
  if (batch.q() < 1 || batch.dim() != post_.dim()) throw std::invalid_argument("sample_inner_g: invalid batch");
  if (zq.size() != batch.q()) throw std::invalid_argument("sample_inner_g: Z_q must have one entry per batch row");
  Points z = batch.points;
  separate_duplicate_rows(z, options_.box ? &*options_.box : nullptr);
  const BatchModel model(post_, z, -1);
  const EvalSet set = build_eval_set(model, fixed_, fixed_mean_, fixed_whitened_, options_.exclude_batch_from_incumbent);
  const Vector h = set.mean + set.sigma * zq;
  InnerSample out;
  out.before_index = set.before;
  out.after_index = argmin(h, h.size());
  out.g = set.mean[set.before] - h[out.after_index];
  auto point = [&](Index idx) -> Vector {
    const Index owner = set.owner[static_cast<std::size_t>(idx)];
    return owner >= 0 ? Vector(z.row(owner).transpose()) : Vector(fixed_.row(idx).transpose());
  };
  out.x_before = point(out.before_index);
  out.x_after = point(out.after_index);
  return out;
}

Vector sigma_tilde(const gp::Posterior& post, const Batch& batch, const Eigen::Ref<const Vector>& x) {
  if (x.size() != post.dim()) throw std::invalid_argument("sigma_tilde: dimension mismatch");
  const BatchModel model(post, batch.points, -1);
  Points row = x.transpose();
  const Matrix kn = model.cross(row, post.whitened_cross(row));
  return model.sigma_tilde(kn).row(0).transpose();
}

InnerSample sample_inner_g(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                           const Vector& zq) {
  if (disc.size() == 0) throw std::invalid_argument("sample_inner_g: discretization must be nonempty");
  sampling::DiscreteSet full = disc;
  full.add_rows(batch.points, sampling::Provenance::candidate_batch);
  return QkgEvaluator(post, full).inner(batch, zq);
}

StochasticEstimate qkg_value(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                             const McOptions& mc) {
  return QkgEvaluator(post, disc).value(batch, mc);
}

StochasticEstimate qkg_gradient(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                                const McOptions& mc) {
  return QkgEvaluator(post, disc).gradient(batch, mc);
}

StochasticEstimate qkg_async(const gp::Posterior& post, const Batch& new_batch, const Batch& pending,
                             const sampling::DiscreteSet& disc, const McOptions& mc) {
  if (pending.q() > 0 && pending.dim() != new_batch.dim())
    throw std::invalid_argument("qkg_async: pending rows have the wrong dimension");
  const Batch combined = stack(new_batch, pending);
  return QkgEvaluator(post, disc).gradient(combined, mc, new_batch.q());
}

}  // namespace qkg::acq
