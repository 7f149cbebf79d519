#include "qkg/gp/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qkg/gp/cholesky.hpp"

namespace qkg::gp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sample_variance(const Vector& y) {
  if (y.size() < 2) return 0.0;
  const double m = y.mean();
  return (y.array() - m).square().sum() / static_cast<double>(y.size() - 1);
}

// Packs the optimized parameters as [log s2, log l_1..l_d, (log noise)].
class LogParams {
 public:
  explicit LogParams(const HyperBounds& bounds) : bounds_(bounds), dim_(bounds.length_lower.size()) {}

  Index size() const { return 1 + dim_ + (bounds_.noise_fixed() ? 0 : 1); }

  Vector lower() const { return pack(bounds_.signal_lower, bounds_.length_lower, bounds_.noise_lower); }
  Vector upper() const { return pack(bounds_.signal_upper, bounds_.length_upper, bounds_.noise_upper); }

  Vector from_spec(const ModelSpec& spec) const {
    return pack(spec.signal_variance, spec.length_scales, spec.noise_variance).cwiseMax(lower()).cwiseMin(upper());
  }

  ModelSpec to_spec(const Vector& theta) const {
    ModelSpec spec;
    // Clamp after exp so log/exp rounding cannot leave the bounds.
    spec.signal_variance = std::clamp(std::exp(theta[0]), bounds_.signal_lower, bounds_.signal_upper);
    spec.length_scales = theta.segment(1, dim_)
                             .array()
                             .exp()
                             .max(bounds_.length_lower.array())
                             .min(bounds_.length_upper.array())
                             .matrix();
    spec.noise_variance = bounds_.noise_fixed()
                              ? bounds_.noise_lower
                              : std::clamp(std::exp(theta[1 + dim_]), bounds_.noise_lower, bounds_.noise_upper);
    return spec;
  }

 private:
  Vector pack(double s2, const Vector& ls, double noise) const {
    Vector out(size());
    out[0] = std::log(s2);
    out.segment(1, dim_) = ls.array().log().matrix();
    if (!bounds_.noise_fixed()) out[1 + dim_] = std::log(noise);
    return out;
  }

  const HyperBounds& bounds_;
  Index dim_;
};

struct Evaluation {
  double value = kNegInf;
  Vector grad;
  double gls_mean = 0.0;
};

// Profile log likelihood and its gradient with respect to the log parameters.
Evaluation evaluate(const Dataset& data, const ModelSpec& spec, const LogParams& params, bool with_grad) {
  Evaluation ev;
  const Index n = data.size();
  const Matrix k_signal = kernel_matrix(data.points, data.points, spec);
  Matrix gram = k_signal;
  gram.diagonal().array() += spec.noise_variance;
  CholeskyFactor factor;
  try {
    factor = cholesky_with_jitter(gram);
  } catch (const NumericalError&) {
    return ev;
  }
  const auto tri = factor.lower.triangularView<Eigen::Lower>();
  auto solve = [&](const Vector& b) {
    Vector x = tri.solve(b);
    factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  };
  const Vector ones = Vector::Ones(n);
  const Vector kinv_one = solve(ones);
  const Vector kinv_y = solve(data.values);
  const double denom = ones.dot(kinv_one);
  ev.gls_mean = denom > 0.0 ? ones.dot(kinv_y) / denom : data.values.mean();
  const Vector resid = data.values.array() - ev.gls_mean;
  const Vector alpha = kinv_y - ev.gls_mean * kinv_one;

  const double log_det_half = factor.lower.diagonal().array().log().sum();
  ev.value = -0.5 * resid.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(ev.value)) {
    ev.value = kNegInf;
    return ev;
  }
  if (!with_grad) return ev;

  // d/dtheta = 1/2 tr((alpha alpha^T - K^{-1}) dK/dtheta); the mean is profiled (envelope theorem).
  Matrix kinv = Matrix::Identity(n, n);
  tri.solveInPlace(kinv);
  factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(kinv);
  const Matrix inner = alpha * alpha.transpose() - kinv;

  ev.grad.resize(params.size());
  ev.grad[0] = 0.5 * inner.cwiseProduct(k_signal).sum();
  const auto length_derivs = kernel_log_lengthscale_derivs(data.points, spec);
  for (Index j = 0; j < spec.dim(); ++j)
    ev.grad[1 + j] = 0.5 * inner.cwiseProduct(length_derivs[static_cast<std::size_t>(j)]).sum();
  if (params.size() > 1 + spec.dim()) ev.grad[1 + spec.dim()] = 0.5 * spec.noise_variance * inner.trace();
  if (!ev.grad.allFinite()) ev.grad.setZero();
  return ev;
}

struct Ascent {
  Vector theta;
  Evaluation eval;
};

// Spectral projected gradient ascent with a monotone Armijo backtracking search.
Ascent spectral_projected_ascent(const Dataset& data, const LogParams& params, Vector theta,
                                 const MleOptions& options) {
  const Vector lo = params.lower();
  const Vector hi = params.upper();
  auto project = [&](const Vector& t) -> Vector { return t.cwiseMax(lo).cwiseMin(hi); };
  auto run = [&](const Vector& t, bool grad) {
    ModelSpec spec = params.to_spec(t);
    return evaluate(data, spec, params, grad);
  };

  theta = project(theta);
  Evaluation current = run(theta, true);
  if (!std::isfinite(current.value)) return {theta, current};

  double lambda = 1.0;
  {
    const double pg = (project(theta + current.grad) - theta).lpNorm<Eigen::Infinity>();
    if (pg > 0.0) lambda = std::min(1.0, 1.0 / pg);
  }
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Vector direction = project(theta + lambda * current.grad) - theta;
    if (direction.lpNorm<Eigen::Infinity>() < options.tolerance) break;
    const double slope = current.grad.dot(direction);
    double step = 1.0;
    Vector candidate;
    Evaluation next;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      candidate = theta + step * direction;
      next = run(candidate, false);
      if (std::isfinite(next.value) && next.value >= current.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    next = run(candidate, true);
    const Vector s = candidate - theta;
    const Vector y = current.grad - next.grad;  // ascent: curvature of -f
    const double sy = s.dot(y);
    lambda = sy > 1e-12 ? std::clamp(s.squaredNorm() / sy, 1e-8, 1e8) : 1e8;
    const double gain = next.value - current.value;
    theta = candidate;
    current = std::move(next);
    if (gain < 1e-10 * (1.0 + std::abs(current.value))) break;
  }
  return {theta, current};
}

}  // namespace

void HyperBounds::validate(Index dim) const {
  if (length_lower.size() != dim || length_upper.size() != dim)
    throw std::invalid_argument("HyperBounds: length-scale bounds have the wrong dimension");
  if (!(length_lower.array() > 0.0).all() || !(length_lower.array() <= length_upper.array()).all())
    throw std::invalid_argument("HyperBounds: length-scale bounds must be positive and ordered");
  if (!(signal_lower > 0.0) || !(signal_lower <= signal_upper))
    throw std::invalid_argument("HyperBounds: signal-variance bounds must be positive and ordered");
  if (!(noise_lower >= 0.0) || !(noise_lower <= noise_upper))
    throw std::invalid_argument("HyperBounds: noise bounds must be nonnegative and ordered");
  if (!noise_fixed() && !(noise_lower > 0.0))
    throw std::invalid_argument("HyperBounds: a free noise variance needs a positive lower bound");
  if (!std::isfinite(signal_upper) || !std::isfinite(noise_upper) || !length_upper.allFinite())
    throw std::invalid_argument("HyperBounds: bounds must be finite");
}

HyperBounds default_bounds(const Dataset& data, const BoxDomain& box) {
  HyperBounds b;
  const Vector width = box.width();
  b.length_lower = 1e-3 * width;
  b.length_upper = 10.0 * width;
  const double var = sample_variance(data.values);
  if (data.size() < 2 || !(var > 0.0)) {
    b.signal_lower = 1e-6;
    b.signal_upper = 1e6;
  } else {
    b.signal_lower = 1e-6 * var;
    b.signal_upper = 1e6 * var;
  }
  b.noise_lower = 1e-8;
  b.noise_upper = std::max(var, b.noise_lower);
  return b;
}

double log_marginal_likelihood(const Dataset& data, const ModelSpec& spec) {
  spec.validate(data.dim());
  data.validate();
  const Index n = data.size();
  Matrix gram = kernel_matrix(data.points, data.points, spec);
  gram.diagonal().array() += spec.noise_variance;
  const CholeskyFactor factor = cholesky_with_jitter(gram);
  const Vector resid = data.values.array() - spec.mean_const;
  const Vector white = factor.lower.triangularView<Eigen::Lower>().solve(resid);
  return -0.5 * white.squaredNorm() - factor.lower.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double profile_log_likelihood(const Dataset& data, const ModelSpec& spec, double* gls_mean) {
  spec.validate(data.dim());
  HyperBounds dummy;
  dummy.length_lower = spec.length_scales;
  dummy.length_upper = spec.length_scales;
  dummy.noise_lower = dummy.noise_upper = spec.noise_variance;
  const LogParams params(dummy);
  const Evaluation ev = evaluate(data, spec, params, false);
  if (gls_mean) *gls_mean = ev.gls_mean;
  return ev.value;
}

ModelSpec fit_hyperparameters_mle(const Dataset& data, const HyperBounds& bounds, Rng& rng,
                                  const MleOptions& options) {
  data.validate();
  if (data.size() < 2) throw PreconditionError("fit_hyperparameters_mle: need at least 2 observations");
  bounds.validate(data.dim());
  const LogParams params(bounds);
  const Vector lo = params.lower();
  const Vector hi = params.upper();

  std::vector<Vector> starts;
  for (const ModelSpec& s : options.extra_starts) {
    if (s.dim() == data.dim()) starts.push_back(params.from_spec(s));
  }
  if (options.data_start) {
    const double var = sample_variance(data.values);
    ModelSpec guess;
    guess.signal_variance = var > 0.0 ? var : 1.0;
    guess.length_scales = bounds.length_upper / 20.0;
    guess.noise_variance = 0.1 * guess.signal_variance;
    starts.push_back(params.from_spec(guess));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < options.restarts; ++r) {
    Vector t(params.size());
    for (Index k = 0; k < t.size(); ++k) t[k] = lo[k] + unit(rng) * (hi[k] - lo[k]);
    starts.push_back(std::move(t));
  }
  if (starts.empty()) starts.push_back(0.5 * (lo + hi));

  Ascent best;
  best.eval.value = kNegInf;
  for (const Vector& start : starts) {
    Ascent result = spectral_projected_ascent(data, params, start, options);
    if (result.eval.value > best.eval.value) best = std::move(result);
  }
  if (!std::isfinite(best.eval.value))
    throw NumericalError("fit_hyperparameters_mle: likelihood is not finite at any start point");

  ModelSpec spec = params.to_spec(best.theta);
  spec.mean_const = best.eval.gls_mean;
  return spec;
}

}  // namespace qkg::gp
