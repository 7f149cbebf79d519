#include "qkg_cli/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "qkg/acq/qkg.hpp"
#include "qkg/baselines/qei.hpp"
#include "qkg/gp/cholesky.hpp"
#include "qkg/gp/posterior.hpp"

namespace qkg::cli {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

gp::ModelSpec random_spec(Index d, double noise, Rng& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.5);
  gp::ModelSpec spec;
  spec.mean_const = u(rng) - 0.9;
  spec.signal_variance = u(rng);
  spec.length_scales = Vector(d);
  for (Index j = 0; j < d; ++j) spec.length_scales[j] = u(rng);
  spec.noise_variance = noise;
  return spec;
}

gp::Dataset random_data(Index n, Index d, Rng& rng) {
  const BoxDomain box = BoxDomain::cube(d, 0.0, 1.0);
  gp::Dataset data;
  data.points = box.uniform(n, rng);
  std::normal_distribution<double> normal;
  data.values = Vector(n);
  for (Index i = 0; i < n; ++i) data.values[i] = normal(rng);
  return data;
}

// Matern 5/2 written out independently of the library kernel.
double reference_kernel(const Vector& a, const Vector& b, const gp::ModelSpec& spec) {
  double r2 = 0.0;
  for (Index j = 0; j < a.size(); ++j) {
    const double t = (a[j] - b[j]) / spec.length_scales[j];
    r2 += t * t;
  }
  const double r = std::sqrt(r2);
  return spec.signal_variance * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

CheckResult check_kernel_closed_form() {
  Rng rng(11);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 4;
    const gp::ModelSpec spec = random_spec(d, 0.0, rng);
    const Points p = BoxDomain::cube(d, -1.0, 1.0).uniform(2, rng);
    const Vector a = p.row(0).transpose(), b = p.row(1).transpose();
    worst = std::max(worst, std::abs(gp::kernel_eval(a, b, spec) - reference_kernel(a, b, spec)));
  }
  return {"kernel.closed_form", worst < 1e-12, "max abs err " + sci(worst)};
}

CheckResult check_kernel_gradient() {
  Rng rng(12);
  double worst = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 4;
    const gp::ModelSpec spec = random_spec(d, 0.0, rng);
    const Points p = BoxDomain::cube(d, -1.0, 1.0).uniform(2, rng);
    const Vector a = p.row(0).transpose(), b = p.row(1).transpose();
    const Vector g = gp::kernel_grad_x1(a, b, spec);
    for (Index j = 0; j < d; ++j) {
      Vector ap = a, am = a;
      ap[j] += h;
      am[j] -= h;
      const double fd = (gp::kernel_eval(ap, b, spec) - gp::kernel_eval(am, b, spec)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(fd)));
    }
  }
  return {"kernel.gradient_fd", worst < 1e-6, "max rel err " + sci(worst)};
}

CheckResult check_gp_interpolation() {
  Rng rng(13);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index d = 1 + t % 3;
    const gp::Dataset data = random_data(5, d, rng);
    const gp::Posterior post(data, random_spec(d, 0.0, rng));
    worst = std::max(worst, (post.means(data.points) - data.values).cwiseAbs().maxCoeff());
    worst = std::max(worst, post.variance(data.points).cwiseAbs().maxCoeff());
  }
  return {"gp.interpolation", worst < 1e-6, "max deviation " + sci(worst)};
}

CheckResult check_gp_dense() {
  Rng rng(14);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index d = 1 + t % 3;
    const gp::Dataset data = random_data(6, d, rng);
    const gp::ModelSpec spec = random_spec(d, t % 2 ? 0.1 : 0.0, rng);
    const gp::Posterior post(data, spec);
    const Points x = BoxDomain::cube(d, 0.0, 1.0).uniform(3, rng);
    Matrix k = gp::kernel_matrix(data.points, data.points, spec);
    k.diagonal().array() += spec.noise_variance + post.jitter();
    const Matrix kinv = k.inverse();
    const Matrix kx = gp::kernel_matrix(data.points, x, spec);
    const Vector mean = Vector::Constant(3, spec.mean_const) +
                        kx.transpose() * kinv * (data.values - Vector::Constant(6, spec.mean_const));
    const Matrix cov = gp::kernel_matrix(x, x, spec) - kx.transpose() * kinv * kx;
    worst = std::max(worst, (post.means(x) - mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (post.covs(x, x) - cov).cwiseAbs().maxCoeff());
  }
  return {"gp.dense_posterior", worst < 1e-8, "max abs err " + sci(worst)};
}

CheckResult check_cholesky_derivative() {
  Rng rng(15);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 5; ++t) {
    Matrix b(5, 5), e(5, 5);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) {
        b(i, j) = normal(rng);
        e(i, j) = normal(rng);
      }
    const Matrix a = b * b.transpose() + 5.0 * Matrix::Identity(5, 5);
    const Matrix da = e + e.transpose();
    const Matrix l = gp::cholesky_with_jitter(a).lower;
    const Matrix dl = gp::cholesky_derivative(l, da);
    const Matrix lp = Eigen::LLT<Matrix>(a + h * da).matrixL();
    const Matrix lm = Eigen::LLT<Matrix>(a - h * da).matrixL();
    const Matrix fd = (lp - lm) / (2.0 * h);
    worst = std::max(worst, (fd - dl).norm() / fd.norm());
  }
  return {"gp.cholesky_derivative_fd", worst < 1e-6, "max rel err " + sci(worst)};
}

CheckResult check_qkg_gradient() {
  Rng rng(16);
  int total = 0, passed = 0;
  const double h = 1e-4;
  for (int t = 0; t < 5; ++t) {
    const Index d = 1 + t % 2;
    const Index q = 1 + t % 3;
    const BoxDomain box = BoxDomain::cube(d, 0.0, 1.0);
    const gp::Dataset data = random_data(4, d, rng);
    const gp::Posterior post(data, random_spec(d, t % 2 ? 0.25 : 0.0, rng));
    const acq::Batch batch(box.uniform(q, rng));
    sampling::DiscreteSet disc;
    disc.points = box.uniform(20, rng);
    disc.provenance.assign(20, sampling::Provenance::posterior_minimum_sample);
    disc.add_rows(data.points, sampling::Provenance::past_observation);
    McOptions mc;
    mc.n_mc = 2048;
    mc.seed = 1000 + static_cast<std::uint64_t>(t);
    const acq::QkgEvaluator eval(post, disc);
    const acq::StochasticEstimate g = eval.gradient(batch, mc);
    for (Index i = 0; i < q; ++i) {
      for (Index j = 0; j < d; ++j) {
        acq::Batch plus = batch, minus = batch;
        plus.points(i, j) += h;
        minus.points(i, j) -= h;
        McOptions keep = mc;
        acq::QkgOptions opts;
        opts.keep_samples = true;
        const acq::QkgEvaluator e2(post, disc, opts);
        const acq::StochasticEstimate vp = e2.value(plus, keep), vm = e2.value(minus, keep);
        const Vector diff = (vp.samples - vm.samples) / (2.0 * h);
        const double fd = diff.mean();
        const double n = static_cast<double>(diff.size());
        const double se_fd = std::sqrt((diff.array() - fd).square().sum() / (n - 1.0) / n);
        const double se = std::sqrt(se_fd * se_fd + g.gradient_stderr(i, j) * g.gradient_stderr(i, j));
        ++total;
        if (std::abs(fd - g.gradient(i, j)) <= 4.0 * se + 1e-6) ++passed;
      }
    }
  }
  return {"acq.gradient_fd", passed >= total - 1,
          std::to_string(passed) + "/" + std::to_string(total) + " entries within 4 SE"};
}

CheckResult check_qei_reduction() {
  Rng rng(17);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Index d = 1 + t % 3;
    const Index q = 1 + t % 3;
    const BoxDomain box = BoxDomain::cube(d, 0.0, 1.0);
    const gp::Dataset data = random_data(5, d, rng);
    const gp::Posterior post(data, random_spec(d, 0.0, rng));
    const acq::Batch batch(box.uniform(q, rng));
    sampling::DiscreteSet disc;
    disc.points.resize(0, d);
    disc.add_rows(data.points, sampling::Provenance::past_observation);
    McOptions mc;
    mc.n_mc = 256;
    mc.seed = 2000 + static_cast<std::uint64_t>(t);
    acq::QkgOptions qopts;
    qopts.exclude_batch_from_incumbent = true;
    qopts.keep_samples = true;
    baselines::QeiOptions eopts;
    eopts.keep_samples = true;
    const acq::StochasticEstimate kg = acq::QkgEvaluator(post, disc, qopts).value(batch, mc);
    const acq::StochasticEstimate ei = baselines::qei_value(post, batch, mc, false, eopts);
    worst = std::max(worst, (kg.samples - ei.samples).cwiseAbs().maxCoeff());
  }
  return {"acq.qkg_qei_reduction", worst < 1e-10, "max per-sample diff " + sci(worst)};
}

}  // namespace

std::vector<CheckResult> run_selftest() {
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"kernel.closed_form", check_kernel_closed_form},
      {"kernel.gradient_fd", check_kernel_gradient},
      {"gp.interpolation", check_gp_interpolation},
      {"gp.dense_posterior", check_gp_dense},
      {"gp.cholesky_derivative_fd", check_cholesky_derivative},
      {"acq.gradient_fd", check_qkg_gradient},
      {"acq.qkg_qei_reduction", check_qei_reduction}};
  std::vector<CheckResult> out;
  for (const auto& [name, check] : checks) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

int cmd_selftest(std::ostream& out) {
  int failures = 0;
  for (const CheckResult& r : run_selftest()) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    if (!r.passed) ++failures;
  }
  out << (failures == 0 ? "selftest passed\n" : "selftest failed: " + std::to_string(failures) + " check(s)\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace qkg::cli
