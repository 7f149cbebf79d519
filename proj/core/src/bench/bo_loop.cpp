#include "qkg/bench/bo_loop.hpp"

#include <chrono>
#include <cmath>

#include "qkg/acq/qkg.hpp"
#include "qkg/baselines/qei.hpp"
#include "qkg/baselines/ucb.hpp"
#include "qkg/gp/mle.hpp"
#include "qkg/opt/sga.hpp"
#include "qkg/sampling/latin_hypercube.hpp"

namespace qkg::bench {

namespace {

// Random streams of one run; every iteration draws from its own substream.
enum Stream : std::uint64_t { kDesign = 0, kNoise = 1, kFit = 2, kDisc = 3, kAcquire = 4 };

Rng iteration_rng(std::uint64_t seed, Stream stream, int iteration) {
  return Rng(derive_seed(seed, stream, static_cast<std::uint64_t>(iteration)));
}

gp::HyperBounds bounds_for(const gp::Dataset& data, const BoxDomain& box, double noise_sd) {
  gp::HyperBounds b = gp::default_bounds(data, box);
  if (noise_sd == 0.0) b.noise_lower = b.noise_upper = 0.0;
  return b;
}

acq::Batch maximize(const RunConfig& cfg, const gp::Posterior& post, const sampling::DiscreteSet& disc,
                    const acq::Batch& pending, const BoxDomain& box, int iteration) {
  const Tuning& t = cfg.tuning;
  Rng rng = iteration_rng(cfg.seed, kAcquire, iteration);
  if (cfg.policy == Policy::gp_bucb || cfg.policy == Policy::gp_ucb_pe) {
    baselines::BaselineConfig bc;
    bc.candidate_pool_size = t.ucb_pool;
    bc.beta_schedule = baselines::standard_beta_schedule(t.ucb_pool);
    return cfg.policy == Policy::gp_bucb ? baselines::gp_bucb_select(post, cfg.q, bc, box, rng, iteration + 1)
                                         : baselines::gp_ucb_pe_select(post, cfg.q, bc, box, rng, iteration + 1);
  }

  opt::SgaSchedule schedule = opt::SgaSchedule::defaults_for(box);
  schedule.n_starts = t.sga_starts;
  schedule.max_steps = t.sga_steps;
  const auto mc = [](std::size_t n, std::uint64_t seed) {
    McOptions m;
    m.n_mc = n;
    m.seed = seed;
    return m;
  };

  if (cfg.policy == Policy::qei) {
    baselines::QeiOptions options;
    options.box = box;
    const auto grad = [&](const acq::Batch& b, std::uint64_t seed) {
      return baselines::qei_value(post, b, mc(t.sga_mc, seed), true, options);
    };
    const auto value = [&](const acq::Batch& b, std::uint64_t seed) {
      return baselines::qei_value(post, b, mc(t.selection_mc, seed), false, options);
    };
    return opt::sga_maximize(grad, value, box, cfg.q, schedule, rng).best;
  }

  acq::QkgOptions options;
  options.box = box;
  options.exclude_batch_from_incumbent = t.restrict_discretization;
  const acq::QkgEvaluator evaluator(post, disc, options);
  const auto grad = [&](const acq::Batch& b, std::uint64_t seed) {
    return evaluator.gradient(acq::stack(b, pending), mc(t.sga_mc, seed), cfg.q);
  };
  const auto value = [&](const acq::Batch& b, std::uint64_t seed) {
    return evaluator.value(acq::stack(b, pending), mc(t.selection_mc, seed));
  };
  return opt::sga_maximize(grad, value, box, cfg.q, schedule, rng).best;
}

}  // namespace

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::qkg: return "qkg";
    case Policy::qei: return "qei";
    case Policy::gp_bucb: return "gp_bucb";
    case Policy::gp_ucb_pe: return "gp_ucb_pe";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::qkg, Policy::qei, Policy::gp_bucb, Policy::gp_ucb_pe}) {
    if (policy_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

RunConfig RunConfig::resolved() const {
  RunConfig out = *this;
  const Objective obj = make_objective(objective);
  if (out.initial_samples == 0) out.initial_samples = 2 * obj.dim() + 2;
  if (out.iterations == 0 && out.q > 0) out.iterations = default_iterations(obj, out.initial_samples, out.q);
  return out;
}

void RunConfig::validate() const {
  make_objective(objective);
  if (q < 1) throw std::invalid_argument("q must be at least 1");
  if (initial_samples < 2) throw std::invalid_argument("initial_samples must be at least 2");
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw std::invalid_argument("noise_sd must be nonnegative");
  if (discretization_samples < 0) throw std::invalid_argument("discretization_samples must be nonnegative");
  if (async_pending < 0 || async_pending >= q) throw std::invalid_argument("async_pending must lie in [0, q)");
  if (async_pending > 0 && policy != Policy::qkg)
    throw std::invalid_argument("async_pending is only supported for the qkg policy");
  if (tuning.sga_starts < 1 || tuning.sga_steps < 0) throw std::invalid_argument("invalid SGA settings");
  if (tuning.sga_mc < 2 || tuning.selection_mc < 2) throw std::invalid_argument("MC sample counts must be at least 2");
  if (tuning.minima_pool < 2) throw std::invalid_argument("minima_pool must be at least 2");
  if (tuning.mle_restarts < 0 || tuning.mle_iterations < 1) throw std::invalid_argument("invalid MLE settings");
  if (tuning.ucb_pool < 1) throw std::invalid_argument("ucb_pool must be at least 1");
  if (tuning.polish_steps < 0) throw std::invalid_argument("polish_steps must be nonnegative");
}

double log10_regret(double regret) { return std::log10(std::max(regret, kRegretFloor)); }

Vector recommend(const gp::Posterior& post, const Points& candidates, const BoxDomain& box, int polish_steps) {
  if (candidates.rows() < 1) throw std::invalid_argument("recommend: no candidates");
  const Vector mu = post.means(candidates);
  Index best = 0;
  for (Index i = 1; i < mu.size(); ++i) {
    if (mu[i] < mu[best]) best = i;
  }
  Vector x = box.clamp(candidates.row(best).transpose());
  double fx = post.mean(x);
  const Vector width = box.width();
  double step = 0.05;  // fraction of the box width
  for (int s = 0; s < polish_steps && step > 1e-9; ++s) {
    const Vector g = post.mean_grad(x).cwiseProduct(width);
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    const Vector trial = box.clamp(x - step * width.cwiseProduct(g) / gmax);
    const double ft = post.mean(trial);
    if (ft < fx) {
      x = trial;
      fx = ft;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return x;
}

RunTrace run_bo_loop(const RunConfig& config, const IterationObserver& observer) {
  const RunConfig cfg = config.resolved();
  cfg.validate();
  const Objective obj = make_objective(cfg.objective);
  const BoxDomain& box = obj.box;
  const Index d = obj.dim();
  const Index q = cfg.q;
  const Index p = cfg.async_pending;

  RunTrace trace;
  trace.config = cfg;
  trace.observed_points.resize(0, d);
  Rng noise_rng(derive_seed(cfg.seed, kNoise));
  const auto record_observation = [&](const Vector& x, double y) {
    trace.observed_points.conservativeResize(trace.observed_points.rows() + 1, d);
    trace.observed_points.row(trace.observed_points.rows() - 1) = x.transpose();
    trace.observed_values.conservativeResize(trace.observed_values.size() + 1);
    trace.observed_values[trace.observed_values.size() - 1] = y;
  };

  gp::Dataset data;
  data.points.resize(0, d);
  {
    Rng rng = iteration_rng(cfg.seed, kDesign, 0);
    const Points design = sampling::latin_hypercube(cfg.initial_samples, box, rng);
    for (Index i = 0; i < design.rows(); ++i) {
      const Vector x = design.row(i).transpose();
      const double y = observe(obj, x, cfg.noise_sd, noise_rng);
      data.append(x, y);
      record_observation(x, y);
    }
  }

  // Observed but not yet incorporated (asynchronous mode).
  acq::Batch pending(Points(0, d));
  Vector pending_values;
  std::optional<gp::ModelSpec> previous;

  for (int s = 0; s <= cfg.iterations; ++s) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = s;
    rec.evaluations = trace.observed_values.size();

    std::optional<gp::Posterior> post;
    try {
      Rng rng = iteration_rng(cfg.seed, kFit, s);
      gp::MleOptions mle;
      mle.restarts = cfg.tuning.mle_restarts;
      mle.max_iterations = cfg.tuning.mle_iterations;
      if (previous) mle.extra_starts.push_back(*previous);
      post.emplace(data, gp::fit_hyperparameters_mle(data, bounds_for(data, box, cfg.noise_sd), rng, mle));
    } catch (const std::exception&) {
      post.reset();
    }
    if (!post) {
      rec.fallback = true;
      if (!previous) throw RunError("iteration " + std::to_string(s) + ": hyperparameter fit failed", trace);
      try {
        post.emplace(data, *previous);
      } catch (const std::exception& e) {
        throw RunError("iteration " + std::to_string(s) + ": " + e.what(), trace);
      }
    }
    previous = post->spec();
    trace.fits.push_back(post->spec());

    try {
      sampling::DiscreteSet disc;
      if (cfg.tuning.restrict_discretization) {
        disc.points.resize(0, d);
        disc.add_rows(data.points, sampling::Provenance::past_observation);
        disc.add_rows(pending.points, sampling::Provenance::candidate_batch);
      } else {
        Rng rng = iteration_rng(cfg.seed, kDisc, s);
        sampling::MinimaSamplingOptions mopts;
        disc = sampling::build_discretization(*post, pending, cfg.discretization_samples, cfg.tuning.minima_pool,
                                              box, rng, mopts);
      }

      rec.recommended = recommend(*post, disc.points, box, cfg.tuning.polish_steps);
      rec.recommended_value = obj.eval(rec.recommended);
      rec.regret = std::max(rec.recommended_value - obj.true_min, 0.0);
      rec.log10_regret = log10_regret(rec.regret);

      if (s < cfg.iterations) {
        rec.batch = maximize(cfg, *post, disc, pending, box, s);
        Vector values(q);
        for (Index i = 0; i < q; ++i) {
          values[i] = observe(obj, rec.batch.row(i), cfg.noise_sd, noise_rng);
          record_observation(rec.batch.row(i), values[i]);
        }
        for (Index i = 0; i < pending.q(); ++i) data.append(pending.row(i), pending_values[i]);
        for (Index i = 0; i < q - p; ++i) data.append(rec.batch.row(i), values[i]);
        pending = acq::Batch(rec.batch.points.bottomRows(p));
        pending_values = values.tail(p);
      }
    } catch (const std::exception& e) {
      throw RunError("iteration " + std::to_string(s) + ": " + e.what(), trace);
    }

    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (observer) observer(rec);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace qkg::bench
