#include "qkg/opt/sga.hpp"

#include <cmath>
#include <limits>

#include "qkg/sampling/latin_hypercube.hpp"

namespace qkg::opt {

namespace {

constexpr std::uint64_t kGradientStream = 0;

// Latin hypercube over box^q, reshaped into n_starts batches.
std::vector<acq::Batch> latin_starts(const BoxDomain& box, Index q, int count, Rng& rng) {
  const Index d = box.dim();
  Vector lo(q * d), hi(q * d);
  for (Index i = 0; i < q; ++i) {
    lo.segment(i * d, d) = box.lower();
    hi.segment(i * d, d) = box.upper();
  }
  const Points flat = sampling::latin_hypercube(count, BoxDomain(lo, hi), rng);
  std::vector<acq::Batch> out;
  for (int s = 0; s < count; ++s) {
    Points z(q, d);
    for (Index i = 0; i < q; ++i) z.row(i) = flat.row(s).segment(i * d, d);
    out.emplace_back(std::move(z));
  }
  return out;
}

}  // namespace

void SgaSchedule::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("SgaSchedule: a must be positive");
  if (!(offset >= 0.0)) throw std::invalid_argument("SgaSchedule: offset must be nonnegative");
  // sum t^-alpha diverges iff alpha <= 1; sum t^-2alpha converges iff alpha > 1/2.
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw std::invalid_argument("SgaSchedule: alpha must lie in (0.5, 1] for sum(gamma) = inf and sum(gamma^2) < inf");
  if (max_steps < 0) throw std::invalid_argument("SgaSchedule: max_steps must be nonnegative");
  if (n_starts < 1) throw std::invalid_argument("SgaSchedule: n_starts must be at least 1");
}

double SgaSchedule::step(int t) const { return a / std::pow(offset + static_cast<double>(t), alpha); }

SgaSchedule SgaSchedule::defaults_for(const BoxDomain& box) {
  SgaSchedule s;
  s.a = 0.3 * box.mean_width();
  return s;
}

Points project_to_box(const Points& z, const BoxDomain& box) {
  if (z.cols() != box.dim()) throw std::invalid_argument("project_to_box: dimension mismatch");
  Points out(z.rows(), z.cols());
  for (Index i = 0; i < z.rows(); ++i) out.row(i) = box.clamp(z.row(i).transpose()).transpose();
  return out;
}

SgaResult sga_maximize(const BatchEstimator& grad_fn, const BatchEstimator& value_fn, const BoxDomain& box,
                       Index q, const SgaSchedule& schedule, Rng& rng, const SgaOptions& options) {
  schedule.validate();
  if (q < 1) throw std::invalid_argument("sga_maximize: q must be at least 1");
  const Index d = box.dim();
  const Vector width = box.width();
  const Vector scale = width / box.mean_width();
  const Vector cap = options.max_step_fraction * width;

  std::vector<acq::Batch> starts;
  for (const acq::Batch& b : options.initial_batches) {
    if (static_cast<int>(starts.size()) >= schedule.n_starts) break;
    if (b.q() != q || b.dim() != d) throw std::invalid_argument("sga_maximize: initial batch has the wrong shape");
    starts.emplace_back(project_to_box(b.points, box));
  }
  const int missing = schedule.n_starts - static_cast<int>(starts.size());
  if (missing > 0) {
    for (acq::Batch& b : latin_starts(box, q, missing, rng)) starts.push_back(std::move(b));
  }
  const std::uint64_t master = rng();

  SgaResult result;
  result.selection_seed = derive_seed(master, 1);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    TrajectoryRecord rec;
    rec.start = starts[s];
    Points z = rec.start.points;
    for (int t = 1; t <= schedule.max_steps; ++t) {
      const acq::StochasticEstimate est =
          grad_fn(acq::Batch(z), derive_seed(master, kGradientStream, s * 1000003ULL + static_cast<std::uint64_t>(t)));
      if (!est.has_gradient() || !est.gradient.allFinite()) {
        rec.finite = false;
        break;
      }
      const double gamma = schedule.step(t);
      for (Index i = 0; i < q; ++i) {
        for (Index j = 0; j < d; ++j) {
          const double delta = std::clamp(gamma * scale[j] * est.gradient(i, j), -cap[j], cap[j]);
          z(i, j) += delta;
        }
      }
      z = project_to_box(z, box);
      if (!z.allFinite()) {
        rec.finite = false;
        break;
      }
    }
    rec.final = acq::Batch(z);
    result.trajectories.push_back(std::move(rec));
  }

  double best = -std::numeric_limits<double>::infinity();
  Index best_index = -1;
  for (std::size_t s = 0; s < result.trajectories.size(); ++s) {
    TrajectoryRecord& rec = result.trajectories[s];
    if (!rec.finite) continue;
    rec.final_value = value_fn(rec.final, result.selection_seed).value;
    if (options.evaluate_starts) rec.start_value = value_fn(rec.start, result.selection_seed).value;
    if (rec.final_value > best) {
      best = rec.final_value;
      best_index = static_cast<Index>(s);
    }
  }
  if (best_index < 0) throw NumericalError("sga_maximize: every trajectory produced non-finite iterates");
  result.best = result.trajectories[static_cast<std::size_t>(best_index)].final;
  result.best_value = best;
  return result;
}

}  // namespace qkg::opt
