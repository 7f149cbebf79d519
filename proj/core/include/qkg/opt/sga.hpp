#pragma once

#include <functional>
#include <vector>

#include "qkg/acq/qkg.hpp"

namespace qkg::opt {

/// Step sizes gamma_t = a / (offset + t)^alpha for t = 1, 2, ...
///
/// alpha in (0.5, 1] is exactly the range where sum gamma_t diverges while
/// sum gamma_t^2 converges (p-series), the step-size conditions under which
/// stochastic gradient ascent reaches a stationary point. The constructor-style
/// validate() rejects anything else.
struct SgaSchedule {
  double a = 1.0;
  double offset = 10.0;
  double alpha = 0.7;
  int max_steps = 100;
  int n_starts = 8;

  void validate() const;
  double step(int t) const;

  /// a = 0.3 x mean box width, offset 10, alpha 0.7, 100 steps, 8 starts.
  static SgaSchedule defaults_for(const BoxDomain& box);
};

/// Acquisition oracle: estimate at `batch` using Monte Carlo seed `seed`.
using BatchEstimator = std::function<acq::StochasticEstimate(const acq::Batch& batch, std::uint64_t seed)>;

struct TrajectoryRecord {
  acq::Batch start;
  acq::Batch final;
  double start_value = 0.0;  ///< CRN value of the start batch (shared seed)
  double final_value = 0.0;  ///< CRN value of the final batch (shared seed)
  bool finite = true;
};

struct SgaResult {
  acq::Batch best;
  double best_value = 0.0;
  std::uint64_t selection_seed = 0;
  std::vector<TrajectoryRecord> trajectories;
};

struct SgaOptions {
  /// Per-coordinate displacement cap per iteration, as a fraction of box width.
  double max_step_fraction = 0.1;
  /// Also evaluate each start batch under the shared seed (for progress diagnostics).
  bool evaluate_starts = false;
  /// Optional explicit starting batches; Latin hypercube starts fill the rest.
  std::vector<acq::Batch> initial_batches;
};

/// Coordinate-wise clamp of every row into the box. Idempotent.
Points project_to_box(const Points& z, const BoxDomain& box);

/// Multi-start projected stochastic gradient ascent over box^q.
///
/// Starts are a Latin hypercube over box^q. Each iteration moves
/// z <- project(z + gamma_t * (width_j / mean width) * grad), with each coordinate's
/// displacement capped at max_step_fraction x width_j. The final batches are compared
/// with value_fn under one shared seed and the best is returned. Deterministic given
/// the generator state. Throws NumericalError if every trajectory diverges.
SgaResult sga_maximize(const BatchEstimator& grad_fn, const BatchEstimator& value_fn, const BoxDomain& box,
                       Index q, const SgaSchedule& schedule, Rng& rng, const SgaOptions& options = {});

}  // namespace qkg::opt
