#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qkg/acq/batch.hpp"
#include "qkg/bench/objectives.hpp"
#include "qkg/gp/posterior.hpp"

namespace qkg::bench {

enum class Policy { qkg, qei, gp_bucb, gp_ucb_pe };

std::string policy_name(Policy policy);
/// Throws std::invalid_argument for an unknown name.
Policy parse_policy(const std::string& name);

/// Solver settings used inside each BO iteration.
struct Tuning {
  int sga_starts = 8;
  int sga_steps = 100;
  std::size_t sga_mc = 64;          ///< MC samples per stochastic gradient
  std::size_t selection_mc = 1024;  ///< MC samples for the CRN winner selection
  Index minima_pool = 500;          ///< random pool per posterior-minimum sample
  int mle_restarts = 3;
  int mle_iterations = 60;
  Index ucb_pool = 2000;
  int polish_steps = 30;
  /// Test hook: A_n = past observations U batch and the incumbent over past
  /// observations only (the setting in which q-KG coincides with parallel EI).
  bool restrict_discretization = false;
};

struct RunConfig {
  std::string objective = "branin2";
  Policy policy = Policy::qkg;
  Index q = 4;
  Index initial_samples = 0;  ///< 0 means 2d + 2
  int iterations = 0;         ///< 0 means the per-objective default
  double noise_sd = 0.0;
  Index discretization_samples = 1000;
  std::uint64_t seed = 0;
  Index async_pending = 0;
  Tuning tuning;

  /// Fills the defaults that depend on the objective (I and N).
  RunConfig resolved() const;
  /// Throws std::invalid_argument on an invalid resolved configuration.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  Index evaluations = 0;
  Vector recommended;
  double recommended_value = 0.0;  ///< noise-free objective at the recommendation
  double regret = 0.0;
  double log10_regret = 0.0;
  double wall_ms = 0.0;
  bool fallback = false;           ///< hyperparameter fit failed, previous fit reused
  acq::Batch batch;                ///< batch chosen at this iteration (empty at the last one)
};

struct RunTrace {
  RunConfig config;
  std::vector<IterationRecord> records;
  Points observed_points;
  Vector observed_values;
  std::vector<gp::ModelSpec> fits;  ///< hyperparameters used at each iteration

  const IterationRecord& final_record() const { return records.back(); }
};

/// Regret below which log10 regret is reported as -12.
inline constexpr double kRegretFloor = 1e-12;
double log10_regret(double regret);

/// Thrown when a run cannot continue; carries the iterations completed so far.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, RunTrace partial) : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

/// Optional per-iteration callback (progress reporting).
using IterationObserver = std::function<void(const IterationRecord&)>;

/// Batch Bayesian optimization on a synthetic objective.
///
/// Iteration 0 records the recommendation after the Latin hypercube design; each
/// later iteration fits the GP by maximum likelihood, builds the discretization,
/// maximizes the policy's acquisition, observes the batch and records the
/// recommendation argmin mu over the discretization (with a short local polish).
/// The noise-free objective is only used for regret reporting.
RunTrace run_bo_loop(const RunConfig& config, const IterationObserver& observer = {});

/// Posterior-mean recommendation: best discretization point, then projected
/// gradient descent on mu within the box. Never returns a point with larger mu.
Vector recommend(const gp::Posterior& post, const Points& candidates, const BoxDomain& box, int polish_steps);

}  // namespace qkg::bench
