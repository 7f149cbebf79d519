#pragma once

#include <optional>

#include "qkg/acq/batch_model.hpp"
#include "qkg/sampling/discretization.hpp"

namespace qkg::acq {

/// Monte Carlo estimate of an acquisition value and (optionally) its gradient
/// with respect to the free batch rows.
struct StochasticEstimate {
  double value = 0.0;
  Matrix gradient;          ///< free_rows x d; empty for value-only estimates
  double value_stderr = 0.0;
  Matrix gradient_stderr;   ///< per-entry standard error, same shape as gradient
  std::size_t n_mc = 0;
  std::uint64_t seed = 0;
  Vector samples;           ///< per-sample values, only when requested

  bool has_gradient() const { return gradient.size() > 0; }
};

/// One Monte Carlo sample of the inner knowledge-gradient difference.
struct InnerSample {
  double g = 0.0;
  Vector x_before;
  Vector x_after;
  Index before_index = -1;  ///< index into the evaluation set (fixed points, then new batch rows)
  Index after_index = -1;
};

struct QkgOptions {
  /// Take the incumbent min mu^{(n)} over non-candidate points only. With noise-free
  /// data and a discretization of past observations plus the batch, this reduces the
  /// estimator to parallel expected improvement.
  bool exclude_batch_from_incumbent = false;
  /// Box used to scale the separation of coinciding batch rows.
  std::optional<BoxDomain> box;
  /// Keep per-sample values in the returned estimate.
  bool keep_samples = false;
};

/// q-KG estimator over a fixed discretization.
///
/// The non-candidate part of the discretization (posterior-minimum samples and
/// past observations) is cached once; every evaluation appends the current batch
/// rows, so one evaluator serves a whole optimization run.
class QkgEvaluator {
 public:
  QkgEvaluator(gp::Posterior post, const sampling::DiscreteSet& disc, QkgOptions options = {});

  const gp::Posterior& posterior() const { return post_; }
  const Points& fixed_points() const { return fixed_; }
  const QkgOptions& options() const { return options_; }

  /// Mean of g over n_mc draws of Z_q; no gradient.
  StochasticEstimate value(const Batch& batch, const McOptions& mc) const;

  /// Value plus the IPA gradient with respect to rows [0, free_rows) (all rows when < 0).
  /// The value is bit-identical to value() under the same McOptions.
  StochasticEstimate gradient(const Batch& batch, const McOptions& mc, Index free_rows = -1) const;

  /// g for a single given Z_q.
  InnerSample inner(const Batch& batch, const Vector& zq) const;

 private:
  gp::Posterior post_;
  Points fixed_;
  Vector fixed_mean_;
  Matrix fixed_whitened_;
  QkgOptions options_;

  StochasticEstimate estimate(const Batch& batch, const McOptions& mc, Index free_rows) const;
};

/// K^{(n)}(x, Z) D^{-T} as a q-vector.
Vector sigma_tilde(const gp::Posterior& post, const Batch& batch, const Eigen::Ref<const Vector>& x);

InnerSample sample_inner_g(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                           const Vector& zq);

/// q-KG(z^{1:q}, A) = E[min_A mu^{(n)} - min_A (mu^{(n)} + sigma_tilde Z_q)]. Requires n_mc >= 2.
StochasticEstimate qkg_value(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                             const McOptions& mc);

/// q-KG value and its infinitesimal-perturbation-analysis gradient.
StochasticEstimate qkg_gradient(const gp::Posterior& post, const Batch& batch, const sampling::DiscreteSet& disc,
                                const McOptions& mc);

/// Asynchronous q-KG: the value of the stacked (new; pending) batch, differentiated
/// with respect to the new rows only. The pending rows are part of the
/// discretization as candidates.
StochasticEstimate qkg_async(const gp::Posterior& post, const Batch& new_batch, const Batch& pending,
                             const sampling::DiscreteSet& disc, const McOptions& mc);

}  // namespace qkg::acq
