#pragma once

#include <vector>

#include "qkg/box.hpp"
#include "qkg/gp/kernel.hpp"

namespace qkg::gp {

/// Box constraints on the positive hyperparameters. Setting noise_lower ==
/// noise_upper pins the noise variance (noise-free models use 0 for both).
struct HyperBounds {
  Vector length_lower;
  Vector length_upper;
  double signal_lower = 1e-6;
  double signal_upper = 1e6;
  double noise_lower = 1e-8;
  double noise_upper = 1.0;

  bool noise_fixed() const { return noise_lower == noise_upper; }
  void validate(Index dim) const;
};

/// Default bounds:
///   length scales in [1e-3, 10] x box width,
///   signal variance in [1e-6, 1e6] x Var(y)  ([1e-6, 1e6] when n < 2),
///   noise variance in [1e-8, Var(y)].
HyperBounds default_bounds(const Dataset& data, const BoxDomain& box);

struct MleOptions {
  int restarts = 8;          ///< random log-uniform starts
  int max_iterations = 100;  ///< per start
  double tolerance = 1e-6;   ///< projected-gradient infinity norm in log space
  /// Additional deterministic starts (e.g. the previous iteration's fit).
  std::vector<ModelSpec> extra_starts;
  /// Also start from a data-scaled guess: signal variance Var(y), noise 0.1 Var(y),
  /// length scales at 1/20 of their upper bound (half the box under default_bounds).
  bool data_start = true;
};

/// log N(y | mean_const, K + diag(noise)) with the jitter ladder applied to the Gram matrix.
double log_marginal_likelihood(const Dataset& data, const ModelSpec& spec);

/// Same as above but with mean_const replaced by its generalized-least-squares
/// estimate, i.e. the likelihood profiled over the constant mean.
double profile_log_likelihood(const Dataset& data, const ModelSpec& spec, double* gls_mean = nullptr);

/// Multi-start maximum likelihood in log-parameter space.
///
/// mean_const is profiled out in closed form. The result's likelihood is never
/// below that of any start point. Throws PreconditionError when n < 2.
ModelSpec fit_hyperparameters_mle(const Dataset& data, const HyperBounds& bounds, Rng& rng,
                                  const MleOptions& options = {});

}  // namespace qkg::gp
