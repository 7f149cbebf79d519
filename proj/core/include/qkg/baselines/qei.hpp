#pragma once

#include <optional>

#include "qkg/acq/qkg.hpp"

namespace qkg::baselines {

struct QeiOptions {
  std::optional<BoxDomain> box;
  bool keep_samples = false;
};

/// Monte Carlo parallel expected improvement,
///   E[(min y^{1:n} - min_i (mu^{(n)}(z_i) + sigma_tilde(z_i) Z_q))^+],
/// drawn with the same reparameterization and normal substreams as q-KG.
/// The IPA gradient uses derivative 0 wherever the improvement is 0.
acq::StochasticEstimate qei_value(const gp::Posterior& post, const acq::Batch& batch, const McOptions& mc,
                                  bool with_gradient = false, const QeiOptions& options = {});

}  // namespace qkg::baselines
