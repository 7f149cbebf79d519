#pragma once

#include <cstdint>
#include <vector>

#include "qkg/acq/batch.hpp"
#include "qkg/gp/posterior.hpp"

namespace qkg::sampling {

enum class Provenance : std::uint8_t { posterior_minimum_sample, past_observation, candidate_batch };

/// Coordinate-wise tolerance under which two points count as the same location.
inline constexpr double kDuplicateTolerance = 1e-12;

/// Finite set A_n over which the inner minima of the knowledge gradient are taken.
struct DiscreteSet {
  Points points;
  std::vector<Provenance> provenance;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Index of a point within kDuplicateTolerance of `x`, or -1.
  Index find(const Eigen::Ref<const Vector>& x) const;

  /// Appends `x` unless a duplicate is already present; returns the point's index.
  Index add(const Eigen::Ref<const Vector>& x, Provenance tag);
  void add_rows(const Points& pts, Provenance tag);

  /// Copy with every candidate_batch point removed.
  DiscreteSet without_candidates() const;
};

struct MinimaSamplingOptions {
  /// Replicates that share one random pool (and one pool factorization).
  Index group_size = 100;
  /// Smallest pool tried when the pool covariance cannot be factored.
  Index min_pool_size = 16;
};

/// Approximate draws from the distribution of the posterior's global minimizer.
///
/// Each replicate takes one joint posterior draw over a uniform random pool in
/// the box and returns the pool point where the draw is smallest. Replicates are
/// processed in groups that share a pool; every group and replicate uses its own
/// substream of a master seed drawn from `rng`, so results do not depend on
/// evaluation order.
Points sample_posterior_minima(const gp::Posterior& post, Index count, Index pool_size, const BoxDomain& box,
                               Rng& rng, const MinimaSamplingOptions& options = {});

/// A_n = minima samples U past observations U batch rows, deduplicated with the
/// earliest provenance kept.
DiscreteSet build_discretization(const gp::Posterior& post, const acq::Batch& batch, Index count,
                                 Index pool_size, const BoxDomain& box, Rng& rng,
                                 const MinimaSamplingOptions& options = {});

}  // namespace qkg::sampling
