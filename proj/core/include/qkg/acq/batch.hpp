#pragma once

#include "qkg/box.hpp"

namespace qkg::acq {

/// An ordered set of q candidate points z^{1:q}, one per row.
struct Batch {
  Points points;

  Batch() = default;
  explicit Batch(Points pts) : points(std::move(pts)) {}

  Index q() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  Vector row(Index i) const { return points.row(i).transpose(); }

  /// Throws std::invalid_argument when empty or outside the box.
  void validate(const BoxDomain& box) const;
};

/// Stacks `top` above `bottom` (used for pending points in the asynchronous setting).
Batch stack(const Batch& top, const Batch& bottom);

}  // namespace qkg::acq
