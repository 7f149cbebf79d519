#pragma once

#include "qkg/common.hpp"

namespace qkg {

/// Axis-aligned box [lower, upper] in R^d.
class BoxDomain {
 public:
  BoxDomain() = default;
  /// Throws std::invalid_argument unless lower_j < upper_j for every j.
  BoxDomain(Vector lower, Vector upper);

  /// The cube [lo, hi]^dim.
  static BoxDomain cube(Index dim, double lo, double hi);

  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector width() const { return upper_ - lower_; }
  double mean_width() const { return width().mean(); }
  Vector center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Eigen::Ref<const Vector>& x, double tol = 0.0) const;
  bool contains_rows(const Points& pts, double tol = 0.0) const;

  /// Coordinate-wise clamp into the box.
  Vector clamp(const Eigen::Ref<const Vector>& x) const;

  /// `count` points drawn uniformly at random in the box.
  Points uniform(Index count, Rng& rng) const;

 private:
  Vector lower_;
  Vector upper_;
};

}  // namespace qkg
