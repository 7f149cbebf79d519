#include "qkg/box.hpp"

namespace qkg {

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0)
    throw std::invalid_argument("BoxDomain: bounds must be nonempty and of equal length");
  for (Index j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j]))
      throw std::invalid_argument("BoxDomain: lower bound must be below upper bound in dimension " +
                                  std::to_string(j));
  }
}

BoxDomain BoxDomain::cube(Index dim, double lo, double hi) {
  return BoxDomain(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool BoxDomain::contains(const Eigen::Ref<const Vector>& x, double tol) const {
  if (x.size() != dim()) return false;
  for (Index j = 0; j < dim(); ++j) {
    if (!(x[j] >= lower_[j] - tol && x[j] <= upper_[j] + tol)) return false;
  }
  return true;
}

bool BoxDomain::contains_rows(const Points& pts, double tol) const {
  if (pts.rows() > 0 && pts.cols() != dim()) return false;
  for (Index i = 0; i < pts.rows(); ++i) {
    if (!contains(pts.row(i).transpose(), tol)) return false;
  }
  return true;
}

Vector BoxDomain::clamp(const Eigen::Ref<const Vector>& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Points BoxDomain::uniform(Index count, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Points out(count, dim());
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < dim(); ++j) out(i, j) = lower_[j] + unit(rng) * (upper_[j] - lower_[j]);
  }
  return out;
}

}  // namespace qkg
