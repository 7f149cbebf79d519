#include "qkg/sampling/discretization.hpp"

#include <algorithm>

#include "qkg/gp/cholesky.hpp"

namespace qkg::sampling {

namespace {

// Seeds for the two independent substream families.
constexpr std::uint64_t kPoolStream = 0;
constexpr std::uint64_t kDrawStream = 1;

}  // namespace

Index DiscreteSet::find(const Eigen::Ref<const Vector>& x) const {
  for (Index i = 0; i < size(); ++i) {
    if ((points.row(i).transpose() - x).cwiseAbs().maxCoeff() <= kDuplicateTolerance) return i;
  }
  return -1;
}

Index DiscreteSet::add(const Eigen::Ref<const Vector>& x, Provenance tag) {
  if (size() == 0 && points.cols() == 0) points.resize(0, x.size());
  if (x.size() != dim()) throw std::invalid_argument("DiscreteSet::add: dimension mismatch");
  if (const Index existing = find(x); existing >= 0) return existing;
  points.conservativeResize(size() + 1, Eigen::NoChange);
  points.row(size() - 1) = x.transpose();
  provenance.push_back(tag);
  return size() - 1;
}

void DiscreteSet::add_rows(const Points& pts, Provenance tag) {
  for (Index i = 0; i < pts.rows(); ++i) add(pts.row(i).transpose(), tag);
}

DiscreteSet DiscreteSet::without_candidates() const {
  DiscreteSet out;
  out.points.resize(0, dim());
  std::vector<Index> keep;
  for (Index i = 0; i < size(); ++i) {
    if (provenance[static_cast<std::size_t>(i)] != Provenance::candidate_batch) keep.push_back(i);
  }
  out.points.resize(static_cast<Index>(keep.size()), dim());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.points.row(static_cast<Index>(k)) = points.row(keep[k]);
    out.provenance.push_back(provenance[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

Points sample_posterior_minima(const gp::Posterior& post, Index count, Index pool_size, const BoxDomain& box,
                               Rng& rng, const MinimaSamplingOptions& options) {
  if (count < 1) throw std::invalid_argument("sample_posterior_minima: count must be at least 1");
  if (pool_size < 2) throw std::invalid_argument("sample_posterior_minima: pool_size must be at least 2");
  if (box.dim() != post.dim()) throw std::invalid_argument("sample_posterior_minima: box dimension mismatch");
  const Index group = std::max<Index>(1, options.group_size);
  const std::uint64_t master = rng();

  const NormalSource draw_normals = seeded_normals(derive_seed(master, kDrawStream));
  Points out(count, box.dim());
  const Index n_groups = (count + group - 1) / group;
  for (Index g = 0; g < n_groups; ++g) {
    Rng pool_rng(derive_seed(master, kPoolStream, static_cast<std::uint64_t>(g)));
    const Points full_pool = box.uniform(pool_size, pool_rng);

    Index size = pool_size;
    gp::CholeskyFactor factor;
    Vector mean;
    for (;;) {
      const Points pool = full_pool.topRows(size);
      try {
        factor = gp::cholesky_with_jitter(post.covs(pool, pool));
        mean = post.means(pool);
        break;
      } catch (const NumericalError&) {
        if (size / 2 < std::max<Index>(2, options.min_pool_size)) throw;
        size /= 2;
      }
    }

    const Index first = g * group;
    const Index last = std::min(count, first + group);
    Matrix normals(size, last - first);
    for (Index r = first; r < last; ++r) {
      draw_normals(static_cast<std::uint64_t>(r), normals.col(r - first));
    }
    const Matrix draws = factor.lower.triangularView<Eigen::Lower>() * normals;
    for (Index r = first; r < last; ++r) {
      Index best = 0;
      double best_value = mean[0] + draws(0, r - first);
      for (Index k = 1; k < size; ++k) {
        const double v = mean[k] + draws(k, r - first);
        if (v < best_value) {
          best_value = v;
          best = k;
        }
      }
      out.row(r) = full_pool.row(best);
    }
  }
  return out;
}

DiscreteSet build_discretization(const gp::Posterior& post, const acq::Batch& batch, Index count,
                                 Index pool_size, const BoxDomain& box, Rng& rng,
                                 const MinimaSamplingOptions& options) {
  if (batch.q() > 0 && batch.dim() != box.dim())
    throw std::invalid_argument("build_discretization: batch dimension mismatch");
  DiscreteSet out;
  out.points.resize(0, box.dim());
  if (count > 0) {
    out.add_rows(sample_posterior_minima(post, count, pool_size, box, rng, options),
                 Provenance::posterior_minimum_sample);
  }
  out.add_rows(post.data().points, Provenance::past_observation);
  out.add_rows(batch.points, Provenance::candidate_batch);
  return out;
}

}  // namespace qkg::sampling
