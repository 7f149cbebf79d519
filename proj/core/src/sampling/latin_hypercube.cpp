#include "qkg/sampling/latin_hypercube.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace qkg::sampling {

Points latin_hypercube(Index count, const BoxDomain& box, Rng& rng) {
  if (count < 1) throw std::invalid_argument("latin_hypercube: count must be at least 1");
  const Index d = box.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Index> perm(static_cast<std::size_t>(count));
  Points out(count, d);
  for (Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double lo = box.lower()[j];
    const double bin = (box.upper()[j] - lo) / static_cast<double>(count);
    for (Index i = 0; i < count; ++i) {
      const double cell = static_cast<double>(perm[static_cast<std::size_t>(i)]);
      // Clamp guards the last bin against rounding past the upper bound.
      out(i, j) = std::min(lo + (cell + unit(rng)) * bin, box.upper()[j]);
    }
  }
  return out;
}

}  // namespace qkg::sampling
