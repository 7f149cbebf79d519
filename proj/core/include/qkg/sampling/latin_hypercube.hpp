#pragma once

#include "qkg/box.hpp"

namespace qkg::sampling {

/// `count` points such that, in every dimension, each of the `count` equal-width
/// bins of the box contains exactly one point. Deterministic given the generator state.
Points latin_hypercube(Index count, const BoxDomain& box, Rng& rng);

}  // namespace qkg::sampling
