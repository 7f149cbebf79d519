#include "qkg/common.hpp"

namespace qkg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream) {
  return derive_seed(derive_seed(master, stream), substream);
}

NormalSource seeded_normals(std::uint64_t seed) {
  return [seed](std::uint64_t index, Eigen::Ref<Vector> out) {
    Rng gen(derive_seed(seed, index));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index k = 0; k < out.size(); ++k) out[k] = normal(gen);
  };
}

}  // namespace qkg
