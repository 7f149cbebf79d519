#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qkg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point sets are stored one point per row; row-major keeps each point contiguous.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Raised when a factorization or estimator cannot produce a finite result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Deterministically mixes a master seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream);

/// Fills `out` with standard normal draws for Monte Carlo sample `index`.
///
/// Each index owns an independent substream, so estimators that share a seed
/// see identical draws per sample (common random numbers) regardless of the
/// batch size or the order in which samples are processed.
using NormalSource = std::function<void(std::uint64_t index, Eigen::Ref<Vector> out)>;

NormalSource seeded_normals(std::uint64_t seed);

/// Monte Carlo controls shared by all stochastic estimators.
struct McOptions {
  std::size_t n_mc = 128;
  std::uint64_t seed = 0;
  /// Overrides the seeded stream when set (used by tests to inject draws).
  NormalSource source;

  NormalSource normals() const { return source ? source : seeded_normals(seed); }
};

inline Vector row_vector(const Points& pts, Index i) { return pts.row(i).transpose(); }

}  // namespace qkg
