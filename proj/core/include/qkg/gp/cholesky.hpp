#pragma once

#include <array>

#include "qkg/common.hpp"

namespace qkg::gp {

/// Diagonal inflations tried in order until a factorization succeeds.
inline constexpr std::array<double, 5> kJitterLadder{0.0, 1e-10, 1e-8, 1e-6, 1e-4};

struct CholeskyFactor {
  Matrix lower;          ///< L with L L^T = A + jitter I
  double jitter = 0.0;   ///< smallest ladder value that succeeded
};

/// Factors a symmetric matrix, escalating the diagonal jitter along kJitterLadder.
/// Only the lower triangle of `a` is read. Throws NumericalError naming the
/// largest rejected jitter when every level fails.
CholeskyFactor cholesky_with_jitter(const Matrix& a);

/// Forward-mode derivative of the Cholesky factor:
///   dL = L Phi(L^{-1} dA L^{-T}),  Phi = lower triangle with halved diagonal.
/// Throws NumericalError when L has a non-positive diagonal entry.
Matrix cholesky_derivative(const Matrix& lower, const Matrix& d_a);

}  // namespace qkg::gp
