#include "qkg/gp/cholesky.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

namespace qkg::gp {

CholeskyFactor cholesky_with_jitter(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_with_jitter: matrix must be square");
  if (!a.allFinite()) throw NumericalError("cholesky_with_jitter: matrix has non-finite entries");
  const Index m = a.rows();
  if (m == 0) return {Matrix(0, 0), 0.0};

  for (double jitter : kJitterLadder) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Matrix lower = llt.matrixL();
    if ((lower.diagonal().array() > 0.0).all() && lower.allFinite()) return {std::move(lower), jitter};
  }
  std::ostringstream msg;
  msg << "cholesky_with_jitter: factorization failed for " << m << "x" << m
      << " matrix at every jitter level from " << kJitterLadder.front() << " to " << kJitterLadder.back();
  throw NumericalError(msg.str());
}

Matrix cholesky_derivative(const Matrix& lower, const Matrix& d_a) {
  const Index m = lower.rows();
  if (lower.cols() != m || d_a.rows() != m || d_a.cols() != m)
    throw std::invalid_argument("cholesky_derivative: size mismatch");
  if (m == 0) return Matrix(0, 0);
  if (!(lower.diagonal().array() > 0.0).all())
    throw NumericalError("cholesky_derivative: factor has a non-positive diagonal entry");

  const auto tri = lower.triangularView<Eigen::Lower>();
  // phi = L^{-1} dA L^{-T}
  Matrix phi = tri.solve(d_a);
  phi = tri.solve(phi.transpose()).transpose();
  phi.triangularView<Eigen::StrictlyUpper>().setZero();
  phi.diagonal() *= 0.5;
  Matrix out = tri * phi;
  return out;
}

}  // namespace qkg::gp
