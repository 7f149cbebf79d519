#include <doctest.h>

#include <Eigen/Cholesky>

#include "qkg/gp/cholesky.hpp"
#include "test_support.hpp"

using namespace qkg;

TEST_CASE("identity and scalar factorizations") {
  const gp::CholeskyFactor id = gp::cholesky_with_jitter(Matrix::Identity(4, 4));
  CHECK(id.jitter == 0.0);
  CHECK((id.lower - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  Matrix four(1, 1);
  four << 4.0;
  CHECK(gp::cholesky_with_jitter(four).lower(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("random SPD factor reconstructs the matrix") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = testing::random_spd(5, rng);
    const gp::CholeskyFactor f = gp::cholesky_with_jitter(a);
    CHECK(f.jitter == 0.0);
    CHECK((f.lower * f.lower.transpose() - a).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(f.lower.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("singular matrices are rescued by the jitter ladder") {
  Matrix a = Matrix::Ones(3, 3);  // rank one
  const gp::CholeskyFactor f = gp::cholesky_with_jitter(a);
  CHECK(f.jitter > 0.0);
  a.diagonal().array() += f.jitter;
  CHECK((f.lower * f.lower.transpose() - a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("indefinite matrices fail with a numerical error") {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(gp::cholesky_with_jitter(a), NumericalError);
}

TEST_CASE("Cholesky derivative: zero, scalar and finite-difference cases") {
  Rng rng(2);
  const Matrix l = gp::cholesky_with_jitter(testing::random_spd(5, rng)).lower;
  CHECK(gp::cholesky_derivative(l, Matrix::Zero(5, 5)).cwiseAbs().maxCoeff() == 0.0);

  Matrix two(1, 1), one(1, 1);
  two << 2.0;
  one << 1.0;
  CHECK(gp::cholesky_derivative(two, one)(0, 0) == doctest::Approx(0.25));

  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const Matrix a = testing::random_spd(5, rng);
    const Matrix da = testing::random_symmetric(5, rng);
    const Matrix dl = gp::cholesky_derivative(gp::cholesky_with_jitter(a).lower, da);
    const Matrix lp = Eigen::LLT<Matrix>(a + h * da).matrixL();
    const Matrix lm = Eigen::LLT<Matrix>(a - h * da).matrixL();
    const Matrix fd = (lp - lm) / (2.0 * h);
    CHECK((fd - dl).norm() / fd.norm() < 1e-6);
  }
}
