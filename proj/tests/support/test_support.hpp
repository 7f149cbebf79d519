#pragma once

#include <functional>
#include <random>

#include "qkg/box.hpp"
#include "qkg/gp/kernel.hpp"

namespace qkg::testing {

inline gp::ModelSpec random_spec(Index d, double noise, Rng& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.5);
  gp::ModelSpec spec;
  spec.mean_const = u(rng) - 0.9;
  spec.signal_variance = u(rng);
  spec.length_scales = Vector(d);
  for (Index j = 0; j < d; ++j) spec.length_scales[j] = u(rng);
  spec.noise_variance = noise;
  return spec;
}

inline gp::Dataset random_data(Index n, Index d, Rng& rng, double lo = 0.0, double hi = 1.0) {
  gp::Dataset data;
  data.points = BoxDomain::cube(d, lo, hi).uniform(n, rng);
  std::normal_distribution<double> normal;
  data.values = Vector(n);
  for (Index i = 0; i < n; ++i) data.values[i] = normal(rng);
  return data;
}

inline Matrix random_spd(Index m, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix b(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) b(i, j) = normal(rng);
  return b * b.transpose() + Matrix::Identity(m, m);
}

inline Matrix random_symmetric(Index m, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix e(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) e(i, j) = normal(rng);
  return e + e.transpose();
}

/// Central difference of a scalar function of a vector.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double max_rel_err(const Vector& a, const Vector& b, double floor = 1.0) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(floor, std::abs(b[i])));
  return worst;
}

}  // namespace qkg::testing
