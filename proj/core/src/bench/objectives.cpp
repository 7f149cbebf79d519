#include "qkg/bench/objectives.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qkg::bench {

namespace functions {

double branin(const Eigen::Ref<const Vector>& x) {
  constexpr double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double rosenbrock(const Eigen::Ref<const Vector>& x) {
  double sum = 0.0;
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double ackley(const Eigen::Ref<const Vector>& x) {
  const double n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2.0 * std::numbers::pi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

double hartmann6(const Eigen::Ref<const Vector>& x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double dx = x[j] - p[i][j];
      inner += a[i][j] * dx * dx;
    }
    sum += alpha[i] * std::exp(-inner);
  }
  return -sum;
}

}  // namespace functions

const std::vector<std::string>& objective_names() {
  static const std::vector<std::string> names = {"branin2", "rosenbrock3", "ackley5", "hartmann6"};
  return names;
}

Objective make_objective(const std::string& name) {
  Objective obj;
  obj.name = name;
  if (name == "branin2") {
    obj.box = BoxDomain::cube(2, -15.0, 15.0);
    obj.true_min = 0.397887357729739;
    obj.eval = functions::branin;
  } else if (name == "rosenbrock3") {
    obj.box = BoxDomain::cube(3, -2.0, 2.0);
    obj.true_min = 0.0;
    obj.eval = functions::rosenbrock;
  } else if (name == "ackley5") {
    obj.box = BoxDomain::cube(5, -2.0, 2.0);
    obj.true_min = 0.0;
    obj.eval = functions::ackley;
  } else if (name == "hartmann6") {
    obj.box = BoxDomain::cube(6, 0.0, 1.0);
    obj.true_min = -3.32236801141551;
    obj.eval = functions::hartmann6;
  } else {
    throw std::invalid_argument("unknown objective '" + name + "'");
  }
  return obj;
}

double eval_objective(const Objective& objective, const Eigen::Ref<const Vector>& x) {
  if (x.size() != objective.dim()) throw std::invalid_argument(objective.name + ": dimension mismatch");
  if (!objective.box.contains(x)) throw std::invalid_argument(objective.name + ": point outside the domain");
  return objective.eval(x);
}

double eval_objective(const std::string& name, const Eigen::Ref<const Vector>& x) {
  return eval_objective(make_objective(name), x);
}

double observe(const Objective& objective, const Eigen::Ref<const Vector>& x, double noise_sd, Rng& rng) {
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("observe: noise_sd must be nonnegative");
  const double value = eval_objective(objective, x);
  if (noise_sd == 0.0) return value;
  std::normal_distribution<double> normal;
  return value + noise_sd * normal(rng);
}

int default_iterations(const Objective& objective, Index initial_samples, Index q) {
  const Index budget = objective.dim() <= 3 ? 60 : 100;
  const Index remaining = std::max<Index>(budget - initial_samples, q);
  return static_cast<int>(std::max<Index>(1, (remaining + q / 2) / q));
}

}  // namespace qkg::bench
