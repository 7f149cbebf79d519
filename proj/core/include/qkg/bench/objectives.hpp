#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qkg/box.hpp"

namespace qkg::bench {

/// Synthetic test function with a known global minimum on its box.
struct Objective {
  std::string name;
  BoxDomain box;
  double true_min = 0.0;
  std::function<double(const Eigen::Ref<const Vector>&)> eval;

  Index dim() const { return box.dim(); }
};

/// Names accepted by make_objective: branin2, rosenbrock3, ackley5, hartmann6.
const std::vector<std::string>& objective_names();

/// Throws std::invalid_argument for an unknown name.
Objective make_objective(const std::string& name);

/// Noise-free value; throws std::invalid_argument when x is outside the box.
double eval_objective(const std::string& name, const Eigen::Ref<const Vector>& x);
double eval_objective(const Objective& objective, const Eigen::Ref<const Vector>& x);

/// eval + noise_sd * N(0, 1). With noise_sd == 0 no draw is taken.
double observe(const Objective& objective, const Eigen::Ref<const Vector>& x, double noise_sd, Rng& rng);

/// Default number of BO iterations so that I + N q is about 60 evaluations for
/// d <= 3 and about 100 for larger d.
int default_iterations(const Objective& objective, Index initial_samples, Index q);

namespace functions {
double branin(const Eigen::Ref<const Vector>& x);
double rosenbrock(const Eigen::Ref<const Vector>& x);
double ackley(const Eigen::Ref<const Vector>& x);
double hartmann6(const Eigen::Ref<const Vector>& x);
}  // namespace functions

}  // namespace qkg::bench
