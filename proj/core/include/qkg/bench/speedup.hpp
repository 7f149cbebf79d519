#pragma once

#include <vector>

#include "qkg/bench/bo_loop.hpp"

namespace qkg::bench {

/// Linear-interpolation quantile (p in [0, 1]) of a nonempty sample.
double quantile(std::vector<double> values, double p);
inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

struct SpeedupRow {
  Index q = 0;
  int iteration = 0;          ///< 0 is the initial design
  Index evaluations = 0;
  double median_regret = 0.0;
  double median_log10_regret = 0.0;
  std::size_t runs = 0;
};

/// One run configuration per (q, seed), all sharing base's iteration count.
std::vector<RunConfig> speedup_configs(const RunConfig& base, const std::vector<Index>& q_list,
                                       const std::vector<std::uint64_t>& seeds);

/// Median regret per (q, iteration), q in first-seen order: |q values| x (N + 1) rows.
std::vector<SpeedupRow> tabulate_speedup(const std::vector<RunTrace>& traces);

/// Runs every configuration serially and tabulates the result.
std::vector<SpeedupRow> speedup_experiment(const RunConfig& base, const std::vector<Index>& q_list,
                                           const std::vector<std::uint64_t>& seeds);

}  // namespace qkg::bench
