#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkg/bench/bo_loop.hpp"

namespace qkg::cli {

/// Malformed experiment file; the message names the line and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment file: a base run configuration plus sweep lists.
struct ExperimentConfig {
  std::string objective = "branin2";
  std::vector<bench::Policy> policies = {bench::Policy::qkg};
  std::vector<std::uint64_t> seeds = {0};
  std::vector<Index> q_values = {4};
  Index initial_samples = 0;
  int iterations = 0;
  double noise_sd = 0.0;
  Index discretization_samples = 1000;
  Index async_pending = 0;
  std::string output = "qkg_results";
  bench::Tuning tuning;

  /// Fills I = 2d + 2 and the per-objective iteration count (uses the largest q).
  ExperimentConfig resolved() const;

  /// Every (policy, q, seed) combination, in that nesting order.
  std::vector<bench::RunConfig> runs() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Effective configuration as YAML with every field explicit.
std::string echo_config(const ExperimentConfig& config);

/// "a..b" (inclusive) -> {a, ..., b}. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// "1,2,4" -> {1, 2, 4}. Throws std::invalid_argument.
std::vector<Index> parse_q_list(const std::string& text);

}  // namespace qkg::cli
