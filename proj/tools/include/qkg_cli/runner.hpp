#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qkg/bench/speedup.hpp"
#include "qkg_cli/config.hpp"

namespace qkg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Exact trace CSV header.
inline constexpr const char* kTraceHeader =
    "iteration,evaluations,policy,seed,q,noise_sd,recommended_value,regret,log10_regret,wall_ms";

struct RunOptions {
  std::filesystem::path out_dir;
  bool force = false;
  int workers = 1;
  bool quiet = false;
};

struct RunOutcome {
  bench::RunConfig config;
  bench::RunTrace trace;  ///< partial when !ok
  bool ok = false;
  std::string error;
};

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string trace_file_name(const bench::RunConfig& config);
std::string trace_csv(const bench::RunTrace& trace);
/// Median and quartiles of log10 regret per (policy, q, evaluations).
std::string summary_csv(const std::vector<RunOutcome>& outcomes);
std::string speedup_csv(const std::vector<bench::SpeedupRow>& rows);

/// Executes runs on `workers` threads; results keep the input order.
std::vector<RunOutcome> execute_runs(const std::vector<bench::RunConfig>& runs, int workers, bool quiet);

/// Refuses (returns false) when `dir` exists and is not empty and force is off.
bool prepare_output_dir(const std::filesystem::path& dir, bool force, std::string& error);

/// `run`: all (policy, q, seed) combinations; trace CSVs, summary.csv and effective_config.yaml.
int cmd_run(const ExperimentConfig& config, const RunOptions& options);

/// `speedup`: q-KG across batch sizes; speedup.csv, traces and effective_config.yaml.
int cmd_speedup(const ExperimentConfig& config, const std::vector<Index>& q_list, const RunOptions& options);

/// QKG_WORKERS when set and valid, otherwise `requested`.
int resolve_workers(int requested);

}  // namespace qkg::cli
