#include <CLI11.hpp>

#include <iostream>

#include "qkg_cli/config.hpp"
#include "qkg_cli/runner.hpp"
#include "qkg_cli/selftest.hpp"

using namespace qkg::cli;

namespace {

int load(const std::string& path, ExperimentConfig& config) {
  try {
    config = load_config(path);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch Bayesian optimization with the parallel knowledge gradient"};
  app.require_subcommand(1);

  std::string config_path, seed_range, out_dir, q_list;
  bool force = false, quiet = false;
  int workers = 1;

  CLI::App* run = app.add_subcommand("run", "Run every (policy, q, seed) combination of an experiment file");
  run->add_option("config", config_path, "Experiment file (YAML)")->required();
  run->add_option("--seed-range", seed_range, "Inclusive seed range a..b, replaces the file's seeds");
  run->add_option("--out", out_dir, "Output directory (default: the file's output key)");
  run->add_flag("--force", force, "Overwrite a non-empty output directory");
  run->add_option("--workers", workers, "Parallel runs (QKG_WORKERS overrides)")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "No per-run progress on stderr");

  CLI::App* selftest = app.add_subcommand("selftest", "Run the fast invariant checks");

  CLI::App* speedup = app.add_subcommand("speedup", "q-KG regret per iteration across batch sizes");
  speedup->add_option("config", config_path, "Experiment file (YAML)")->required();
  speedup->add_option("--q", q_list, "Comma-separated batch sizes, e.g. 1,2,4")->required();
  speedup->add_option("--seed-range", seed_range, "Inclusive seed range a..b");
  speedup->add_option("--out", out_dir, "Output directory");
  speedup->add_flag("--force", force, "Overwrite a non-empty output directory");
  speedup->add_option("--workers", workers, "Parallel runs (QKG_WORKERS overrides)")->check(CLI::PositiveNumber);
  speedup->add_flag("--quiet", quiet, "No per-run progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (selftest->parsed()) return cmd_selftest(std::cout);

  ExperimentConfig config;
  if (const int rc = load(config_path, config); rc != kExitOk) return rc;
  std::vector<qkg::Index> qs;
  try {
    if (!seed_range.empty()) config.seeds = parse_seed_range(seed_range);
    if (speedup->parsed()) qs = parse_q_list(q_list);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  RunOptions options;
  options.out_dir = out_dir.empty() ? config.output : out_dir;
  options.force = force;
  options.workers = resolve_workers(workers);
  options.quiet = quiet;
  config.output = options.out_dir.string();
  return run->parsed() ? cmd_run(config, options) : cmd_speedup(config, qs, options);
}
