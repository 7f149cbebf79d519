#include "qkg_cli/runner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace qkg::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string trace_file_name(const bench::RunConfig& config) {
  return "trace_" + bench::policy_name(config.policy) + "_q" + std::to_string(config.q) + "_seed" +
         std::to_string(config.seed) + ".csv";
}

std::string trace_csv(const bench::RunTrace& trace) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  const bench::RunConfig& c = trace.config;
  for (const bench::IterationRecord& r : trace.records) {
    out << r.iteration << ',' << r.evaluations << ',' << bench::policy_name(c.policy) << ',' << c.seed << ',' << c.q
        << ',' << num(c.noise_sd) << ',' << num(r.recommended_value) << ',' << num(r.regret) << ','
        << num(r.log10_regret) << ',' << fmt("%.3f", r.wall_ms) << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<RunOutcome>& outcomes) {
  struct Group {
    std::map<Index, std::vector<double>> by_evals;
    int failed = 0;
  };
  std::vector<std::pair<std::string, Index>> order;
  std::map<std::pair<std::string, Index>, Group> groups;
  for (const RunOutcome& o : outcomes) {
    const auto key = std::make_pair(bench::policy_name(o.config.policy), o.config.q);
    if (groups.find(key) == groups.end()) order.push_back(key);
    Group& g = groups[key];
    if (!o.ok) ++g.failed;
    for (const bench::IterationRecord& r : o.trace.records) g.by_evals[r.evaluations].push_back(r.log10_regret);
  }
  std::ostringstream out;
  out << "policy,q,evaluations,runs,median_log10_regret,q25_log10_regret,q75_log10_regret,failed_runs\n";
  for (const auto& key : order) {
    const Group& g = groups[key];
    for (const auto& [evals, values] : g.by_evals) {
      out << key.first << ',' << key.second << ',' << evals << ',' << values.size() << ','
          << num(bench::median(values)) << ',' << num(bench::quantile(values, 0.25)) << ','
          << num(bench::quantile(values, 0.75)) << ',' << g.failed << '\n';
    }
  }
  return out.str();
}

std::string speedup_csv(const std::vector<bench::SpeedupRow>& rows) {
  std::ostringstream out;
  out << "q,iteration,evaluations,runs,median_regret,median_log10_regret\n";
  for (const bench::SpeedupRow& r : rows) {
    out << r.q << ',' << r.iteration << ',' << r.evaluations << ',' << r.runs << ',' << num(r.median_regret) << ','
        << num(r.median_log10_regret) << '\n';
  }
  return out.str();
}

std::vector<RunOutcome> execute_runs(const std::vector<bench::RunConfig>& runs, int workers, bool quiet) {
  std::vector<RunOutcome> outcomes(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      RunOutcome& o = outcomes[i];
      o.config = runs[i];
      try {
        o.trace = bench::run_bo_loop(runs[i]);
        o.ok = true;
      } catch (const bench::RunError& e) {
        o.trace = e.partial();
        o.error = e.what();
      } catch (const std::exception& e) {
        o.trace.config = runs[i];
        o.error = e.what();
      }
      if (!quiet) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << trace_file_name(runs[i]) << ": ";
        if (o.ok) {
          std::cerr << "final log10 regret " << o.trace.final_record().log10_regret << '\n';
        } else {
          std::cerr << "FAILED: " << o.error << '\n';
        }
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return outcomes;
}

bool prepare_output_dir(const fs::path& dir, bool force, std::string& error) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      error = "output path '" + dir.string() + "' exists and is not a directory";
      return false;
    }
    if (!fs::is_empty(dir, ec) && !force) {
      error = "output directory '" + dir.string() + "' already exists; use --force to overwrite";
      return false;
    }
  }
  fs::create_directories(dir, ec);
  if (ec) {
    error = "cannot create '" + dir.string() + "': " + ec.message();
    return false;
  }
  return true;
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("QKG_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(1, requested);
}

int cmd_run(const ExperimentConfig& config, const RunOptions& options) {
  std::string error;
  if (!prepare_output_dir(options.out_dir, options.force, error)) {
    std::cerr << "error: " << error << '\n';
    return kExitUsage;
  }
  try {
    write_atomic(options.out_dir / "effective_config.yaml", echo_config(config));
    const std::vector<RunOutcome> outcomes = execute_runs(config.runs(), options.workers, options.quiet);
    bool all_ok = true;
    for (const RunOutcome& o : outcomes) {
      all_ok = all_ok && o.ok;
      if (!o.trace.records.empty()) write_atomic(options.out_dir / trace_file_name(o.config), trace_csv(o.trace));
    }
    write_atomic(options.out_dir / "summary.csv", summary_csv(outcomes));
    return all_ok ? kExitOk : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_speedup(const ExperimentConfig& config, const std::vector<Index>& q_list, const RunOptions& options) {
  std::string error;
  if (!prepare_output_dir(options.out_dir, options.force, error)) {
    std::cerr << "error: " << error << '\n';
    return kExitUsage;
  }
  try {
    ExperimentConfig effective = config;
    effective.q_values = q_list;
    effective.policies = {bench::Policy::qkg};
    effective = effective.resolved();
    write_atomic(options.out_dir / "effective_config.yaml", echo_config(effective));
    const std::vector<bench::RunConfig> runs = effective.runs();
    const std::vector<RunOutcome> outcomes = execute_runs(runs, options.workers, options.quiet);
    std::vector<bench::RunTrace> traces;
    bool all_ok = true;
    for (const RunOutcome& o : outcomes) {
      if (!o.trace.records.empty()) write_atomic(options.out_dir / trace_file_name(o.config), trace_csv(o.trace));
      if (o.ok) traces.push_back(o.trace);
      all_ok = all_ok && o.ok;
    }
    if (!all_ok) {
      std::cerr << "error: some runs failed; speedup table not written\n";
      return kExitRuntime;
    }
    write_atomic(options.out_dir / "speedup.csv", speedup_csv(bench::tabulate_speedup(traces)));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace qkg::cli
