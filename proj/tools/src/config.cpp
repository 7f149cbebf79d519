#include "qkg_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace qkg::cli {

namespace {

std::string where(const YAML::Node& node, const std::string& key) {
  const YAML::Mark mark = node.Mark();
  std::string out = "line " + std::to_string(mark.line + 1);
  return out + ", key '" + key + "'";
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(where(node, key) + ": expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(node, key) + ": invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& key) {
  std::vector<T> out;
  if (node.IsScalar()) {
    out.push_back(scalar<T>(node, key));
  } else if (node.IsSequence()) {
    for (const YAML::Node& item : node) out.push_back(scalar<T>(item, key));
  } else {
    throw ConfigError(where(node, key) + ": expected a value or a list");
  }
  if (out.empty()) throw ConfigError(where(node, key) + ": list is empty");
  return out;
}

void parse_tuning(const YAML::Node& node, bench::Tuning& t) {
  if (!node.IsMap()) throw ConfigError(where(node, "tuning") + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    const std::string full = "tuning." + key;
    if (key == "sga_starts") t.sga_starts = scalar<int>(v, full);
    else if (key == "sga_steps") t.sga_steps = scalar<int>(v, full);
    else if (key == "sga_mc") t.sga_mc = scalar<std::size_t>(v, full);
    else if (key == "selection_mc") t.selection_mc = scalar<std::size_t>(v, full);
    else if (key == "minima_pool") t.minima_pool = scalar<Index>(v, full);
    else if (key == "mle_restarts") t.mle_restarts = scalar<int>(v, full);
    else if (key == "mle_iterations") t.mle_iterations = scalar<int>(v, full);
    else if (key == "ucb_pool") t.ucb_pool = scalar<Index>(v, full);
    else if (key == "polish_steps") t.polish_steps = scalar<int>(v, full);
    else if (key == "restrict_discretization") t.restrict_discretization = scalar<bool>(v, full);
    else throw ConfigError(where(kv.first, full) + ": unknown key");
  }
}

ExperimentConfig parse_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("line 1: the experiment file must be a mapping");
  ExperimentConfig c;
  bool have_q = false;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "objective") {
      c.objective = scalar<std::string>(v, key);
      try {
        bench::make_objective(c.objective);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where(v, key) + ": " + e.what());
      }
    } else if (key == "policies" || key == "policy") {
      c.policies.clear();
      for (const std::string& name : list<std::string>(v, key)) {
        try {
          c.policies.push_back(bench::parse_policy(name));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(where(v, key) + ": " + e.what());
        }
      }
    } else if (key == "seeds") {
      c.seeds = list<std::uint64_t>(v, key);
    } else if (key == "q" || key == "q_values") {
      if (have_q) throw ConfigError(where(kv.first, key) + ": q given twice");
      have_q = true;
      c.q_values = list<Index>(v, key);
    } else if (key == "initial_samples") {
      c.initial_samples = scalar<Index>(v, key);
    } else if (key == "iterations") {
      c.iterations = scalar<int>(v, key);
    } else if (key == "noise_sd") {
      c.noise_sd = scalar<double>(v, key);
    } else if (key == "discretization_samples") {
      c.discretization_samples = scalar<Index>(v, key);
    } else if (key == "async_pending") {
      c.async_pending = scalar<Index>(v, key);
    } else if (key == "output") {
      c.output = scalar<std::string>(v, key);
    } else if (key == "tuning") {
      parse_tuning(v, c.tuning);
    } else {
      throw ConfigError(where(kv.first, key) + ": unknown key");
    }
  }
  try {
    for (const bench::RunConfig& run : c.runs()) run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig out = *this;
  const bench::Objective obj = bench::make_objective(objective);
  if (out.initial_samples == 0) out.initial_samples = 2 * obj.dim() + 2;
  if (out.iterations == 0) {
    const Index q = *std::max_element(q_values.begin(), q_values.end());
    out.iterations = bench::default_iterations(obj, out.initial_samples, std::max<Index>(q, 1));
  }
  return out;
}

std::vector<bench::RunConfig> ExperimentConfig::runs() const {
  const ExperimentConfig r = resolved();
  std::vector<bench::RunConfig> out;
  for (bench::Policy policy : r.policies) {
    for (Index q : r.q_values) {
      for (std::uint64_t seed : r.seeds) {
        bench::RunConfig run;
        run.objective = r.objective;
        run.policy = policy;
        run.q = q;
        run.initial_samples = r.initial_samples;
        run.iterations = r.iterations;
        run.noise_sd = r.noise_sd;
        run.discretization_samples = r.discretization_samples;
        run.seed = seed;
        run.async_pending = r.async_pending;
        run.tuning = r.tuning;
        out.push_back(run);
      }
    }
  }
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto tuning_eq = [](const bench::Tuning& x, const bench::Tuning& y) {
    return x.sga_starts == y.sga_starts && x.sga_steps == y.sga_steps && x.sga_mc == y.sga_mc &&
           x.selection_mc == y.selection_mc && x.minima_pool == y.minima_pool && x.mle_restarts == y.mle_restarts &&
           x.mle_iterations == y.mle_iterations && x.ucb_pool == y.ucb_pool && x.polish_steps == y.polish_steps &&
           x.restrict_discretization == y.restrict_discretization;
  };
  return a.objective == b.objective && a.policies == b.policies && a.seeds == b.seeds && a.q_values == b.q_values &&
         a.initial_samples == b.initial_samples && a.iterations == b.iterations && a.noise_sd == b.noise_sd &&
         a.discretization_samples == b.discretization_samples && a.async_pending == b.async_pending &&
         a.output == b.output && tuning_eq(a.tuning, b.tuning);
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_node(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string echo_config(const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "objective" << YAML::Value << c.objective;
  out << YAML::Key << "policies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (bench::Policy p : c.policies) out << bench::policy_name(p);
  out << YAML::EndSeq;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  out << YAML::Key << "q_values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Index q : c.q_values) out << static_cast<long long>(q);
  out << YAML::EndSeq;
  out << YAML::Key << "initial_samples" << YAML::Value << static_cast<long long>(c.initial_samples);
  out << YAML::Key << "iterations" << YAML::Value << c.iterations;
  out << YAML::Key << "noise_sd" << YAML::Value << c.noise_sd;
  out << YAML::Key << "discretization_samples" << YAML::Value << static_cast<long long>(c.discretization_samples);
  out << YAML::Key << "async_pending" << YAML::Value << static_cast<long long>(c.async_pending);
  out << YAML::Key << "output" << YAML::Value << c.output;
  const bench::Tuning& t = c.tuning;
  out << YAML::Key << "tuning" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sga_starts" << YAML::Value << t.sga_starts;
  out << YAML::Key << "sga_steps" << YAML::Value << t.sga_steps;
  out << YAML::Key << "sga_mc" << YAML::Value << static_cast<unsigned long long>(t.sga_mc);
  out << YAML::Key << "selection_mc" << YAML::Value << static_cast<unsigned long long>(t.selection_mc);
  out << YAML::Key << "minima_pool" << YAML::Value << static_cast<long long>(t.minima_pool);
  out << YAML::Key << "mle_restarts" << YAML::Value << t.mle_restarts;
  out << YAML::Key << "mle_iterations" << YAML::Value << t.mle_iterations;
  out << YAML::Key << "ucb_pool" << YAML::Value << static_cast<long long>(t.ucb_pool);
  out << YAML::Key << "polish_steps" << YAML::Value << t.polish_steps;
  out << YAML::Key << "restrict_discretization" << YAML::Value << t.restrict_discretization;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("seed range must look like a..b");
  std::size_t used_a = 0, used_b = 0;
  unsigned long long a = 0, b = 0;
  try {
    a = std::stoull(text.substr(0, dots), &used_a);
    b = std::stoull(text.substr(dots + 2), &used_b);
  } catch (const std::exception&) {
    throw std::invalid_argument("seed range must look like a..b");
  }
  if (used_a != dots || used_b != text.size() - dots - 2 || a > b)
    throw std::invalid_argument("seed range must look like a..b with a <= b");
  std::vector<std::uint64_t> out;
  for (unsigned long long s = a; s <= b; ++s) out.push_back(s);
  return out;
}

std::vector<Index> parse_q_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("invalid q list '" + text + "'");
    }
    if (used != item.size() || v < 1) throw std::invalid_argument("invalid q list '" + text + "'");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty q list");
  return out;
}

}  // namespace qkg::cli
