#include "qkg/bench/speedup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qkg::bench {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<RunConfig> speedup_configs(const RunConfig& base, const std::vector<Index>& q_list,
                                       const std::vector<std::uint64_t>& seeds) {
  if (q_list.empty()) throw std::invalid_argument("speedup: q list is empty");
  if (seeds.empty()) throw std::invalid_argument("speedup: seed list is empty");
  const RunConfig resolved = base.resolved();
  std::vector<RunConfig> out;
  for (Index q : q_list) {
    for (std::uint64_t seed : seeds) {
      RunConfig c = resolved;
      c.q = q;
      c.seed = seed;
      c.policy = Policy::qkg;
      c.async_pending = 0;
      c.validate();
      out.push_back(c);
    }
  }
  return out;
}

std::vector<SpeedupRow> tabulate_speedup(const std::vector<RunTrace>& traces) {
  std::vector<Index> order;
  std::map<Index, std::vector<const RunTrace*>> by_q;
  for (const RunTrace& t : traces) {
    if (by_q.find(t.config.q) == by_q.end()) order.push_back(t.config.q);
    by_q[t.config.q].push_back(&t);
  }
  std::vector<SpeedupRow> rows;
  for (Index q : order) {
    const auto& group = by_q[q];
    const std::size_t length = group.front()->records.size();
    for (const RunTrace* t : group) {
      if (t->records.size() != length) throw std::invalid_argument("speedup: traces have different lengths");
    }
    for (std::size_t k = 0; k < length; ++k) {
      std::vector<double> regret, log_regret;
      for (const RunTrace* t : group) {
        regret.push_back(t->records[k].regret);
        log_regret.push_back(t->records[k].log10_regret);
      }
      SpeedupRow row;
      row.q = q;
      row.iteration = static_cast<int>(k);
      row.evaluations = group.front()->records[k].evaluations;
      row.median_regret = median(regret);
      row.median_log10_regret = median(log_regret);
      row.runs = group.size();
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SpeedupRow> speedup_experiment(const RunConfig& base, const std::vector<Index>& q_list,
                                           const std::vector<std::uint64_t>& seeds) {
  std::vector<RunTrace> traces;
  for (const RunConfig& c : speedup_configs(base, q_list, seeds)) traces.push_back(run_bo_loop(c));
  return tabulate_speedup(traces);
}

}  // namespace qkg::bench
