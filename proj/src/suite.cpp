#include "coex/suite.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>

#include <omp.h>

#include "coex/error.hpp"
#include "coex/rng.hpp"

namespace coex {

std::uint64_t run_seed(std::uint64_t base_seed, const RunKey& key) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(key.scheme) + 1);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.priority));
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.n_pairs));
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.trial));
  return base_seed ^ h;
}

RunSummary summarize(const TrainLog& log, int last_episodes) {
  RunSummary s;
  const std::size_t n = log.episodes.size();
  const std::size_t k = std::min(n, static_cast<std::size_t>(std::max(last_episodes, 1)));
  if (k == 0) return s;
  double u_nr = 0.0, u_wf = 0.0;
  for (std::size_t i = n - k; i < n; ++i) {
    const auto& e = log.episodes[i];
    s.gamma_nr += e.gamma_nr;
    s.gamma_wf += e.gamma_wf;
    s.jain += e.jain;
    u_nr += e.u_nr;
    u_wf += e.u_wf;
  }
  const double inv = 1.0 / static_cast<double>(k);
  s.gamma_nr *= inv;
  s.gamma_wf *= inv;
  s.agg_throughput = s.gamma_nr + s.gamma_wf;
  s.jain *= inv;
  u_nr *= inv;
  u_wf *= inv;
  s.mean_utility = 0.5 * (u_nr + u_wf);
  s.utility_fairness = utility_fairness(u_nr, u_wf);
  return s;
}

RunResult execute_run(const ExperimentConfig& cfg, const RunKey& key) {
  RunResult r;
  r.key = key;
  r.seed = run_seed(cfg.base_seed, key);
  try {
    const SimConfig sim = sim_config(cfg, key.n_pairs, key.priority);
    const TxopControl ctrl = txop_control(cfg, key.priority);
    const RewardPolicy policy = policy_for(cfg, key.scheme);
    const UtilityModel umodel = utility_model(cfg, key.priority);
    EnvFactory make_env = [&](std::uint64_t seed) {
      return std::make_unique<CoexEnvironment>(sim, ctrl, policy, umodel, seed);
    };
    TrainResult t = train(make_env, agent_kind(key.scheme), cfg.agent, reward_range(policy), r.seed);
    r.log = std::move(t.log);
    r.summary = summarize(r.log, cfg.report.last_episodes);
    try {
      r.stabilization_episode = detect_stabilization(r.log.rewards(), cfg.stabilization);
    } catch (const InsufficientData&) {
      r.stabilization_episode.reset();
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<RunKey> expand_grid(const ExperimentConfig& cfg) {
  std::vector<RunKey> keys;
  for (Scheme s : cfg.sweep.schemes)
    for (int p : cfg.sweep.priorities)
      for (int n : cfg.sweep.n_pairs)
        for (int t = 0; t < cfg.trials; ++t) keys.push_back({s, p, n, t});
  return keys;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// chain[0] > chain[1] > ... on metric, every pair by kOrderingMargin.
OrderingCheck check_chain(const std::map<CellKey, CellSummary>& cells,
                          const std::vector<Scheme>& chain, int priority, int n_pairs,
                          double RunSummary::*metric) {
  OrderingCheck c;
  for (std::size_t i = 0; i < chain.size(); ++i)
    c.name += (i ? ">" : "") + std::string(to_string(chain[i]));
  c.priority = priority;
  c.n_pairs = n_pairs;
  c.pass = true;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      const double hi = cells.at({chain[i], priority, n_pairs}).mean.*metric;
      const double lo = cells.at({chain[j], priority, n_pairs}).mean.*metric;
      const double margin = lo != 0.0 ? (hi - lo) / std::abs(lo) : (hi > 0 ? 1.0 : 0.0);
      const bool ok = margin >= kOrderingMargin;
      c.pass = c.pass && ok;
      c.details.push_back(std::string(to_string(chain[i])) + "=" + fmt(hi) + " vs " +
                          std::string(to_string(chain[j])) + "=" + fmt(lo) + " margin " +
                          fmt(100.0 * margin) + "% " + (ok ? "ok" : "VIOLATED"));
    }
  }
  return c;
}

std::string placement(const std::map<CellKey, CellSummary>& cells, int priority, int n_pairs,
                      double RunSummary::*metric, const char* label) {
  std::vector<std::pair<double, Scheme>> v;
  for (Scheme s : {Scheme::LBT, Scheme::Q1, Scheme::Q2, Scheme::Q2u, Scheme::MAB})
    v.emplace_back(cells.at({s, priority, n_pairs}).mean.*metric, s);
  std::stable_sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::string out = std::string(label) + " p" + std::to_string(priority) + " N" +
                    std::to_string(n_pairs) + ": ";
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? " > " : "") + std::string(to_string(v[i].second));
  return out;
}

}  // namespace

ReportBundle aggregate(const ExperimentConfig& cfg, std::vector<RunResult> runs) {
  ReportBundle b;
  b.config = cfg;
  b.runs = std::move(runs);

  for (const RunResult& r : b.runs) {
    CellSummary& c = b.cells[{r.key.scheme, r.key.priority, r.key.n_pairs}];
    if (!r.ok()) {
      ++c.trials_failed;
      continue;
    }
    ++c.trials_ok;
    c.mean.agg_throughput += r.summary.agg_throughput;
    c.mean.gamma_nr += r.summary.gamma_nr;
    c.mean.gamma_wf += r.summary.gamma_wf;
    c.mean.jain += r.summary.jain;
    c.mean.mean_utility += r.summary.mean_utility;
    c.mean.utility_fairness += r.summary.utility_fairness;
  }
  for (auto& [key, c] : b.cells) {
    if (c.trials_ok == 0) continue;
    const double inv = 1.0 / c.trials_ok;
    c.mean.agg_throughput *= inv;
    c.mean.gamma_nr *= inv;
    c.mean.gamma_wf *= inv;
    c.mean.jain *= inv;
    c.mean.mean_utility *= inv;
    c.mean.utility_fairness *= inv;
  }

  auto usable = [&](Scheme s, int p, int n) {
    auto it = b.cells.find({s, p, n});
    return it != b.cells.end() && it->second.trials_ok > 0;
  };
  for (int p : cfg.sweep.priorities) {
    for (int n : cfg.sweep.n_pairs) {
      bool all = true;
      for (Scheme s : {Scheme::LBT, Scheme::Q1, Scheme::Q2, Scheme::Q2u}) all = all && usable(s, p, n);
      if (!all) continue;
      b.throughput_checks.push_back(check_chain(
          b.cells, {Scheme::LBT, Scheme::Q2u, Scheme::Q2, Scheme::Q1}, p, n, &RunSummary::agg_throughput));
      b.fairness_checks.push_back(check_chain(
          b.cells, {Scheme::Q1, Scheme::Q2, Scheme::Q2u, Scheme::LBT}, p, n, &RunSummary::jain));
      if (usable(Scheme::MAB, p, n)) {
        b.mab_placement.push_back(placement(b.cells, p, n, &RunSummary::agg_throughput, "throughput"));
        b.mab_placement.push_back(placement(b.cells, p, n, &RunSummary::jain, "fairness"));
      }
    }
  }
  return b;
}

bool ReportBundle::throughput_ordering_pass() const {
  return !throughput_checks.empty() &&
         std::all_of(throughput_checks.begin(), throughput_checks.end(), [](auto& c) { return c.pass; });
}

bool ReportBundle::fairness_ordering_pass() const {
  return !fairness_checks.empty() &&
         std::all_of(fairness_checks.begin(), fairness_checks.end(), [](auto& c) { return c.pass; });
}

bool ReportBundle::any_failed_run() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return !r.ok(); });
}

namespace serial {
ReportBundle run_suite(const ExperimentConfig& cfg) {
  std::vector<RunResult> runs;
  for (const RunKey& k : expand_grid(cfg)) runs.push_back(execute_run(cfg, k));
  return aggregate(cfg, std::move(runs));
}
}  // namespace serial

namespace omp {
ReportBundle run_suite(const ExperimentConfig& cfg, int threads) {
  const std::vector<RunKey> keys = expand_grid(cfg);
  std::vector<RunResult> runs(keys.size());
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const long n = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long i = 0; i < n; ++i) runs[i] = execute_run(cfg, keys[i]);
  return aggregate(cfg, std::move(runs));
}
}  // namespace omp

}  // namespace coex
