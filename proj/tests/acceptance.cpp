// Acceptance checks. Each criterion prints one line:
//   PASS criterion N: <detail>   or   FAIL criterion N: <detail>
// Long training runs are cached under --cache so each criterion can be run
// as its own process.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coex/access_model.hpp"
#include "coex/agents.hpp"
#include "coex/config.hpp"
#include "coex/environment.hpp"
#include "coex/error.hpp"
#include "coex/qnetwork.hpp"
#include "coex/replay_buffer.hpp"
#include "coex/report.hpp"
#include "coex/rng.hpp"
#include "coex/simulator.hpp"
#include "coex/stabilization.hpp"
#include "coex/suite.hpp"
#include "coex/training.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace coex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

constexpr int kPriority = 3;
constexpr int kSeeds = 3;

// ---------------------------------------------------------------------------
// Cached training runs

struct CachedRun {
  RunKey key;
  TrainLog log;
  double elapsed_s = 0.0;
};

class RunCache {
 public:
  RunCache(ExperimentConfig cfg, fs::path dir) : cfg_(std::move(cfg)), dir_(std::move(dir)) {
    fs::create_directories(dir_);
    const std::string resolved = to_json(cfg_).dump(2);
    const fs::path stamp = dir_ / "config.json";
    std::ifstream in(stamp);
    std::stringstream old;
    old << in.rdbuf();
    if (old.str() != resolved) {
      for (const auto& e : fs::directory_iterator(dir_)) fs::remove_all(e.path());
      std::ofstream(stamp) << resolved;
    }
  }

  CachedRun get(const RunKey& key) {
    const fs::path csv = dir_ / (run_label(key) + ".csv");
    const fs::path time = dir_ / (run_label(key) + ".seconds");
    if (fs::exists(csv) && fs::exists(time)) return {key, read_log(csv), read_seconds(time)};

    std::cerr << "training " << run_label(key) << " ..." << std::endl;
    const auto t0 = Clock::now();
    RunResult r = execute_run(cfg_, key);
    const double elapsed = seconds_since(t0);
    if (!r.ok()) throw std::runtime_error(run_label(key) + ": " + r.error);
    std::cerr << "  done in " << fmt("%.0f", elapsed) << " s" << std::endl;

    const fs::path tmp = dir_ / (run_label(key) + ".tmp");
    {
      std::ofstream out(tmp);
      write_training_log_csv(out, r.log);
    }
    std::ofstream(time) << elapsed << "\n";
    fs::rename(tmp, csv);
    return {key, read_log(csv), elapsed};
  }

  const ExperimentConfig& config() const { return cfg_; }

 private:
  static TrainLog read_log(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    TrainLog log;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      EpisodeRecord e;
      row >> e.episode >> e.mean_reward >> e.t_nr_us >> e.gamma_nr >> e.gamma_wf >> e.jain >>
          e.u_nr >> e.u_wf;
      if (!row) throw ParseError("bad cached log row in " + p.string());
      log.episodes.push_back(e);
    }
    return log;
  }

  static double read_seconds(const fs::path& p) {
    double s = 0.0;
    std::ifstream(p) >> s;
    return s;
  }

  ExperimentConfig cfg_;
  fs::path dir_;
};

std::vector<RunKey> cached_keys() {
  std::vector<RunKey> keys;
  for (int t = 0; t < kSeeds; ++t) keys.push_back({Scheme::Q1, kPriority, 2, t});
  for (Scheme s : {Scheme::Q1, Scheme::Q2, Scheme::Q2u, Scheme::LBT, Scheme::MAB})
    for (int t = 0; t < kSeeds; ++t) keys.push_back({s, kPriority, 5, t});
  return keys;
}

ReportBundle bundle_at_n5(RunCache& cache) {
  ExperimentConfig cfg = cache.config();
  cfg.sweep.n_pairs = {5};
  cfg.sweep.priorities = {kPriority};
  cfg.sweep.schemes = {Scheme::LBT, Scheme::Q1, Scheme::Q2, Scheme::Q2u, Scheme::MAB};
  cfg.trials = kSeeds;
  std::vector<RunResult> runs;
  for (const RunKey& key : expand_grid(cfg)) {
    const CachedRun c = cache.get(key);
    RunResult r;
    r.key = key;
    r.seed = run_seed(cfg.base_seed, key);
    r.log = c.log;
    r.summary = summarize(c.log, cfg.report.last_episodes);
    runs.push_back(std::move(r));
  }
  return aggregate(cfg, std::move(runs));
}

const RunSummary& cell(const ReportBundle& b, Scheme s) {
  return b.cells.at(CellKey{s, kPriority, 5}).mean;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome chain_solver_oracle() {
  Rng rng(20240501);
  int configs = 0, checks = 0;
  double worst = 0.0, worst_p0 = 0.0, solver_s = 0.0;
  const std::clock_t cpu0 = std::clock();
  while (configs < 50) {
    AccessConfig c;
    c.initial_window = 1 + static_cast<int>(uniform_below(rng, 64));
    c.max_stage = static_cast<int>(uniform_below(rng, 8));
    c.window_cap = c.initial_window << uniform_below(rng, static_cast<std::uint64_t>(c.max_stage) + 1);
    if (c.state_count() > 10000) continue;
    ++configs;
    for (int k = 0; k <= 9; ++k) {
      const double p = 0.1 * k;
      const auto ts = Clock::now();
      const double tau = solve_chain(c, p).tau;
      solver_s += seconds_since(ts);
      const double ref = oracle::power_iteration_tau(c, p);
      worst = std::max(worst, std::abs(tau - ref));
      if (k == 0) worst_p0 = std::max(worst_p0, std::abs(tau - 2.0 / (c.initial_window + 1)));
      ++checks;
    }
  }
  const double total_s = static_cast<double>(std::clock() - cpu0) / CLOCKS_PER_SEC;
  const bool pass = worst <= 1e-8 && worst_p0 <= 1e-12 && total_s < 10.0;
  return {pass, std::to_string(configs) + " configs x 10 p; max |tau - power iteration| = " +
                    fmt("%.2e", worst) + ", max p=0 error = " + fmt("%.2e", worst_p0) +
                    ", solver " + fmt("%.3f", solver_s) + " s, total with oracle " +
                    fmt("%.2f", total_s) + " s CPU"};
}

Outcome simulator_cross_validation(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string detail;
  for (int n : {1, 2, 4}) {
    SimConfig s = sim_config(cfg, n, kPriority);
    s.window_slots = 200000;
    s.rng_seed = run_seed(cfg.base_seed, {Scheme::LBT, kPriority, n, 0});
    const auto op = solve_coexistence_fixed_point(n, n, s.wifi, s.nru);
    const auto a = analytical_throughput(op, n, n, s.wifi, s.nru);
    const auto m = run_window(s, s.nru.txop_us);
    const double e_nr = std::abs(m.gamma_nr - a.gamma_nr) / a.gamma_nr;
    const double e_wf = std::abs(m.gamma_wf - a.gamma_wf) / a.gamma_wf;
    worst = std::max({worst, e_nr, e_wf});
    detail += " N=" + std::to_string(n) + " (" + fmt("%.2f%%", 100 * e_nr) + ", " +
              fmt("%.2f%%", 100 * e_wf) + ")";
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 0.05 && elapsed < 60.0,
          "relative error (NR-U, Wi-Fi):" + detail + "; " + fmt("%.1f", elapsed) + " s"};
}

Outcome lbt_imbalance(const ExperimentConfig& cfg) {
  bool pass = true;
  std::string detail;
  for (int p = 1; p <= 4; ++p) {
    std::vector<double> mean_ratio(11, 0.0);
    double min_at_10 = 1e300;
    for (int n = 1; n <= 10; ++n) {
      for (int t = 0; t < kSeeds; ++t) {
        SimConfig s = sim_config(cfg, n, p);
        s.rng_seed = run_seed(cfg.base_seed, {Scheme::LBT, p, n, t});
        const auto m = run_window(s, txop_control(cfg, p).t_max_us);
        const double ratio = m.gamma_nr / m.gamma_wf;
        mean_ratio[n] += ratio / kSeeds;
        if (n == 10) min_at_10 = std::min(min_at_10, ratio);
      }
    }
    int drops = 0;
    for (int n = 2; n <= 10; ++n) drops += mean_ratio[n] < mean_ratio[n - 1];
    pass = pass && min_at_10 >= 2.0 && drops == 0;
    detail += " p" + std::to_string(p) + ": min ratio@N=10 " + fmt("%.2f", min_at_10) +
              ", mean ratio N=1.." + fmt("%.2f", mean_ratio[1]) + ".." +
              fmt("%.2f", mean_ratio[10]) + ", decreases " + std::to_string(drops) + ";";
  }
  return {pass, detail};
}

Outcome q1_fairness(RunCache& cache) {
  bool pass = true;
  std::string detail;
  const int last = cache.config().report.last_episodes;
  for (int n : {2, 5}) {
    int good = 0;
    detail += " N=" + std::to_string(n) + " jain";
    for (int t = 0; t < kSeeds; ++t) {
      const CachedRun r = cache.get({Scheme::Q1, kPriority, n, t});
      const double jain = summarize(r.log, last).jain;
      good += jain >= 0.9;
      pass = pass && r.elapsed_s <= 15 * 60;
      detail += " " + fmt("%.3f", jain) + " (" + fmt("%.0f", r.elapsed_s) + " s)";
    }
    pass = pass && good >= 2;
    detail += ";";
  }
  return {pass, detail};
}

std::string describe(const OrderingCheck& c) {
  std::string s = c.name + (c.pass ? " holds" : " fails");
  for (const auto& d : c.details) s += " [" + d + "]";
  return s;
}

Outcome tradeoff_orderings(RunCache& cache) {
  const ReportBundle b = bundle_at_n5(cache);
  bool pass = !b.throughput_checks.empty() && !b.fairness_checks.empty() &&
              b.throughput_ordering_pass() && b.fairness_ordering_pass();
  std::string detail;
  for (const auto& c : b.throughput_checks) detail += describe(c) + "; ";
  for (const auto& c : b.fairness_checks) detail += describe(c) + "; ";
  for (const auto& m : b.mab_placement) detail += m + "; ";
  return {pass, detail};
}

Outcome q2_efficiency_gain(RunCache& cache) {
  const ReportBundle b = bundle_at_n5(cache);
  const double q1 = cell(b, Scheme::Q1).agg_throughput;
  const double q2 = cell(b, Scheme::Q2).agg_throughput;
  return {q2 >= 1.3 * q1, "Q2 / Q1 aggregate throughput = " + fmt("%.2f", q2) + " / " +
                              fmt("%.2f", q1) + " = " + fmt("%.3f", q2 / q1) + " (need 1.3)"};
}

Outcome q2u_utility_gain(RunCache& cache) {
  const ReportBundle b = bundle_at_n5(cache);
  const double q2 = cell(b, Scheme::Q2).mean_utility;
  const double q2u = cell(b, Scheme::Q2u).mean_utility;
  return {q2u >= 1.5 * q2, "Q2u / Q2 mean utility = " + fmt("%.4f", q2u) + " / " +
                               fmt("%.4f", q2) + " = " + fmt("%.3f", q2u / q2) + " (need 1.5)"};
}

Outcome learning_mechanics() {
  Rng rng(77);
  double worst_fd = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<int> shape{1};
    const int depth = 1 + static_cast<int>(uniform_below(rng, 3));
    for (int l = 0; l < depth; ++l) shape.push_back(4 + static_cast<int>(uniform_below(rng, 29)));
    shape.push_back(kActionCount);
    const QNetwork net = QNetwork::initialized(shape, 1000 + k);
    const int n = 1 + static_cast<int>(uniform_below(rng, 32));
    std::vector<double> s(n), y(n);
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) {
      s[i] = 4.0 * uniform_unit(rng) - 2.0;
      a[i] = static_cast<int>(uniform_below(rng, kActionCount));
      y[i] = 6.0 * uniform_unit(rng) - 3.0;
    }
    std::vector<double> g(net.parameter_count());
    serial::td_loss_gradient(net, {s, a, y}, g);
    const auto fd = oracle::fd_gradient(net, s, a, y, 1e-5);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      num += (g[j] - fd[j]) * (g[j] - fd[j]);
      den += fd[j] * fd[j];
    }
    worst_fd = std::max(worst_fd, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
  }

  bool fifo = true;
  ReplayBuffer<int> buf(100);
  for (int i = 0; i < 1000; ++i) {
    buf.push(i);
    const int oldest = std::max(0, i - 99);
    for (std::size_t j = 0; j < buf.size(); ++j) fifo = fifo && buf[j] == oldest + static_cast<int>(j);
  }

  AgentConfig cfg;
  cfg.hidden_layers = {8, 8};
  cfg.batch_size = 4;
  DqnAgent agent(cfg, 3, false);
  std::vector<std::uint64_t> sync_steps;
  QNetwork prev_target = agent.target();
  while (agent.update_count() < 1000) {
    const std::uint64_t before = agent.update_count();
    agent.learn({1.0 + 0.1 * uniform_unit(rng), static_cast<int>(uniform_below(rng, 3)),
                 uniform_unit(rng), 1.0});
    if (agent.update_count() == before) continue;
    if (!(agent.target() == prev_target)) {
      sync_steps.push_back(agent.update_count());
      prev_target = agent.target();
      if (!(agent.target() == agent.online())) sync_steps.push_back(0);
    }
  }
  bool cadence = sync_steps.size() == 10 && agent.target_syncs() == 10;
  for (std::size_t i = 0; cadence && i < sync_steps.size(); ++i)
    cadence = sync_steps[i] == 100 * (i + 1);

  return {worst_fd < 1e-4 && fifo && cadence,
          "max FD relative error " + fmt("%.2e", worst_fd) + " over 20 nets; FIFO " +
              (fifo ? "exact" : "broken") + "; " + std::to_string(sync_steps.size()) +
              " target syncs in 1000 updates" + (cadence ? " at multiples of 100" : " (off cadence)")};
}

std::vector<double> plateau_fixture() {
  Rng rng(5);
  std::vector<double> r;
  for (int t = 1; t <= 600; ++t) {
    const double base = t < 300 ? 0.2 + 1.3 * (t - 1) / 299.0 : 1.5;
    r.push_back(base + 0.2 * (uniform_unit(rng) - 0.5));
  }
  return r;
}

Outcome stabilization_detector() {
  const StabilizationCriterion crit;
  const auto constant = detect_stabilization(std::vector<double>(300, 1.0), crit);
  std::vector<double> doubling;
  for (int i = 0; i < 300; ++i) doubling.push_back(std::ldexp(1e-3, i));
  const auto none = detect_stabilization(doubling, crit);
  const auto plateau = detect_stabilization(plateau_fixture(), crit);
  bool pass = constant == 99 && !none && plateau && *plateau >= 300 && *plateau <= 400;
  std::string detail = "constant t*=" + (constant ? std::to_string(*constant) : "none") +
                       ", doubling t*=" + (none ? std::to_string(*none) : "none") +
                       ", plateau t*=" + (plateau ? std::to_string(*plateau) : "none") + ";";

  AgentConfig cfg;
  cfg.episodes = 700;
  cfg.steps_per_episode = 50;
  EnvFactory make = [](std::uint64_t) { return std::make_unique<DecreaseStubEnvironment>(); };
  int ok = 0;
  std::vector<double> t_dqn, t_ql;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto r = train(make, AgentKind::DQN, cfg, {-1, 1}, 100 + seed);
    bool optimal = true;
    for (double s = 1.0 / kStateCap; s <= kStateCap; s *= 1.05)
      optimal = optimal && r.agent->greedy(s) == Action::Decrease;
    const auto t = detect_stabilization(r.log.rewards(), crit);
    ok += optimal && t && *t < 600;
    detail += " DQN seed " + std::to_string(seed) + ": greedy " +
              (optimal ? "optimal" : "suboptimal") + ", t*=" + (t ? std::to_string(*t) : "none") +
              ";";
    if (t) t_dqn.push_back(*t);
    const auto q = train(make, AgentKind::QLearning, cfg, {-1, 1}, 100 + seed);
    if (const auto tq = detect_stabilization(q.log.rewards(), crit)) t_ql.push_back(*tq);
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? NAN : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  detail += " reported only: mean t* DQN " + fmt("%.1f", mean(t_dqn)) + " vs Q-learning " +
            fmt("%.1f", mean(t_ql)) + " (" + std::to_string(t_ql.size()) + " of 3 stabilized)";
  return {pass && ok >= 2, detail};
}

Outcome reward_bands() {
  const RewardPolicy q1 = RewardPolicy::q1();
  const std::vector<std::pair<double, double>> probes{
      {0.1, 2.0}, {0.1 + 1e-9, 0.5}, {0.2, 0.5}, {0.2 + 1e-9, -1.0}};
  bool pass = q1.d1 == 0.2 && q1.d2 == 0.1 && q1.r1 == -1.0 && q1.r2 == 0.5 && q1.r3 == 2.0;
  std::string detail;
  for (const auto& [d, want] : probes) {
    for (double sign : {1.0, -1.0}) {
      const double got = compute_reward(1.0 + sign * d, q1);
      pass = pass && got == want;
      detail += fmt(sign > 0 ? " 1+%.9g" : " 1-%.9g", d) + "->" + fmt("%g", got);
    }
  }
  return {pass, "probes:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string config_path;
  std::string cache_dir = "acceptance_cache";
  std::vector<int> criteria;
  bool prepare = false;
  app.add_option("--config", config_path, "experiment JSON file")->required();
  app.add_option("--cache", cache_dir, "directory for cached training runs");
  app.add_option("--criterion", criteria, "criteria to check (default: all)")
      ->check(CLI::Range(1, 10));
  app.add_flag("--prepare", prepare, "train and cache every long run, then exit");
  CLI11_PARSE(app, argc, argv);

  try {
    RunCache cache(load_config(config_path), cache_dir);
    if (prepare) {
      for (const RunKey& key : cached_keys()) cache.get(key);
      return 0;
    }
    if (criteria.empty())
      for (int n = 1; n <= 10; ++n) criteria.push_back(n);

    const ExperimentConfig& cfg = cache.config();
    const std::map<int, std::function<Outcome()>> checks{
        {1, [] { return chain_solver_oracle(); }},
        {2, [&] { return simulator_cross_validation(cfg); }},
        {3, [&] { return lbt_imbalance(cfg); }},
        {4, [&] { return q1_fairness(cache); }},
        {5, [&] { return tradeoff_orderings(cache); }},
        {6, [&] { return q2_efficiency_gain(cache); }},
        {7, [&] { return q2u_utility_gain(cache); }},
        {8, [] { return learning_mechanics(); }},
        {9, [] { return stabilization_detector(); }},
        {10, [] { return reward_bands(); }},
    };
    bool all = true;
    for (int n : criteria) {
      Outcome o;
      try {
        o = checks.at(n)();
      } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
      }
      std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ":"
                << (o.detail.starts_with(' ') ? "" : " ")
                << o.detail << std::endl;
      all = all && o.pass;
    }
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
