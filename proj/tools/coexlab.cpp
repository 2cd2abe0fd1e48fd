// coexlab: command-line front end of the coexistence laboratory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coex/access_model.hpp"
#include "coex/config.hpp"
#include "coex/error.hpp"
#include "coex/report.hpp"
#include "coex/simulator.hpp"
#include "coex/stabilization.hpp"
#include "coex/suite.hpp"

namespace fs = std::filesystem;
using namespace coex;

namespace {

enum Exit : int { kOk = 0, kValidation = 2, kRunFailure = 3, kOrdering = 4 };

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> n_pairs;
  std::optional<int> priority;
  std::string out;
  int parallel = 1;
};

ExperimentConfig load(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f.config);
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.n_pairs) cfg.n_pairs = *f.n_pairs;
  if (f.priority) cfg.priority_class = *f.priority;
  if (auto v = validate(cfg); !v.empty()) throw ValidationError(std::move(v));
  return cfg;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
}

int cmd_fixed_point(const CommonFlags& f) {
  const ExperimentConfig cfg = load(f);
  const SimConfig sim = sim_config(cfg, cfg.n_pairs, cfg.priority_class);
  const auto op = solve_coexistence_fixed_point(sim.n_wifi, sim.n_nru, sim.wifi, sim.nru);
  std::printf("n_pairs,priority,t_nr_us,tau_wf,tau_nr,p_w,p_l,gamma_nr_mbps,gamma_wf_mbps,residual,iterations\n");
  std::printf("%d,%d,%.1f,%.12g,%.12g,%.12g,%.12g,%.6f,%.6f,%.3g,%ld\n", cfg.n_pairs,
              cfg.priority_class, sim.nru.txop_us, op.tau_wf, op.tau_nr, op.p_w, op.p_l,
              op.gamma_nr, op.gamma_wf, op.residual, op.iterations);
  return kOk;
}

int cmd_simulate(const CommonFlags& f, std::optional<double> t_nr) {
  const ExperimentConfig cfg = load(f);
  SimConfig sim = sim_config(cfg, cfg.n_pairs, cfg.priority_class);
  sim.rng_seed = cfg.base_seed;
  const double t = t_nr.value_or(sim.nru.txop_us);
  const TxopControl ctrl = txop_control(cfg, cfg.priority_class);
  if (t < ctrl.t_min_us || t > ctrl.t_max_us)
    throw ValidationError({"--t-nr must lie in the priority class TXOP bounds"});
  const EpisodeMetrics m = run_window(sim, t);
  std::printf("n_pairs,priority,t_nr_us,gamma_nr_mbps,gamma_wf_mbps,wifi_success_count,"
              "nru_success_count,collision_count,idle_slot_count,elapsed_s\n");
  std::printf("%d,%d,%.1f,%.6f,%.6f,%lld,%lld,%lld,%lld,%.6f\n", cfg.n_pairs, cfg.priority_class,
              t, m.gamma_nr, m.gamma_wf, static_cast<long long>(m.wifi_success_count),
              static_cast<long long>(m.nru_success_count),
              static_cast<long long>(m.collision_count), static_cast<long long>(m.idle_slot_count),
              m.elapsed_seconds());
  return kOk;
}

int cmd_train(const CommonFlags& f, const std::string& scheme_name,
              std::optional<int> episodes) {
  ExperimentConfig cfg = load(f);
  if (!scheme_name.empty()) {
    auto s = parse_scheme(scheme_name);
    if (!s) throw ValidationError({"unknown scheme '" + scheme_name + "'"});
    cfg.scheme = *s;
  }
  if (episodes) cfg.agent.episodes = *episodes;
  if (auto v = validate(cfg); !v.empty()) throw ValidationError(std::move(v));

  const RunKey key{cfg.scheme, cfg.priority_class, cfg.n_pairs, 0};
  const RunResult r = execute_run(cfg, key);
  if (!r.ok()) {
    std::cerr << "run failed: " << r.error << '\n';
    return kRunFailure;
  }
  const fs::path out = f.out.empty() ? fs::path(".") : fs::path(f.out);
  fs::create_directories(out);
  std::ostringstream csv;
  write_training_log_csv(csv, r.log);
  write_text(out / "training_log.csv", csv.str());
  auto meta = run_metadata(cfg, "train");
  meta["run_seed"] = r.seed;
  write_text(out / "metadata.json", meta.dump(2) + "\n");

  const auto& s = r.summary;
  std::printf("scheme=%s priority=%d n_pairs=%d episodes=%zu updates=%llu\n",
              std::string(to_string(cfg.scheme)).c_str(), cfg.priority_class, cfg.n_pairs,
              r.log.episodes.size(), static_cast<unsigned long long>(r.log.parameter_updates));
  std::printf("last %d episodes: agg_throughput=%.3f Mb/s gamma_nr=%.3f gamma_wf=%.3f jain=%.4f "
              "mean_utility=%.4f utility_fairness=%.4f\n",
              cfg.report.last_episodes, s.agg_throughput, s.gamma_nr, s.gamma_wf, s.jain,
              s.mean_utility, s.utility_fairness);
  if (r.stabilization_episode) std::printf("stabilization_episode=%d\n", *r.stabilization_episode);
  else std::printf("stabilization_episode=none\n");
  return kOk;
}

int cmd_sweep(const CommonFlags& f, bool check) {
  const ExperimentConfig cfg = load(f);
  const ReportBundle b = f.parallel > 1 ? omp::run_suite(cfg, f.parallel) : serial::run_suite(cfg);
  const fs::path out = f.out.empty() ? fs::path("report") : fs::path(f.out);
  emit_report(b, out);
  write_summary(std::cout, b);
  if (b.any_failed_run()) return kRunFailure;
  if (check && !(b.throughput_ordering_pass() && b.fairness_ordering_pass())) return kOrdering;
  return kOk;
}

int cmd_stabilize(const std::string& input, const CommonFlags& f, std::optional<int> window,
                  std::optional<int> hold, std::optional<double> rel_tol) {
  StabilizationCriterion crit;
  if (!f.config.empty()) crit = load(f).stabilization;
  if (window) crit.window = *window;
  if (hold) crit.hold = *hold;
  if (rel_tol) crit.rel_tol = *rel_tol;
  if (auto v = validate(crit); !v.empty()) throw ValidationError(std::move(v));
  std::ifstream in(input);
  if (!in) throw ParseError("cannot open " + input);
  const auto rewards = read_reward_csv(in);
  const auto t = detect_stabilization(rewards, crit);
  if (t) std::printf("%d\n", *t);
  else std::printf("none\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR-U / Wi-Fi coexistence laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", flags.config, "experiment JSON file");
    if (config_required) c->required()->check(CLI::ExistingFile);
    else c->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "override base_seed");
    sub->add_option("--trials", flags.trials, "override trials")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--parallel", flags.parallel, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--n-pairs", flags.n_pairs, "override n_pairs");
    sub->add_option("--priority", flags.priority, "override priority_class");
  };

  auto* fixed = app.add_subcommand("fixed-point", "analytical operating point as CSV");
  add_common(fixed, true);

  std::optional<double> t_nr;
  auto* sim = app.add_subcommand("simulate", "simulate one observation window");
  add_common(sim, true);
  sim->add_option("--t-nr", t_nr, "NR-U TXOP in microseconds (default: class t_max)");

  std::string scheme;
  std::optional<int> episodes;
  auto* train = app.add_subcommand("train", "train one scheme, write the training log");
  add_common(train, true);
  train->add_option("--scheme", scheme, "LBT, Q1, Q2, Q2u, QLearning, DDQN or MAB");
  train->add_option("--episodes", episodes, "override agent.episodes")->check(CLI::PositiveNumber);

  bool check = false;
  auto* sweep = app.add_subcommand("sweep", "run the configured grid, write the report bundle");
  add_common(sweep, true);
  sweep->add_flag("--check", check, "exit 4 when an ordering check fails");

  std::string input;
  std::optional<int> window, hold;
  std::optional<double> rel_tol;
  auto* stab = app.add_subcommand("stabilize", "stabilization episode of a reward CSV");
  add_common(stab, false);
  stab->add_option("input", input, "CSV with a mean_reward column")->required()->check(CLI::ExistingFile);
  stab->add_option("--window", window);
  stab->add_option("--hold", hold);
  stab->add_option("--rel-tol", rel_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*fixed) return cmd_fixed_point(flags);
    if (*sim) return cmd_simulate(flags, t_nr);
    if (*train) return cmd_train(flags, scheme, episodes);
    if (*sweep) return cmd_sweep(flags, check);
    if (*stab) return cmd_stabilize(input, flags, window, hold, rel_tol);
  } catch (const ValidationError& e) {
    std::cerr << "validation error:\n" << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kValidation;
  } catch (const InsufficientData& e) {
    std::cerr << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}
