#pragma once

// Experiment grid: independent (scheme, priority, N, trial) training runs,
// per-cell aggregation and the throughput / fairness ordering checks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "coex/config.hpp"
#include "coex/training.hpp"

namespace coex {

struct RunKey {
  Scheme scheme = Scheme::LBT;
  int priority = 3;
  int n_pairs = 1;
  int trial = 0;

  friend auto operator<=>(const RunKey&, const RunKey&) = default;
};

/// base_seed XOR a splitmix hash of the run coordinates. Independent of
/// grid order and of which other runs exist.
std::uint64_t run_seed(std::uint64_t base_seed, const RunKey& key);

/// Means over the final episodes of a training log.
struct RunSummary {
  double agg_throughput = 0.0;  ///< Gamma_NR + Gamma_WF, Mb/s
  double gamma_nr = 0.0;
  double gamma_wf = 0.0;
  double jain = 0.0;
  double mean_utility = 0.0;  ///< (U_NR + U_WF) / 2
  double utility_fairness = 0.0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

RunSummary summarize(const TrainLog& log, int last_episodes);

struct RunResult {
  RunKey key;
  std::uint64_t seed = 0;
  TrainLog log;
  RunSummary summary;
  std::optional<int> stabilization_episode;
  std::string error;  ///< empty on success

  bool ok() const { return error.empty(); }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// One training run with its environment built from cfg for the key.
RunResult execute_run(const ExperimentConfig& cfg, const RunKey& key);

using CellKey = std::tuple<Scheme, int, int>;  // scheme, priority, n_pairs

struct CellSummary {
  RunSummary mean;  ///< over successful trials
  int trials_ok = 0;
  int trials_failed = 0;
};

struct OrderingCheck {
  std::string name;  ///< e.g. "Q1>Q2>Q2u>LBT"
  int priority = 0;
  int n_pairs = 0;
  bool pass = false;
  std::vector<std::string> details;
};

struct ReportBundle {
  ExperimentConfig config;
  std::vector<RunResult> runs;  ///< grid order
  std::map<CellKey, CellSummary> cells;
  std::vector<OrderingCheck> throughput_checks;
  std::vector<OrderingCheck> fairness_checks;
  std::vector<std::string> mab_placement;

  bool throughput_ordering_pass() const;
  bool fairness_ordering_pass() const;
  bool any_failed_run() const;
};

inline constexpr double kOrderingMargin = 0.03;

/// All runs of the grid, trials innermost.
std::vector<RunKey> expand_grid(const ExperimentConfig& cfg);

/// Aggregates runs into cells and evaluates the orderings of every
/// (priority, N) pair that has all four of LBT, Q1, Q2, Q2u.
ReportBundle aggregate(const ExperimentConfig& cfg, std::vector<RunResult> runs);

namespace serial {
ReportBundle run_suite(const ExperimentConfig& cfg);
}  // namespace serial

namespace omp {
/// Runs distributed over `threads` workers (0: OpenMP default); results are
/// identical to serial::run_suite.
ReportBundle run_suite(const ExperimentConfig& cfg, int threads = 0);
}  // namespace omp

}  // namespace coex
