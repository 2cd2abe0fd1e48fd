#pragma once

// CSV / text / SVG emission of training logs and sweep results.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coex/suite.hpp"
#include "coex/training.hpp"

namespace coex {

inline constexpr std::string_view kTrainingLogHeader =
    "episode,mean_reward,t_nr_us,gamma_nr_mbps,gamma_wf_mbps,jain,u_nr,u_wf";
inline constexpr std::string_view kSweepHeader =
    "scheme,priority,n_pairs,trial,agg_throughput_mbps,jain,mean_utility,utility_fairness,"
    "stabilization_episode";

void write_training_log_csv(std::ostream& out, const TrainLog& log);

/// Reward column of a CSV: the `mean_reward` column when a header names it,
/// otherwise the last column. Header-less single-column files are accepted.
/// Throws ParseError on non-numeric cells.
std::vector<double> read_reward_csv(std::istream& in);

void write_sweep_csv(std::ostream& out, const ReportBundle& bundle);
void write_summary(std::ostream& out, const ReportBundle& bundle);

/// Everything that is not a pure function of (config, seed): timestamps,
/// generator family, resolved config and the keys filled from defaults.
nlohmann::json run_metadata(const ExperimentConfig& cfg, std::string_view command);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone line chart.
std::string line_chart_svg(std::string_view title, std::string_view x_label,
                           std::string_view y_label, const std::vector<Series>& series);

/// Writes sweep.csv, summary.txt, metadata.json, logs/<run>.csv and, when
/// enabled, plots/*.svg into dir.
void emit_report(const ReportBundle& bundle, const std::filesystem::path& dir);

std::string run_label(const RunKey& key);

}  // namespace coex
