#pragma once

// Experiment configuration: one strict, versioned JSON document.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coex/access_model.hpp"
#include "coex/agents.hpp"
#include "coex/environment.hpp"
#include "coex/metrics.hpp"
#include "coex/simulator.hpp"
#include "coex/stabilization.hpp"

namespace coex {

inline constexpr int kSchemaVersion = 1;

enum class Scheme { LBT, Q1, Q2, Q2u, QLearning, DDQN, MAB };
inline constexpr std::array kAllSchemes{Scheme::LBT, Scheme::Q1,        Scheme::Q2, Scheme::Q2u,
                                        Scheme::QLearning, Scheme::DDQN, Scheme::MAB};

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Per-class contention ladders and TXOP bounds. Timing (slot, rate, Wi-Fi
/// TXOP) comes from the shared technology sections.
struct PriorityClassConfig {
  int nru_initial_window = 16;
  int nru_max_stage = 2;
  int nru_window_cap = 64;
  double nru_defer_us = 43.0;
  int wifi_initial_window = 16;
  int wifi_max_stage = 6;
  int wifi_window_cap = 1024;
  double wifi_defer_us = 34.0;
  double t_min_us = 500.0;
  double t_max_us = 8000.0;
};

std::array<PriorityClassConfig, 4> default_priority_classes();

struct SweepGrid {
  std::vector<int> n_pairs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> priorities{3};
  std::vector<Scheme> schemes{Scheme::LBT, Scheme::Q1, Scheme::Q2, Scheme::Q2u, Scheme::MAB};
};

struct ReportOptions {
  int last_episodes = 100;
  bool plots = true;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Scheme scheme = Scheme::Q1;
  int n_pairs = 5;
  int priority_class = 3;
  int trials = 3;
  std::uint64_t base_seed = 1;

  AgentConfig agent;
  std::int64_t window_slots = 50000;
  AccessConfig wifi{16, 6, 1024, 2528.0, 34.0, 9.0, 65.0};
  AccessConfig nru{16, 6, 1024, 8000.0, 25.0, 9.0, 130.0};
  std::array<PriorityClassConfig, 4> priority_classes = default_priority_classes();
  double alpha = 1.1;
  double beta = 0.9;
  double b_min = 0.5;
  std::optional<double> b_max;  ///< unset: lone-node saturation throughput
  RewardPolicy q1 = RewardPolicy::q1();
  RewardPolicy q2 = RewardPolicy::q2();
  RewardPolicy q2u = RewardPolicy::q2u();
  PolicyName baseline_policy = PolicyName::Q1;  ///< reward seen by QLearning/DDQN/MAB/LBT
  StabilizationCriterion stabilization;
  SweepGrid sweep;
  ReportOptions report;

  /// Keys absent from the file that were filled with defaults.
  std::vector<std::string> defaulted;
};

/// Every violated invariant of cfg (nested ones included).
std::vector<std::string> validate(const ExperimentConfig& cfg);

/// Strict parse: unknown keys and type mismatches are violations. Throws
/// ParseError for malformed JSON and ValidationError listing all violations.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration, defaults included.
nlohmann::json to_json(const ExperimentConfig& cfg);

const PriorityClassConfig& priority_class(const ExperimentConfig& cfg, int priority);
AccessConfig wifi_access(const ExperimentConfig& cfg, int priority);
/// NR-U access with TXOP at the class t_max.
AccessConfig nru_access(const ExperimentConfig& cfg, int priority);
/// n_pairs Wi-Fi and n_pairs NR-U nodes.
SimConfig sim_config(const ExperimentConfig& cfg, int n_pairs, int priority);
TxopControl txop_control(const ExperimentConfig& cfg, int priority);
UtilityModel utility_model(const ExperimentConfig& cfg, int priority);
RewardPolicy policy_for(const ExperimentConfig& cfg, Scheme scheme);
AgentKind agent_kind(Scheme scheme);
/// Reward bounds of the policy a scheme trains under.
RewardRange reward_range(const RewardPolicy& policy);

}  // namespace coex
