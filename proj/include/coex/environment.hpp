#pragma once

// Coexistence MDP: ratio states, multiplicative TXOP actions, banded rewards.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coex/metrics.hpp"
#include "coex/simulator.hpp"

namespace coex {

enum class Action : int { Increase = 0, Decrease = 1, Unchanged = 2 };
inline constexpr int kActionCount = 3;

std::string_view to_string(Action a);

struct TxopControl {
  double t_nr_us = 8000.0;
  double alpha = 1.1;
  double beta = 0.9;
  double t_min_us = 500.0;
  double t_max_us = 8000.0;
  int priority_class = 3;
};

std::vector<std::string> validate(const TxopControl& ctrl);

enum class PolicyName { Q1, Q2, Q2u };
enum class StateMode { ThroughputRatio, UtilityRatio };

std::string_view to_string(PolicyName p);

struct RewardPolicy {
  PolicyName name = PolicyName::Q1;
  double d1 = 0.2;
  double d2 = 0.1;
  double r1 = -1.0;
  double r2 = 0.5;
  double r3 = 2.0;
  StateMode state_mode = StateMode::ThroughputRatio;

  static RewardPolicy q1();
  static RewardPolicy q2();
  static RewardPolicy q2u();
};

std::vector<std::string> validate(const RewardPolicy& policy, std::string_view name);

inline constexpr double kStarvationFloor = 1e-6;  // Mb/s
inline constexpr double kStateCap = 10.0;

/// Gamma_NR / Gamma_WF with both floored at kStarvationFloor, clipped to
/// [1/kStateCap, kStateCap].
double throughput_ratio_state(double gamma_nr, double gamma_wf);

/// U_NR / U_WF over clamped utilities, clipped like the throughput state.
double utility_ratio_state(double gamma_nr, double gamma_wf, const UtilityModel& umodel);

/// Dispatches on the policy's state mode. Throughput-ratio policies never
/// touch the utility model.
double observe_state(const EpisodeMetrics& metrics, const RewardPolicy& policy,
                     const UtilityModel& umodel);

/// Multiplies T_NR by alpha / beta / 1 and clamps to [t_min, t_max].
TxopControl apply_action(TxopControl ctrl, Action a);

/// Banded reward on |s - 1|: r3 inside d2, r2 inside d1, r1 outside.
double compute_reward(double s, const RewardPolicy& policy);

struct EnvStep {
  double state = 1.0;
  Action action = Action::Unchanged;
  double reward = 0.0;
  double next_state = 1.0;
  EpisodeMetrics metrics;
};

/// Applies the action, simulates one window at the new T_NR and scores the
/// post-action state.
std::pair<EnvStep, TxopControl> env_step(const SimConfig& sim, const TxopControl& ctrl,
                                         double state, Action a, const RewardPolicy& policy,
                                         const UtilityModel& umodel, std::uint64_t seed);

/// Per-step quantities logged by training.
struct Observation {
  double gamma_nr = 0.0;
  double gamma_wf = 0.0;
  double jain = 1.0;
  double u_nr = kUtilityFloor;
  double u_wf = kUtilityFloor;
};

Observation observe(const EpisodeMetrics& metrics, const UtilityModel& umodel);

struct StepOutcome {
  double next_state = 1.0;
  double reward = 0.0;
  double t_nr_us = 0.0;
  Observation obs;
};

/// What an agent trains against. Episodes restart from reset().
class Environment {
 public:
  virtual ~Environment() = default;
  virtual double reset() = 0;
  virtual StepOutcome step(Action a) = 0;
};

/// The simulated NR-U/Wi-Fi channel. Each decision step simulates one fresh
/// window whose seed is derived from the environment seed and a step counter.
class CoexEnvironment final : public Environment {
 public:
  CoexEnvironment(SimConfig sim, TxopControl initial, RewardPolicy policy, UtilityModel umodel,
                  std::uint64_t seed);

  double reset() override;
  StepOutcome step(Action a) override;

  const TxopControl& control() const { return ctrl_; }
  double state() const { return state_; }

 private:
  std::uint64_t next_window_seed() { return stream_seed_for(windows_++); }
  std::uint64_t stream_seed_for(std::uint64_t n) const;

  SimConfig sim_;
  TxopControl initial_;
  TxopControl ctrl_;
  RewardPolicy policy_;
  UtilityModel umodel_;
  std::uint64_t seed_;
  std::uint64_t windows_ = 0;
  double state_ = 1.0;
};

}  // namespace coex
