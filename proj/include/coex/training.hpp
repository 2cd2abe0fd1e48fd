#pragma once

// Episode loop shared by every agent kind, plus a small environment with a
// known optimal policy used to check that learning actually works.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "coex/agents.hpp"
#include "coex/environment.hpp"

namespace coex {

/// Per-episode means over its steps; t_nr_us is the value after the last step.
struct EpisodeRecord {
  int episode = 0;  ///< 1-based
  double mean_reward = 0.0;
  double t_nr_us = 0.0;
  double gamma_nr = 0.0;
  double gamma_wf = 0.0;
  double jain = 0.0;
  double u_nr = 0.0;
  double u_wf = 0.0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TrainLog {
  std::vector<EpisodeRecord> episodes;
  std::uint64_t parameter_updates = 0;
  std::uint64_t target_syncs = 0;

  std::vector<double> rewards() const;
  friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

/// Runs `episodes` fixed-length episodes of agent against env.
/// TrainingDiverged is rethrown carrying the 1-based episode index.
TrainLog train(Environment& env, Agent& agent, int episodes, int steps_per_episode);

using EnvFactory = std::function<std::unique_ptr<Environment>(std::uint64_t seed)>;

struct TrainResult {
  TrainLog log;
  std::unique_ptr<Agent> agent;  ///< holds the learned greedy policy
};

/// Builds env and agent from independent sub-streams of seed, then trains
/// for cfg.episodes x cfg.steps_per_episode.
TrainResult train(const EnvFactory& make_env, AgentKind kind, const AgentConfig& cfg,
                  RewardRange range, std::uint64_t seed);

/// State moves multiplicatively like T_NR (x1.1 / x0.9 / x1, clamped to
/// [1/kStateCap, kStateCap]) and restarts at kStateCap. Decrease pays +1,
/// anything else -1, so always-decrease is optimal everywhere.
class DecreaseStubEnvironment final : public Environment {
 public:
  double reset() override;
  StepOutcome step(Action a) override;

  static constexpr double kDecreaseReward = 1.0;
  static constexpr double kOtherReward = -1.0;

 private:
  double s_ = kStateCap;
};

}  // namespace coex
