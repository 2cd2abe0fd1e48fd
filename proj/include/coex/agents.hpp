#pragma once

// Learning agents for TXOP control: DQN / DDQN over a small Q-network,
// tabular Q-learning, a stateless UCB1 bandit and the fixed-LBT baseline.

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "coex/environment.hpp"
#include "coex/qnetwork.hpp"
#include "coex/replay_buffer.hpp"
#include "coex/rng.hpp"

namespace coex {

enum class AgentKind { DQN, QLearning, DDQN, MAB, FixedLBT };
enum class GradientKernel { Serial, OpenMP };

std::string_view to_string(AgentKind k);

struct AgentConfig {
  double learning_rate = 0.001;
  double discount = 0.9;
  double epsilon = 0.1;
  int replay_capacity = 10000;
  int batch_size = 64;
  int target_sync_interval = 100;
  int episodes = 1000;
  int steps_per_episode = 200;
  std::vector<int> hidden_layers{64, 64};
  int qlearning_bins = 21;  ///< uniform bins on [0, qlearning_state_max), plus one overflow bin
  double qlearning_state_max = 2.0;
  int mab_window = 100;
  GradientKernel gradient_kernel = GradientKernel::Serial;
};

std::vector<std::string> validate(const AgentConfig& cfg);

struct Transition {
  double s = 0.0;
  int a = 0;
  double r = 0.0;
  double s_next = 0.0;
};

/// Argmax with ties broken towards the lowest action index.
Action argmax_action(std::span<const double> q);

/// Epsilon-greedy over q_forward(net, s).
Action select_action(const QNetwork& net, double s, double epsilon, Rng& rng);

/// r + gamma * max_a Q_target(s_next, a).
double td_target(double r, double s_next, const QNetwork& target_net, double gamma);

/// r + gamma * Q_target(s_next, argmax_a Q_online(s_next, a)).
double double_td_target(double r, double s_next, const QNetwork& online,
                        const QNetwork& target_net, double gamma);

struct DqnUpdateOptions {
  bool double_q = false;
  GradientKernel kernel = GradientKernel::Serial;
};

/// One gradient-descent step on the mean squared TD error of the batch.
/// Returns the pre-step loss. Throws TrainingDiverged on a non-finite
/// loss or gradient; the network is left untouched in that case.
double dqn_update(QNetwork& net, std::span<const Transition> batch, const QNetwork& target_net,
                  const AgentConfig& cfg, const DqnUpdateOptions& opts = {});

/// Copies net into target_net when step_count is a multiple of interval.
/// Returns true when a copy happened.
bool sync_target(const QNetwork& net, QNetwork& target_net, std::uint64_t step_count,
                 int interval);

class Agent {
 public:
  virtual ~Agent() = default;
  /// Behaviour policy (may explore).
  virtual Action select(double s) = 0;
  /// Learned greedy policy.
  virtual Action greedy(double s) const = 0;
  virtual void learn(const Transition& t) = 0;
  virtual std::uint64_t update_count() const = 0;
  virtual std::uint64_t target_syncs() const { return 0; }
};

/// Range of rewards the agent can see; the bandit normalizes with it.
struct RewardRange {
  double lo = -1.0;
  double hi = 2.0;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg, RewardRange range,
                                  std::uint64_t seed);

/// DQN with experience replay and its double-Q variant. States are fed to
/// the network centred as s - 1.
class DqnAgent final : public Agent {
 public:
  DqnAgent(const AgentConfig& cfg, std::uint64_t seed, bool double_q);

  Action select(double s) override;
  Action greedy(double s) const override;
  void learn(const Transition& t) override;
  std::uint64_t update_count() const override { return updates_; }
  std::uint64_t target_syncs() const override { return syncs_; }

  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  double last_loss() const { return last_loss_; }

  static double encode(double s) { return s - 1.0; }

 private:
  AgentConfig cfg_;
  bool double_q_;
  Rng rng_;
  QNetwork online_;
  QNetwork target_;
  ReplayBuffer<Transition> replay_;
  std::vector<Transition> batch_;
  std::uint64_t updates_ = 0;
  std::uint64_t syncs_ = 0;
  double last_loss_ = 0.0;
};

class QLearningAgent final : public Agent {
 public:
  QLearningAgent(const AgentConfig& cfg, std::uint64_t seed);

  Action select(double s) override;
  Action greedy(double s) const override;
  void learn(const Transition& t) override;
  std::uint64_t update_count() const override { return updates_; }

  int bin(double s) const;
  double q(int bin, Action a) const { return table_[static_cast<std::size_t>(bin) * kActionCount + static_cast<int>(a)]; }

 private:
  std::span<const double> row(int bin) const {
    return {table_.data() + static_cast<std::size_t>(bin) * kActionCount, kActionCount};
  }

  AgentConfig cfg_;
  Rng rng_;
  std::vector<double> table_;
  std::uint64_t updates_ = 0;
};

/// UCB1 over the three actions, ignoring the state. Arm means are taken over
/// each arm's most recent mab_window rewards, normalized to [0, 1].
class UcbAgent final : public Agent {
 public:
  UcbAgent(const AgentConfig& cfg, RewardRange range);

  Action select(double s) override;
  Action greedy(double s) const override;
  void learn(const Transition& t) override;
  std::uint64_t update_count() const override { return pulls_; }

  std::uint64_t pulls(Action a) const { return arm_pulls_[static_cast<int>(a)]; }
  double windowed_mean(Action a) const;

 private:
  AgentConfig cfg_;
  RewardRange range_;
  std::array<std::deque<double>, kActionCount> recent_;
  std::array<double, kActionCount> recent_sum_{};
  std::array<std::uint64_t, kActionCount> arm_pulls_{};
  std::uint64_t pulls_ = 0;
};

/// Default LBT: always requests an increase, which the clamp holds at t_max.
class FixedLbtAgent final : public Agent {
 public:
  Action select(double) override { return Action::Increase; }
  Action greedy(double) const override { return Action::Increase; }
  void learn(const Transition&) override {}
  std::uint64_t update_count() const override { return 0; }
};

}  // namespace coex
