#include "coex/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coex/error.hpp"

namespace coex {

std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::DQN: return "DQN";
    case AgentKind::QLearning: return "QLearning";
    case AgentKind::DDQN: return "DDQN";
    case AgentKind::MAB: return "MAB";
    case AgentKind::FixedLBT: return "FixedLBT";
  }
  return "?";
}

std::vector<std::string> validate(const AgentConfig& c) {
  std::vector<std::string> out;
  if (!(c.learning_rate > 0)) out.push_back("agent.learning_rate must be > 0");
  if (!(c.discount >= 0 && c.discount < 1)) out.push_back("agent.discount must be in [0, 1)");
  if (!(c.epsilon >= 0 && c.epsilon <= 1)) out.push_back("agent.epsilon must be in [0, 1]");
  if (c.replay_capacity < 1) out.push_back("agent.replay_capacity must be > 0");
  if (c.batch_size < 1) out.push_back("agent.batch_size must be > 0");
  if (c.batch_size > c.replay_capacity)
    out.push_back("agent.batch_size must be <= agent.replay_capacity");
  if (c.target_sync_interval < 1) out.push_back("agent.target_sync_interval must be > 0");
  if (c.episodes < 1) out.push_back("agent.episodes must be > 0");
  if (c.steps_per_episode < 1) out.push_back("agent.steps_per_episode must be > 0");
  if (c.hidden_layers.empty()) out.push_back("agent.hidden_layers must not be empty");
  for (int h : c.hidden_layers)
    if (h < 1) out.push_back("agent.hidden_layers entries must be > 0");
  if (c.qlearning_bins < 1) out.push_back("agent.qlearning_bins must be > 0");
  if (!(c.qlearning_state_max > 0)) out.push_back("agent.qlearning_state_max must be > 0");
  if (c.mab_window < 1) out.push_back("agent.mab_window must be > 0");
  return out;
}

Action argmax_action(std::span<const double> q) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a)
    if (q[a] > q[best]) best = a;
  return static_cast<Action>(best);
}

Action select_action(const QNetwork& net, double s, double epsilon, Rng& rng) {
  if (uniform_unit(rng) < epsilon)
    return static_cast<Action>(uniform_below(rng, kActionCount));
  return argmax_action(q_forward(net, s));
}

double td_target(double r, double s_next, const QNetwork& target_net, double gamma) {
  const auto q = q_forward(target_net, s_next);
  return r + gamma * *std::max_element(q.begin(), q.end());
}

double double_td_target(double r, double s_next, const QNetwork& online,
                        const QNetwork& target_net, double gamma) {
  const Action a = argmax_action(q_forward(online, s_next));
  return r + gamma * q_forward(target_net, s_next)[static_cast<int>(a)];
}

double dqn_update(QNetwork& net, std::span<const Transition> batch, const QNetwork& target_net,
                  const AgentConfig& cfg, const DqnUpdateOptions& opts) {
  const std::size_t n = batch.size();
  std::vector<double> states(n), targets(n);
  std::vector<int> actions(n);
  // Same arithmetic as td_target / double_td_target, without per-call buffers.
  QNetwork::Workspace ws_target = target_net.make_workspace();
  QNetwork::Workspace ws_online = net.make_workspace();
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = batch[i];
    states[i] = t.s;
    actions[i] = t.a;
    const double in[1] = {t.s_next};
    const auto q_target = target_net.forward(in, ws_target);
    const double bootstrap =
        opts.double_q ? q_target[static_cast<int>(argmax_action(net.forward(in, ws_online)))]
                      : *std::max_element(q_target.begin(), q_target.end());
    targets[i] = t.r + cfg.discount * bootstrap;
  }

  std::vector<double> grad(net.parameter_count());
  const TdBatch tb{states, actions, targets};
  const double loss = opts.kernel == GradientKernel::OpenMP
                          ? omp::td_loss_gradient(net, tb, grad)
                          : serial::td_loss_gradient(net, tb, grad);

  double grad_max = 0.0;
  bool finite = std::isfinite(loss);
  for (double g : grad) {
    finite = finite && std::isfinite(g);
    grad_max = std::max(grad_max, std::abs(g));
  }
  if (!finite) {
    std::ostringstream msg;
    msg << "training diverged: loss=" << loss << " max|grad|=" << grad_max << " batch=" << n;
    throw TrainingDiverged(msg.str());
  }

  auto params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
  return loss;
}

bool sync_target(const QNetwork& net, QNetwork& target_net, std::uint64_t step_count,
                 int interval) {
  if (interval <= 0 || step_count % static_cast<std::uint64_t>(interval) != 0) return false;
  target_net = net;
  return true;
}

namespace {
std::vector<int> network_shape(const AgentConfig& cfg) {
  std::vector<int> sizes{1};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(kActionCount);
  return sizes;
}
}  // namespace

DqnAgent::DqnAgent(const AgentConfig& cfg, std::uint64_t seed, bool double_q)
    : cfg_(cfg),
      double_q_(double_q),
      rng_(stream_seed(seed, 1)),
      online_(QNetwork::initialized(network_shape(cfg), stream_seed(seed, 0))),
      target_(online_),
      replay_(static_cast<std::size_t>(cfg.replay_capacity)) {
  batch_.reserve(static_cast<std::size_t>(cfg.batch_size));
}

Action DqnAgent::select(double s) { return select_action(online_, encode(s), cfg_.epsilon, rng_); }

Action DqnAgent::greedy(double s) const { return argmax_action(q_forward(online_, encode(s))); }

void DqnAgent::learn(const Transition& t) {
  replay_.push({encode(t.s), t.a, t.r, encode(t.s_next)});
  if (replay_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
  replay_.sample(rng_, static_cast<std::size_t>(cfg_.batch_size), batch_);
  last_loss_ = dqn_update(online_, batch_, target_, cfg_, {double_q_, cfg_.gradient_kernel});
  ++updates_;
  if (sync_target(online_, target_, updates_, cfg_.target_sync_interval)) ++syncs_;
}

QLearningAgent::QLearningAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      rng_(stream_seed(seed, 1)),
      table_(static_cast<std::size_t>(cfg.qlearning_bins + 1) * kActionCount, 0.0) {}

int QLearningAgent::bin(double s) const {
  if (!(s > 0)) return 0;
  if (s >= cfg_.qlearning_state_max) return cfg_.qlearning_bins;
  const double width = cfg_.qlearning_state_max / cfg_.qlearning_bins;
  return std::min(static_cast<int>(s / width), cfg_.qlearning_bins - 1);
}

Action QLearningAgent::select(double s) {
  if (uniform_unit(rng_) < cfg_.epsilon)
    return static_cast<Action>(uniform_below(rng_, kActionCount));
  return greedy(s);
}

Action QLearningAgent::greedy(double s) const { return argmax_action(row(bin(s))); }

void QLearningAgent::learn(const Transition& t) {
  const auto next = row(bin(t.s_next));
  const double y = t.r + cfg_.discount * *std::max_element(next.begin(), next.end());
  double& q = table_[static_cast<std::size_t>(bin(t.s)) * kActionCount + t.a];
  q += cfg_.learning_rate * (y - q);
  ++updates_;
}

UcbAgent::UcbAgent(const AgentConfig& cfg, RewardRange range) : cfg_(cfg), range_(range) {}

double UcbAgent::windowed_mean(Action a) const {
  const auto& r = recent_[static_cast<int>(a)];
  return r.empty() ? 0.0 : recent_sum_[static_cast<int>(a)] / static_cast<double>(r.size());
}

Action UcbAgent::select(double) {
  for (int a = 0; a < kActionCount; ++a)
    if (arm_pulls_[a] == 0) return static_cast<Action>(a);
  std::array<double, kActionCount> score{};
  const double log_t = std::log(static_cast<double>(pulls_));
  for (int a = 0; a < kActionCount; ++a)
    score[a] = windowed_mean(static_cast<Action>(a)) +
               std::sqrt(2.0 * log_t / static_cast<double>(arm_pulls_[a]));
  return argmax_action(score);
}

Action UcbAgent::greedy(double) const {
  std::array<double, kActionCount> mean{};
  for (int a = 0; a < kActionCount; ++a) mean[a] = windowed_mean(static_cast<Action>(a));
  return argmax_action(mean);
}

void UcbAgent::learn(const Transition& t) {
  const double span = range_.hi - range_.lo;
  const double x = span > 0 ? std::clamp((t.r - range_.lo) / span, 0.0, 1.0) : 0.0;
  auto& r = recent_[t.a];
  r.push_back(x);
  if (r.size() > static_cast<std::size_t>(cfg_.mab_window)) r.pop_front();
  recent_sum_[t.a] = std::accumulate(r.begin(), r.end(), 0.0);
  ++arm_pulls_[t.a];
  ++pulls_;
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg, RewardRange range,
                                  std::uint64_t seed) {
  switch (kind) {
    case AgentKind::DQN: return std::make_unique<DqnAgent>(cfg, seed, false);
    case AgentKind::DDQN: return std::make_unique<DqnAgent>(cfg, seed, true);
    case AgentKind::QLearning: return std::make_unique<QLearningAgent>(cfg, seed);
    case AgentKind::MAB: return std::make_unique<UcbAgent>(cfg, range);
    case AgentKind::FixedLBT: return std::make_unique<FixedLbtAgent>();
  }
  return nullptr;
}

}  // namespace coex
