#include "coex/environment.hpp"

#include <algorithm>
#include <cmath>

#include "coex/rng.hpp"

namespace coex {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Increase: return "increase";
    case Action::Decrease: return "decrease";
    case Action::Unchanged: return "unchanged";
  }
  return "?";
}

std::string_view to_string(PolicyName p) {
  switch (p) {
    case PolicyName::Q1: return "Q1";
    case PolicyName::Q2: return "Q2";
    case PolicyName::Q2u: return "Q2u";
  }
  return "?";
}

std::vector<std::string> validate(const TxopControl& c) {
  std::vector<std::string> out;
  if (!(c.alpha > 1.0)) out.push_back("txop.alpha must be > 1");
  if (!(c.beta > 0.0 && c.beta < 1.0)) out.push_back("txop.beta must be in (0, 1)");
  if (!(c.t_min_us > 0.0)) out.push_back("txop.t_min_us must be > 0");
  if (!(c.t_min_us <= c.t_max_us)) out.push_back("txop.t_min_us must be <= t_max_us");
  if (!(c.t_nr_us >= c.t_min_us && c.t_nr_us <= c.t_max_us))
    out.push_back("txop.t_nr_us must lie in [t_min_us, t_max_us]");
  if (c.priority_class < 1 || c.priority_class > 4)
    out.push_back("txop.priority_class must be in 1..4");
  return out;
}

RewardPolicy RewardPolicy::q1() { return {PolicyName::Q1, 0.2, 0.1, -1.0, 0.5, 2.0, StateMode::ThroughputRatio}; }
RewardPolicy RewardPolicy::q2() { return {PolicyName::Q2, 0.8, 0.6, -1.0, 0.5, 2.0, StateMode::ThroughputRatio}; }
RewardPolicy RewardPolicy::q2u() { return {PolicyName::Q2u, 0.8, 0.6, -1.0, 0.5, 2.0, StateMode::UtilityRatio}; }

std::vector<std::string> validate(const RewardPolicy& p, std::string_view name) {
  std::vector<std::string> out;
  const std::string n(name);
  if (!(0.0 < p.d2 && p.d2 < p.d1 && p.d1 < 1.0))
    out.push_back(n + ": thresholds must satisfy 0 < d2 < d1 < 1");
  if (!(p.r1 < p.r2 && p.r2 < p.r3)) out.push_back(n + ": rewards must satisfy r1 < r2 < r3");
  const StateMode expected =
      p.name == PolicyName::Q2u ? StateMode::UtilityRatio : StateMode::ThroughputRatio;
  if (p.state_mode != expected) out.push_back(n + ": state mode does not match policy");
  return out;
}

namespace {
double clip_state(double s) { return std::clamp(s, 1.0 / kStateCap, kStateCap); }
}  // namespace

double throughput_ratio_state(double gamma_nr, double gamma_wf) {
  return clip_state(std::max(gamma_nr, kStarvationFloor) / std::max(gamma_wf, kStarvationFloor));
}

double utility_ratio_state(double gamma_nr, double gamma_wf, const UtilityModel& umodel) {
  return clip_state(clamped_utility(gamma_nr, umodel) / clamped_utility(gamma_wf, umodel));
}

double observe_state(const EpisodeMetrics& m, const RewardPolicy& policy,
                     const UtilityModel& umodel) {
  if (policy.state_mode == StateMode::UtilityRatio)
    return utility_ratio_state(m.gamma_nr, m.gamma_wf, umodel);
  return throughput_ratio_state(m.gamma_nr, m.gamma_wf);
}

TxopControl apply_action(TxopControl ctrl, Action a) {
  switch (a) {
    case Action::Increase: ctrl.t_nr_us *= ctrl.alpha; break;
    case Action::Decrease: ctrl.t_nr_us *= ctrl.beta; break;
    case Action::Unchanged: break;
  }
  ctrl.t_nr_us = std::clamp(ctrl.t_nr_us, ctrl.t_min_us, ctrl.t_max_us);
  return ctrl;
}

double compute_reward(double s, const RewardPolicy& policy) {
  // States are ratios of measured values; deviations within 1e-12 of a
  // threshold are representation error (1.1 - 1 != 0.1 in binary).
  constexpr double kEdge = 1e-12;
  const double dev = std::abs(s - 1.0);
  if (dev > policy.d1 + kEdge) return policy.r1;
  if (dev > policy.d2 + kEdge) return policy.r2;
  return policy.r3;
}

std::pair<EnvStep, TxopControl> env_step(const SimConfig& sim, const TxopControl& ctrl,
                                         double state, Action a, const RewardPolicy& policy,
                                         const UtilityModel& umodel, std::uint64_t seed) {
  const TxopControl next = apply_action(ctrl, a);
  EnvStep step;
  step.state = state;
  step.action = a;
  step.metrics = run_window(reseed(sim, seed), next.t_nr_us);
  step.next_state = observe_state(step.metrics, policy, umodel);
  step.reward = compute_reward(step.next_state, policy);
  return {step, next};
}

Observation observe(const EpisodeMetrics& m, const UtilityModel& umodel) {
  Observation o;
  o.gamma_nr = m.gamma_nr;
  o.gamma_wf = m.gamma_wf;
  o.jain = (m.gamma_nr > 0 || m.gamma_wf > 0) ? jain_index(m.gamma_nr, m.gamma_wf) : 1.0;
  o.u_nr = clamped_utility(m.gamma_nr, umodel);
  o.u_wf = clamped_utility(m.gamma_wf, umodel);
  return o;
}

CoexEnvironment::CoexEnvironment(SimConfig sim, TxopControl initial, RewardPolicy policy,
                                 UtilityModel umodel, std::uint64_t seed)
    : sim_(std::move(sim)),
      initial_(initial),
      ctrl_(initial),
      policy_(policy),
      umodel_(std::move(umodel)),
      seed_(seed) {}

std::uint64_t CoexEnvironment::stream_seed_for(std::uint64_t n) const {
  return stream_seed(seed_, n);
}

double CoexEnvironment::reset() {
  ctrl_ = initial_;
  const EpisodeMetrics m = run_window(reseed(sim_, next_window_seed()), ctrl_.t_nr_us);
  state_ = observe_state(m, policy_, umodel_);
  return state_;
}

StepOutcome CoexEnvironment::step(Action a) {
  auto [st, next] = env_step(sim_, ctrl_, state_, a, policy_, umodel_, next_window_seed());
  ctrl_ = next;
  state_ = st.next_state;
  StepOutcome out;
  out.next_state = st.next_state;
  out.reward = st.reward;
  out.t_nr_us = ctrl_.t_nr_us;
  out.obs = observe(st.metrics, umodel_);
  return out;
}

}  // namespace coex
