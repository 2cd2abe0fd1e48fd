#include "coex/training.hpp"

#include <algorithm>

#include "coex/error.hpp"
#include "coex/rng.hpp"

namespace coex {

std::vector<double> TrainLog::rewards() const {
  std::vector<double> r;
  r.reserve(episodes.size());
  for (const auto& e : episodes) r.push_back(e.mean_reward);
  return r;
}

TrainLog train(Environment& env, Agent& agent, int episodes, int steps_per_episode) {
  TrainLog log;
  log.episodes.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 1; ep <= episodes; ++ep) {
    EpisodeRecord rec;
    rec.episode = ep;
    try {
      double s = env.reset();
      for (int step = 0; step < steps_per_episode; ++step) {
        const Action a = agent.select(s);
        const StepOutcome out = env.step(a);
        agent.learn({s, static_cast<int>(a), out.reward, out.next_state});
        rec.mean_reward += out.reward;
        rec.gamma_nr += out.obs.gamma_nr;
        rec.gamma_wf += out.obs.gamma_wf;
        rec.jain += out.obs.jain;
        rec.u_nr += out.obs.u_nr;
        rec.u_wf += out.obs.u_wf;
        rec.t_nr_us = out.t_nr_us;
        s = out.next_state;
      }
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " (episode " + std::to_string(ep) + ")", ep);
    }
    const double n = steps_per_episode;
    rec.mean_reward /= n;
    rec.gamma_nr /= n;
    rec.gamma_wf /= n;
    rec.jain /= n;
    rec.u_nr /= n;
    rec.u_wf /= n;
    log.episodes.push_back(rec);
  }
  log.parameter_updates = agent.update_count();
  log.target_syncs = agent.target_syncs();
  return log;
}

TrainResult train(const EnvFactory& make_env, AgentKind kind, const AgentConfig& cfg,
                  RewardRange range, std::uint64_t seed) {
  if (auto v = validate(cfg); !v.empty()) throw ValidationError(std::move(v));
  auto env = make_env(stream_seed(seed, 1));
  TrainResult result;
  result.agent = make_agent(kind, cfg, range, stream_seed(seed, 2));
  result.log = train(*env, *result.agent, cfg.episodes, cfg.steps_per_episode);
  return result;
}

double DecreaseStubEnvironment::reset() {
  s_ = kStateCap;
  return s_;
}

StepOutcome DecreaseStubEnvironment::step(Action a) {
  const double factor = a == Action::Increase ? 1.1 : a == Action::Decrease ? 0.9 : 1.0;
  s_ = std::clamp(s_ * factor, 1.0 / kStateCap, kStateCap);
  StepOutcome out;
  out.next_state = s_;
  out.reward = a == Action::Decrease ? kDecreaseReward : kOtherReward;
  out.t_nr_us = s_;
  return out;
}

}  // namespace coex
