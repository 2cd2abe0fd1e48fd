#include <doctest.h>

#include <cmath>

#include "coex/config.hpp"
#include "coex/environment.hpp"
#include "coex/rng.hpp"

using namespace coex;

TEST_SUITE("environment") {

TEST_CASE("throughput state") {
  CHECK(throughput_ratio_state(10, 10) == doctest::Approx(1.0));
  CHECK(throughput_ratio_state(12, 10) == doctest::Approx(1.2));
  CHECK(throughput_ratio_state(5, 0) == kStateCap);
  CHECK(throughput_ratio_state(0, 5) == doctest::Approx(1.0 / kStateCap));
  CHECK(throughput_ratio_state(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("utility state uses clamped utilities") {
  UtilityModel u;
  u.b_max = 60;
  CHECK(utility_ratio_state(10, 10, u) == doctest::Approx(1.0));
  CHECK(utility_ratio_state(20, 10, u) ==
        doctest::Approx(clamped_utility(20, u) / clamped_utility(10, u)));
  CHECK(utility_ratio_state(30, 0.0, u) == kStateCap);
}

TEST_CASE("state modes read only their own inputs") {
  EpisodeMetrics m;
  m.gamma_nr = 30;
  m.gamma_wf = 10;
  UtilityModel poisoned;
  poisoned.t_of_b = [](double) -> double { throw std::logic_error("utility model read"); };
  CHECK(observe_state(m, RewardPolicy::q1(), poisoned) == doctest::Approx(3.0));
  CHECK(observe_state(m, RewardPolicy::q2(), poisoned) == doctest::Approx(3.0));
  UtilityModel u;
  CHECK(observe_state(m, RewardPolicy::q2u(), u) ==
        doctest::Approx(clamped_utility(30, u) / clamped_utility(10, u)));
}

TEST_CASE("starved Wi-Fi in simulation hits the cap") {
  ExperimentConfig cfg;
  SimConfig s = sim_config(cfg, 1, 3);
  s.n_wifi = 1;
  s.wifi.window_cap = 1 << 20;
  s.wifi.initial_window = 1 << 20;
  s.wifi.max_stage = 0;
  s.window_slots = 2000;
  const auto m = run_window(s, 8000);
  CHECK(m.gamma_wf == 0.0);
  CHECK(observe_state(m, RewardPolicy::q1(), UtilityModel{}) == kStateCap);
}

TEST_CASE("apply_action") {
  TxopControl c{2000, 1.1, 0.9, 500, 8000, 3};
  CHECK(apply_action(c, Action::Increase).t_nr_us == doctest::Approx(2200));
  CHECK(apply_action(c, Action::Decrease).t_nr_us == doctest::Approx(1800));
  CHECK(apply_action(c, Action::Unchanged).t_nr_us == 2000);
  c.t_nr_us = 7900;
  CHECK(apply_action(c, Action::Increase).t_nr_us == 8000);
  for (int i = 0; i < 100; ++i) c = apply_action(c, Action::Decrease);
  CHECK(c.t_nr_us == 500);
}

TEST_CASE("TXOP stays in bounds under random action strings") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    TxopControl c{8000, 1.1, 0.9, 500, 8000, 3};
    for (int i = 0; i < 300; ++i) {
      c = apply_action(c, static_cast<Action>(uniform_below(rng, 3)));
      REQUIRE(c.t_nr_us >= c.t_min_us);
      REQUIRE(c.t_nr_us <= c.t_max_us);
    }
  }
}

TEST_CASE("reward bands") {
  const auto q1 = RewardPolicy::q1();
  CHECK(compute_reward(1.05, q1) == 2.0);
  CHECK(compute_reward(1.15, q1) == 0.5);
  CHECK(compute_reward(0.70, q1) == -1.0);
  CHECK(compute_reward(1.0 + 0.1, q1) == 2.0);
  CHECK(compute_reward(1.0 - 0.1, q1) == 2.0);
  CHECK(compute_reward(1.0 + 0.1 + 1e-9, q1) == 0.5);
  CHECK(compute_reward(1.0 + 0.2, q1) == 0.5);
  CHECK(compute_reward(1.0 - 0.2, q1) == 0.5);
  CHECK(compute_reward(1.0 + 0.2 + 1e-9, q1) == -1.0);
  CHECK(compute_reward(1.0 - 0.2 - 1e-9, q1) == -1.0);
}

TEST_CASE("reward is symmetric and non-increasing in the deviation") {
  for (const auto& p : {RewardPolicy::q1(), RewardPolicy::q2(), RewardPolicy::q2u()}) {
    double prev = 1e9;
    for (double d = 0.0; d < 1.0; d += 0.01) {
      const double r = compute_reward(1.0 + d, p);
      if (d < 0.99) CHECK(r == compute_reward(1.0 - d, p));
      CHECK(r <= prev);
      prev = r;
    }
  }
}

TEST_CASE("policy validation") {
  CHECK(validate(RewardPolicy::q1(), "Q1").empty());
  CHECK(validate(RewardPolicy::q2(), "Q2").empty());
  CHECK(validate(RewardPolicy::q2u(), "Q2u").empty());
  RewardPolicy bad = RewardPolicy::q1();
  bad.d2 = 0.3;
  bad.r3 = 0.0;
  bad.state_mode = StateMode::UtilityRatio;
  CHECK(validate(bad, "Q1").size() == 3);
  TxopControl c{9000, 0.9, 1.5, 500, 8000, 7};
  CHECK(validate(c).size() == 4);
}

TEST_CASE("env_step") {
  ExperimentConfig cfg;
  SimConfig sim = sim_config(cfg, 2, 3);
  sim.window_slots = 5000;
  const TxopControl ctrl = txop_control(cfg, 3);
  const UtilityModel u = utility_model(cfg, 3);

  const auto [a, ca] = env_step(sim, ctrl, 1.0, Action::Unchanged, RewardPolicy::q1(), u, 5);
  const auto [b, cb] = env_step(sim, ctrl, 1.0, Action::Unchanged, RewardPolicy::q1(), u, 5);
  CHECK(a.metrics == b.metrics);
  CHECK(a.next_state == b.next_state);
  CHECK(ca.t_nr_us == cb.t_nr_us);

  const auto [inc, cinc] = env_step(sim, ctrl, 1.0, Action::Increase, RewardPolicy::q1(), u, 5);
  CHECK(cinc.t_nr_us == ctrl.t_max_us);
  CHECK(inc.metrics == a.metrics);

  CHECK(a.reward == compute_reward(a.next_state, RewardPolicy::q1()));
  CHECK(a.state == 1.0);
  CHECK(inc.action == Action::Increase);
}

TEST_CASE("repeated decreases pull the state down toward 1") {
  ExperimentConfig cfg;
  SimConfig sim = sim_config(cfg, 5, 3);
  sim.window_slots = 10000;
  TxopControl ctrl = txop_control(cfg, 3);
  const UtilityModel u = utility_model(cfg, 3);
  double s = 10.0;
  double first = 0.0;
  for (int i = 0; i < 40; ++i) {
    auto [st, next] = env_step(sim, ctrl, s, Action::Decrease, RewardPolicy::q1(), u, 100 + i);
    if (i == 0) first = st.next_state;
    s = st.next_state;
    ctrl = next;
  }
  CHECK(first > 2.0);
  CHECK(s < first);
  CHECK(s < 1.5);
}

TEST_CASE("environment episodes restart from the initial TXOP") {
  ExperimentConfig cfg;
  SimConfig sim = sim_config(cfg, 2, 3);
  sim.window_slots = 2000;
  CoexEnvironment env(sim, txop_control(cfg, 3), RewardPolicy::q1(), utility_model(cfg, 3), 4);
  env.reset();
  for (int i = 0; i < 5; ++i) env.step(Action::Decrease);
  CHECK(env.control().t_nr_us < 8000);
  env.reset();
  CHECK(env.control().t_nr_us == 8000);
  const auto out = env.step(Action::Decrease);
  CHECK(out.t_nr_us == doctest::Approx(7200));
  CHECK(out.obs.jain >= 0.5);
}

}
