#include <doctest.h>

#include <vector>

#include "coex/access_model.hpp"
#include "coex/config.hpp"
#include "coex/rng.hpp"
#include "coex/simulator.hpp"

using namespace coex;

namespace {
SimConfig small(int n, int priority = 3) {
  ExperimentConfig cfg;
  SimConfig s = sim_config(cfg, n, priority);
  s.window_slots = 20000;
  return s;
}
}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("uniform_below stays in range and covers it") {
  Rng rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = uniform_below(rng, 7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
  CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("stream seeds differ per stream") {
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  CHECK(stream_seed(9, 4) == stream_seed(9, 4));
}

TEST_CASE("window is deterministic in the seed") {
  const SimConfig s = small(3);
  const auto a = run_window(s, 4000);
  const auto b = run_window(s, 4000);
  CHECK(a == b);
  const auto c = run_window(reseed(s, 99), 4000);
  CHECK_FALSE(a == c);
}

TEST_CASE("reseed changes only the seed") {
  const SimConfig s = small(2);
  const SimConfig r = reseed(s, 1234);
  CHECK(r.rng_seed == 1234);
  CHECK(r.n_wifi == s.n_wifi);
  CHECK(r.window_slots == s.window_slots);
  CHECK(r.nru.txop_us == s.nru.txop_us);
}

TEST_CASE("counters are consistent") {
  const SimConfig s = small(4);
  const auto m = run_window(s, 3000);
  CHECK(m.idle_slot_count == s.window_slots);
  CHECK(m.transmission_events == m.wifi_success_count + m.nru_success_count + m.collision_count);
  const double busy = m.elapsed_us - m.idle_slot_count * s.wifi.slot_us;
  const double success_air = m.wifi_success_count * s.wifi.occupancy_us() +
                             m.nru_success_count * (s.nru.defer_us + 3000);
  CHECK(busy == doctest::Approx(success_air + m.collision_airtime_us).epsilon(1e-9));
  CHECK(m.gamma_nr == doctest::Approx(m.nru_success_count * s.nru.rate_mbps * 3000 / m.elapsed_us));
}

TEST_CASE("lone node never collides") {
  SimConfig s = small(1);
  s.n_nru = 0;
  const auto m = run_window(s, 4000);
  CHECK(m.collision_count == 0);
  CHECK(m.nru_success_count == 0);
  CHECK(m.gamma_wf == doctest::Approx(lone_node_throughput(s.wifi)).epsilon(0.03));
}

TEST_CASE("validation") {
  SimConfig s = small(2);
  s.window_slots = 999;
  CHECK_FALSE(validate(s).empty());
  s.window_slots = 1000;
  CHECK(validate(s).empty());
  s.nru.slot_us = 10;
  CHECK_FALSE(validate(s).empty());
}

TEST_CASE("serial and OpenMP batches agree") {
  const SimConfig s = small(3);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 6; ++i) seeds.push_back(stream_seed(17, i));
  const auto a = serial::run_windows(s, 2500, seeds);
  const auto b = omp::run_windows(s, 2500, seeds);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(a[0] == run_window(reseed(s, seeds[0]), 2500));
}

TEST_CASE("longer NR-U TXOP raises the NR-U share") {
  const SimConfig s = small(5);
  double prev = 0.0;
  for (double t : {500.0, 1000.0, 2000.0, 4000.0, 8000.0}) {
    const auto m = run_window(s, t);
    const double ratio = m.gamma_nr / m.gamma_wf;
    CHECK(ratio > prev);
    prev = ratio;
  }
}

TEST_CASE("NR-U dominates at t_max for every N and class") {
  ExperimentConfig cfg;
  for (int p = 1; p <= 4; ++p) {
    for (int n = 1; n <= 10; ++n) {
      SimConfig s = sim_config(cfg, n, p);
      s.window_slots = 20000;
      const auto m = run_window(s, s.nru.txop_us);
      CHECK(m.gamma_nr > m.gamma_wf);
    }
  }
}

TEST_CASE("simulation agrees with the analytical model") {
  ExperimentConfig cfg;
  SimConfig s = sim_config(cfg, 2, 3);
  s.window_slots = 200000;
  const auto op = solve_coexistence_fixed_point(2, 2, s.wifi, s.nru);
  const auto m = run_window(s, s.nru.txop_us);
  CHECK(m.gamma_nr == doctest::Approx(op.gamma_nr).epsilon(0.05));
  CHECK(m.gamma_wf == doctest::Approx(op.gamma_wf).epsilon(0.05));
}

}
