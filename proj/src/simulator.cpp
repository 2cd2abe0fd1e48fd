#include "coex/simulator.hpp"

#include <algorithm>
#include <limits>

#include "coex/rng.hpp"

namespace coex {

std::vector<std::string> validate(const SimConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.n_wifi < 0) out.push_back("sim.n_wifi must be >= 0");
  if (cfg.n_nru < 0) out.push_back("sim.n_nru must be >= 0");
  if (cfg.window_slots < kMinWindowSlots)
    out.push_back("sim.window_slots must be >= " + std::to_string(kMinWindowSlots));
  for (auto& v : validate(cfg.wifi, "wifi")) out.push_back(std::move(v));
  for (auto& v : validate(cfg.nru, "nru")) out.push_back(std::move(v));
  if (cfg.wifi.slot_us != cfg.nru.slot_us)
    out.push_back("wifi.slot_us and nru.slot_us must be equal (one shared channel)");
  return out;
}

SimConfig reseed(const SimConfig& cfg, std::uint64_t new_seed) {
  SimConfig out = cfg;
  out.rng_seed = new_seed;
  return out;
}

EpisodeMetrics run_window(const SimConfig& cfg, double t_nr_us) {
  AccessConfig nru = cfg.nru;
  nru.txop_us = t_nr_us;
  const AccessConfig& wifi = cfg.wifi;

  const int n = cfg.n_wifi + cfg.n_nru;
  // Per-node ladder; Wi-Fi nodes first, then NR-U nodes.
  std::vector<std::uint64_t> windows_w(static_cast<std::size_t>(wifi.max_stage) + 1);
  std::vector<std::uint64_t> windows_n(static_cast<std::size_t>(nru.max_stage) + 1);
  for (int j = 0; j <= wifi.max_stage; ++j) windows_w[j] = static_cast<std::uint64_t>(wifi.window(j));
  for (int j = 0; j <= nru.max_stage; ++j) windows_n[j] = static_cast<std::uint64_t>(nru.window(j));

  std::vector<std::int64_t> counter(n);
  std::vector<int> stage(n, 0);
  std::vector<Rng> rng;
  rng.reserve(n);
  for (int i = 0; i < n; ++i) {
    rng.emplace_back(stream_seed(cfg.rng_seed, static_cast<std::uint64_t>(i)));
    const auto& w = i < cfg.n_wifi ? windows_w : windows_n;
    counter[i] = static_cast<std::int64_t>(uniform_below(rng[i], w[0]));
  }

  const double occ_w = wifi.occupancy_us();
  const double occ_n = nru.occupancy_us();
  const double slot = n > 0 && cfg.n_wifi == 0 ? nru.slot_us : wifi.slot_us;

  EpisodeMetrics m;
  double busy_us = 0.0;
  std::vector<int> transmitters;
  transmitters.reserve(n);

  while (m.idle_slot_count < cfg.window_slots) {
    std::int64_t kmin = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < n; ++i) kmin = std::min(kmin, counter[i]);

    if (kmin > 0) {
      // Run of idle slots until the next counter expires or the budget ends.
      const std::int64_t run = std::min(kmin, cfg.window_slots - m.idle_slot_count);
      m.idle_slot_count += run;
      for (int i = 0; i < n; ++i) counter[i] -= run;
      continue;
    }

    transmitters.clear();
    int tx_wifi = 0;
    for (int i = 0; i < n; ++i) {
      if (counter[i] == 0) {
        transmitters.push_back(i);
        if (i < cfg.n_wifi) ++tx_wifi;
      }
    }
    const int tx_nru = static_cast<int>(transmitters.size()) - tx_wifi;
    ++m.transmission_events;

    if (transmitters.size() == 1) {
      const int i = transmitters.front();
      const bool is_wifi = i < cfg.n_wifi;
      busy_us += is_wifi ? occ_w : occ_n;
      if (is_wifi) ++m.wifi_success_count;
      else ++m.nru_success_count;
      stage[i] = 0;
      counter[i] = static_cast<std::int64_t>(uniform_below(rng[i], (is_wifi ? windows_w : windows_n)[0]));
    } else {
      ++m.collision_count;
      double airtime = 0.0;
      if (tx_wifi > 0) airtime = std::max(airtime, occ_w);
      if (tx_nru > 0) airtime = std::max(airtime, occ_n);
      busy_us += airtime;
      m.collision_airtime_us += airtime;
      for (const int i : transmitters) {
        const auto& w = i < cfg.n_wifi ? windows_w : windows_n;
        stage[i] = std::min(stage[i] + 1, static_cast<int>(w.size()) - 1);
        counter[i] = static_cast<std::int64_t>(uniform_below(rng[i], w[stage[i]]));
      }
    }
  }

  m.elapsed_us = static_cast<double>(m.idle_slot_count) * slot + busy_us;
  m.gamma_wf = static_cast<double>(m.wifi_success_count) * wifi.payload_bits() / m.elapsed_us;
  m.gamma_nr = static_cast<double>(m.nru_success_count) * nru.payload_bits() / m.elapsed_us;
  return m;
}

namespace serial {
std::vector<EpisodeMetrics> run_windows(const SimConfig& cfg, double t_nr_us,
                                        std::span<const std::uint64_t> seeds) {
  std::vector<EpisodeMetrics> out;
  out.reserve(seeds.size());
  for (const std::uint64_t s : seeds) out.push_back(run_window(reseed(cfg, s), t_nr_us));
  return out;
}
}  // namespace serial

namespace omp {
std::vector<EpisodeMetrics> run_windows(const SimConfig& cfg, double t_nr_us,
                                        std::span<const std::uint64_t> seeds) {
  std::vector<EpisodeMetrics> out(seeds.size());
  const long count = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) out[i] = run_window(reseed(cfg, seeds[i]), t_nr_us);
  return out;
}
}  // namespace omp

}  // namespace coex
