#pragma once

// Slotted saturation-mode Monte-Carlo simulator of Wi-Fi and NR-U nodes
// sharing one channel.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coex/access_model.hpp"

namespace coex {

struct SimConfig {
  int n_wifi = 1;
  int n_nru = 1;
  AccessConfig wifi;
  AccessConfig nru;
  std::int64_t window_slots = 50000;  ///< idle-slot budget per observation window
  std::uint64_t rng_seed = 1;
};

inline constexpr std::int64_t kMinWindowSlots = 1000;

std::vector<std::string> validate(const SimConfig& cfg);

struct EpisodeMetrics {
  double gamma_nr = 0.0;  ///< Mb/s
  double gamma_wf = 0.0;  ///< Mb/s
  std::int64_t wifi_success_count = 0;
  std::int64_t nru_success_count = 0;
  std::int64_t collision_count = 0;
  std::int64_t idle_slot_count = 0;
  std::int64_t transmission_events = 0;
  double collision_airtime_us = 0.0;
  double elapsed_us = 0.0;

  double elapsed_seconds() const { return elapsed_us * 1e-6; }
  friend bool operator==(const EpisodeMetrics&, const EpisodeMetrics&) = default;
};

/// One observation window. Backoff counters decrement in idle slots and
/// freeze while the channel is busy; every node with counter 0 transmits.
/// NR-U nodes use `t_nr_us` as their TXOP. Deterministic given cfg.rng_seed.
EpisodeMetrics run_window(const SimConfig& cfg, double t_nr_us);

/// Copy of cfg with only the seed replaced.
SimConfig reseed(const SimConfig& cfg, std::uint64_t new_seed);

namespace serial {
/// Reference: one window per seed, in order.
std::vector<EpisodeMetrics> run_windows(const SimConfig& cfg, double t_nr_us,
                                        std::span<const std::uint64_t> seeds);
}  // namespace serial

namespace omp {
/// Same result as serial::run_windows, windows distributed over threads.
std::vector<EpisodeMetrics> run_windows(const SimConfig& cfg, double t_nr_us,
                                        std::span<const std::uint64_t> seeds);
}  // namespace omp

}  // namespace coex
