#pragma once

// Saturation Markov-chain model of CSMA/CA (Wi-Fi) and LBT (NR-U) channel
// access, and the coupled coexistence operating point of the two.

#include <string>
#include <string_view>
#include <vector>

namespace coex {

/// Contention ladder, TXOP and airtime timing of one technology.
struct AccessConfig {
  int initial_window = 16;  ///< W0, slots
  int max_stage = 6;        ///< m, last backoff stage
  int window_cap = 1024;    ///< CW_max, slots
  double txop_us = 2528.0;
  double defer_us = 34.0;
  double slot_us = 9.0;
  double rate_mbps = 65.0;

  /// Window at backoff stage j: min(2^j * W0, CW_max).
  int window(int stage) const;
  /// Channel occupancy of one transmission: defer + TXOP.
  double occupancy_us() const { return defer_us + txop_us; }
  /// Bits delivered by one successful TXOP (fixed-rate airtime model).
  double payload_bits() const { return rate_mbps * txop_us; }
  /// Number of (stage, counter) states of the backoff chain.
  long state_count() const;
};

/// Lists every violated invariant; empty when valid.
std::vector<std::string> validate(const AccessConfig& cfg, std::string_view name);

struct ChainSolution {
  double tau = 0.0;
  std::vector<double> stage_heads;  ///< b_{j,0} for j = 0..m
  double collision_prob = 0.0;      ///< the p the chain was solved for
};

/// Stationary solution of the backoff chain for conditional collision
/// probability p. A collision at stage m re-enters stage m.
/// Throws InvalidCollisionProbability unless 0 <= p < 1.
ChainSolution solve_chain(const AccessConfig& cfg, double p);

/// Full stationary vector b_{j,k}, stage-major, k = 0..W_j-1.
std::vector<double> stationary_distribution(const AccessConfig& cfg, double p);

struct CollisionProbabilities {
  double p_w = 0.0;
  double p_l = 0.0;
};

/// Conditional collision probabilities seen by a Wi-Fi node (p_w) and an
/// NR-U node (p_l) under the independence approximation. A technology with
/// no nodes reports 0.
CollisionProbabilities coupled_collision(int n_wifi, int n_nru, double tau_wf, double tau_nr);

struct CoexistenceOperatingPoint {
  double tau_wf = 0.0;
  double tau_nr = 0.0;
  double p_w = 0.0;
  double p_l = 0.0;
  double gamma_nr = 0.0;  ///< Mb/s
  double gamma_wf = 0.0;  ///< Mb/s
  double residual = 0.0;
  long iterations = 0;
};

struct FixedPointOptions {
  double tol = 1e-10;
  double damping = 0.5;  ///< weight kept on the previous iterate
  long max_iterations = 100000;
};

/// Damped fixed-point iteration on (tau_wf, tau_nr). Throws SolverFailure
/// carrying the last iterate when the iteration cap is hit.
CoexistenceOperatingPoint solve_coexistence_fixed_point(int n_wifi, int n_nru,
                                                        const AccessConfig& wifi,
                                                        const AccessConfig& nru,
                                                        const FixedPointOptions& opts = {});

struct ThroughputPair {
  double gamma_nr = 0.0;
  double gamma_wf = 0.0;
};

/// Slot-decomposition throughput (idle, Wi-Fi success, NR-U success,
/// collision) for given transmission probabilities. Collision airtime is the
/// longest occupancy among the colliding technologies.
ThroughputPair analytical_throughput(const CoexistenceOperatingPoint& op, int n_wifi,
                                     int n_nru, const AccessConfig& wifi,
                                     const AccessConfig& nru);

/// Saturation throughput of a node alone on the channel.
double lone_node_throughput(const AccessConfig& cfg);

}  // namespace coex
