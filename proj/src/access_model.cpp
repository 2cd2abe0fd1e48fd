#include "coex/access_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coex/error.hpp"

namespace coex {

int AccessConfig::window(int stage) const {
  long w = initial_window;
  for (int j = 0; j < stage && w < window_cap; ++j) w *= 2;
  return static_cast<int>(std::min<long>(w, window_cap));
}

long AccessConfig::state_count() const {
  long n = 0;
  for (int j = 0; j <= max_stage; ++j) n += window(j);
  return n;
}

std::vector<std::string> validate(const AccessConfig& cfg, std::string_view name) {
  std::vector<std::string> out;
  const std::string p(name);
  if (cfg.initial_window < 2) out.push_back(p + ".initial_window must be >= 2");
  if (cfg.max_stage < 0) out.push_back(p + ".max_stage must be >= 0");
  if (cfg.max_stage > 30) out.push_back(p + ".max_stage must be <= 30");
  if (cfg.window_cap < cfg.initial_window)
    out.push_back(p + ".window_cap must be >= initial_window");
  if (!(cfg.txop_us > 0)) out.push_back(p + ".txop_us must be > 0");
  if (!(cfg.slot_us > 0)) out.push_back(p + ".slot_us must be > 0");
  if (!(cfg.defer_us >= 0)) out.push_back(p + ".defer_us must be >= 0");
  if (!(cfg.rate_mbps > 0)) out.push_back(p + ".rate_mbps must be > 0");
  return out;
}

InvalidCollisionProbability::InvalidCollisionProbability(double p)
    : Error("invalid collision probability " + std::to_string(p) + " (need 0 <= p < 1)"),
      p_(p) {}

ChainSolution solve_chain(const AccessConfig& cfg, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidCollisionProbability(p);
  const int m = cfg.max_stage;

  // Unnormalized heads with b_{0,0} = 1: b_{j,0} = p^j b_{0,0} for j < m and
  // b_{m,0} = p^m / (1 - p) b_{0,0} since stage m re-enters itself.
  std::vector<double> heads(static_cast<std::size_t>(m) + 1);
  heads[0] = 1.0;
  if (m > 0) {
    for (int j = 1; j < m; ++j) heads[j] = heads[j - 1] * p;
    heads[m] = heads[m - 1] * p / (1.0 - p);
  }

  // Each stage contributes b_{j,0} (W_j + 1) / 2 to the total mass.
  double mass = 0.0;
  for (int j = 0; j <= m; ++j) mass += heads[j] * (cfg.window(j) + 1) * 0.5;
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw SolverFailure("backoff chain is not normalizable", heads, mass, 0);
  }

  ChainSolution sol;
  sol.collision_prob = p;
  sol.stage_heads = std::move(heads);
  for (double& h : sol.stage_heads) {
    h /= mass;
    sol.tau += h;
  }
  return sol;
}

std::vector<double> stationary_distribution(const AccessConfig& cfg, double p) {
  const ChainSolution sol = solve_chain(cfg, p);
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(cfg.state_count()));
  for (int j = 0; j <= cfg.max_stage; ++j) {
    const int w = cfg.window(j);
    for (int k = 0; k < w; ++k) b.push_back(sol.stage_heads[j] * (w - k) / w);
  }
  return b;
}

CollisionProbabilities coupled_collision(int n_wifi, int n_nru, double tau_wf, double tau_nr) {
  CollisionProbabilities cp;
  if (n_wifi > 0)
    cp.p_w = 1.0 - std::pow(1.0 - tau_wf, n_wifi - 1) * std::pow(1.0 - tau_nr, n_nru);
  if (n_nru > 0)
    cp.p_l = 1.0 - std::pow(1.0 - tau_wf, n_wifi) * std::pow(1.0 - tau_nr, n_nru - 1);
  return cp;
}

CoexistenceOperatingPoint solve_coexistence_fixed_point(int n_wifi, int n_nru,
                                                        const AccessConfig& wifi,
                                                        const AccessConfig& nru,
                                                        const FixedPointOptions& opts) {
  if (n_wifi < 0 || n_nru < 0 || n_wifi + n_nru < 1)
    throw DomainError("fixed point needs n_wifi + n_nru >= 1");
  if (!(opts.tol > 0)) throw DomainError("fixed point tolerance must be > 0");

  double tw = n_wifi > 0 ? 2.0 / (wifi.initial_window + 1) : 0.0;
  double tn = n_nru > 0 ? 2.0 / (nru.initial_window + 1) : 0.0;
  double residual = 0.0;

  for (long it = 0; it < opts.max_iterations; ++it) {
    const CollisionProbabilities cp = coupled_collision(n_wifi, n_nru, tw, tn);
    const double gw = n_wifi > 0 ? solve_chain(wifi, cp.p_w).tau : 0.0;
    const double gn = n_nru > 0 ? solve_chain(nru, cp.p_l).tau : 0.0;
    residual = std::max(std::abs(gw - tw), std::abs(gn - tn));
    if (residual <= opts.tol) {
      CoexistenceOperatingPoint op;
      op.tau_wf = tw;
      op.tau_nr = tn;
      op.p_w = cp.p_w;
      op.p_l = cp.p_l;
      op.residual = residual;
      op.iterations = it;
      const ThroughputPair thr = analytical_throughput(op, n_wifi, n_nru, wifi, nru);
      op.gamma_nr = thr.gamma_nr;
      op.gamma_wf = thr.gamma_wf;
      return op;
    }
    tw = opts.damping * tw + (1.0 - opts.damping) * gw;
    tn = opts.damping * tn + (1.0 - opts.damping) * gn;
  }
  throw SolverFailure("coexistence fixed point did not converge", {tw, tn}, residual,
                      opts.max_iterations);
}

ThroughputPair analytical_throughput(const CoexistenceOperatingPoint& op, int n_wifi,
                                     int n_nru, const AccessConfig& wifi,
                                     const AccessConfig& nru) {
  if (n_wifi + n_nru <= 0) return {};
  const double tw = n_wifi > 0 ? op.tau_wf : 0.0;
  const double tn = n_nru > 0 ? op.tau_nr : 0.0;
  const double slot = n_wifi > 0 ? wifi.slot_us : nru.slot_us;

  const double none_w = std::pow(1.0 - tw, n_wifi);
  const double none_n = std::pow(1.0 - tn, n_nru);
  const double one_w = n_wifi > 0 ? n_wifi * tw * std::pow(1.0 - tw, n_wifi - 1) : 0.0;
  const double one_n = n_nru > 0 ? n_nru * tn * std::pow(1.0 - tn, n_nru - 1) : 0.0;

  const double p_idle = none_w * none_n;
  const double p_succ_w = one_w * none_n;
  const double p_succ_n = one_n * none_w;
  const double p_coll_w = (1.0 - none_w - one_w) * none_n;  // Wi-Fi only
  const double p_coll_n = (1.0 - none_n - one_n) * none_w;  // NR-U only
  const double p_coll_mixed = (1.0 - none_w) * (1.0 - none_n);

  const double occ_w = wifi.occupancy_us();
  const double occ_n = nru.occupancy_us();
  const double mean_slot = p_idle * slot + p_succ_w * occ_w + p_succ_n * occ_n +
                           p_coll_w * occ_w + p_coll_n * occ_n +
                           p_coll_mixed * std::max(occ_w, occ_n);

  // bits per microsecond == Mb/s
  return {p_succ_n * nru.payload_bits() / mean_slot, p_succ_w * wifi.payload_bits() / mean_slot};
}

double lone_node_throughput(const AccessConfig& cfg) {
  const double tau = 2.0 / (cfg.initial_window + 1);
  return tau * cfg.payload_bits() / (tau * cfg.occupancy_us() + (1.0 - tau) * cfg.slot_us);
}

}  // namespace coex
