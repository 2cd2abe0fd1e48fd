#include "coex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coex/error.hpp"

namespace coex {

double jain_index(double gamma_nr, double gamma_wf) {
  if (gamma_nr < 0 || gamma_wf < 0) throw DomainError("jain_index: negative throughput");
  const double sq = gamma_nr * gamma_nr + gamma_wf * gamma_wf;
  if (sq == 0.0) throw UndefinedFairness();
  const double sum = gamma_nr + gamma_wf;
  return sum * sum / (2.0 * sq);
}

double utility(double x, const UtilityModel& model) {
  if (!(x > 0)) throw DomainError("utility: throughput must be > 0, got " + std::to_string(x));
  const double t_min = model.t_of_b(model.b_min);
  return std::log(model.t_of_b(x) / t_min) / std::log(model.t_of_b(model.b_max) / t_min);
}

double clamped_utility(double x, const UtilityModel& model) {
  if (!(x > 0)) return kUtilityFloor;
  return std::clamp(utility(x, model), kUtilityFloor, 1.0);
}

double utility_fairness(double u_nr, double u_wf) { return jain_index(u_nr, u_wf); }

}  // namespace coex
