#pragma once

#include <functional>

namespace coex {

/// Jain index of two non-negative throughputs, in [0.5, 1].
/// Throws UndefinedFairness when both are zero.
double jain_index(double gamma_nr, double gamma_wf);

/// Normalized logarithmic utility: 0 at b_min, 1 at b_max.
struct UtilityModel {
  double b_min = 0.5;   ///< Mb/s
  double b_max = 60.0;  ///< Mb/s
  /// Throughput achieved at bandwidth b; identity unless replaced.
  std::function<double(double)> t_of_b = [](double b) { return b; };
};

inline constexpr double kUtilityFloor = 1e-3;

/// Raw utility, negative below b_min and above 1 past b_max.
/// Throws DomainError for x <= 0.
double utility(double x, const UtilityModel& model);

/// utility() clamped to [kUtilityFloor, 1]; x <= 0 maps to the floor.
double clamped_utility(double x, const UtilityModel& model);

/// Jain index over two utilities.
double utility_fairness(double u_nr, double u_wf);

}  // namespace coex
