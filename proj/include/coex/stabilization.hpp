#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coex {

struct StabilizationCriterion {
  int window = 50;  ///< W, episodes in the moving mean
  double rel_tol = 0.05;
  int hold = 50;  ///< consecutive episodes the mean must stay near the baseline
};

std::vector<std::string> validate(const StabilizationCriterion& crit);

/// Moving means mu_t over episodes t-W+1..t, for t = W..n (1-based t;
/// element 0 is mu_W).
std::vector<double> moving_means(std::span<const double> rewards, int window);

/// First episode t* (1-based) such that, for the candidate start c = t*-hold+1,
/// |mu_t - mu_c| <= rel_tol |mu_c| for every t in c..t*. Candidates with
/// mu_c == 0 are skipped. Throws InsufficientData when fewer than
/// W + hold - 1 rewards are given.
std::optional<int> detect_stabilization(std::span<const double> rewards,
                                        const StabilizationCriterion& crit);

}  // namespace coex
