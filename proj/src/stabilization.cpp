#include "coex/stabilization.hpp"

#include <cmath>

#include "coex/error.hpp"

namespace coex {

std::vector<std::string> validate(const StabilizationCriterion& c) {
  std::vector<std::string> out;
  if (c.window < 2) out.push_back("stabilization.window must be >= 2");
  if (!(c.rel_tol > 0 && c.rel_tol < 1)) out.push_back("stabilization.rel_tol must be in (0, 1)");
  if (c.hold < 1) out.push_back("stabilization.hold must be >= 1");
  return out;
}

std::vector<double> moving_means(std::span<const double> rewards, int window) {
  std::vector<double> mu;
  const auto w = static_cast<std::size_t>(window);
  if (rewards.size() < w) return mu;
  mu.reserve(rewards.size() - w + 1);
  // Re-summed per window: no drift from a running sum.
  for (std::size_t end = w; end <= rewards.size(); ++end) {
    double sum = 0.0;
    for (std::size_t i = end - w; i < end; ++i) sum += rewards[i];
    mu.push_back(sum / static_cast<double>(w));
  }
  return mu;
}

std::optional<int> detect_stabilization(std::span<const double> rewards,
                                        const StabilizationCriterion& crit) {
  if (auto v = validate(crit); !v.empty()) throw ValidationError(std::move(v));
  const std::size_t need = static_cast<std::size_t>(crit.window + crit.hold - 1);
  if (rewards.size() < need) throw InsufficientData(rewards.size(), need);

  const std::vector<double> mu = moving_means(rewards, crit.window);
  const std::size_t hold = static_cast<std::size_t>(crit.hold);
  for (std::size_t c = 0; c + hold <= mu.size(); ++c) {
    const double base = mu[c];
    if (base == 0.0) continue;
    bool ok = true;
    for (std::size_t t = c; t < c + hold && ok; ++t)
      ok = std::abs(mu[t] - base) <= crit.rel_tol * std::abs(base);
    if (ok) return static_cast<int>(c + hold - 1) + crit.window;
  }
  return std::nullopt;
}

}  // namespace coex
