#include "coex/error.hpp"

namespace coex {

SolverFailure::SolverFailure(const std::string& what, std::vector<double> last_iterate,
                             double residual, long iterations)
    : Error(what + " (residual " + std::to_string(residual) + " after " +
            std::to_string(iterations) + " iterations)"),
      last_(std::move(last_iterate)),
      residual_(residual),
      iterations_(iterations) {}

InsufficientData::InsufficientData(std::size_t have, std::size_t need)
    : Error("insufficient data: " + std::to_string(have) + " values, need at least " +
            std::to_string(need)) {}

namespace {
std::string join(const std::vector<std::string>& v) {
  std::string s = "validation failed:";
  for (const auto& x : v) s += "\n  - " + x;
  return s;
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

}  // namespace coex
