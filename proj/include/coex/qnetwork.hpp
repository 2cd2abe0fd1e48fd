#pragma once

// Small fully-connected Q-network: rectifier hidden layers, linear output.
// Parameters live in one flat vector, layer by layer, each layer as its
// row-major weight matrix (out x in) followed by its bias vector.

#include <cstdint>
#include <span>
#include <vector>

namespace coex {

class QNetwork {
 public:
  /// All parameters zero. layer_sizes = {input, hidden..., output}.
  explicit QNetwork(std::vector<int> layer_sizes);

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static QNetwork initialized(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  double& weight(std::size_t layer, int out, int in);
  double weight(std::size_t layer, int out, int in) const;
  double& bias(std::size_t layer, int out);
  double bias(std::size_t layer, int out) const;

  /// Activations of one forward pass. activations[0] is the input,
  /// activations[l+1] the (post-rectifier) output of layer l.
  struct Workspace {
    std::vector<std::vector<double>> activations;
  };
  Workspace make_workspace() const;

  /// Forward pass into ws; returns the output activations.
  std::span<const double> forward(std::span<const double> input, Workspace& ws) const;

  std::vector<double> evaluate(std::span<const double> input) const;

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer];
  }

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Q-values for a scalar state.
std::vector<double> q_forward(const QNetwork& net, double s);

/// Minibatch of TD regression targets: states, taken actions, targets.
struct TdBatch {
  std::span<const double> states;
  std::span<const int> actions;
  std::span<const double> targets;
};

namespace serial {
/// Mean squared TD error over the batch and its gradient w.r.t. all
/// parameters (targets are constants). grad must be parameter_count() long.
double td_loss_gradient(const QNetwork& net, const TdBatch& batch, std::span<double> grad);
}  // namespace serial

namespace omp {
/// Same quantity as serial::td_loss_gradient; samples split across threads,
/// per-thread partial gradients summed in thread order.
double td_loss_gradient(const QNetwork& net, const TdBatch& batch, std::span<double> grad);
}  // namespace omp

}  // namespace coex
