#include "coex/qnetwork.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "coex/rng.hpp"

namespace coex {

QNetwork::QNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("QNetwork needs at least two layer sizes");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("QNetwork layer sizes must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
}

QNetwork QNetwork::initialized(std::vector<int> layer_sizes, std::uint64_t seed) {
  QNetwork net(std::move(layer_sizes));
  Rng rng(splitmix64(seed));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    const std::size_t begin = net.offsets_[l];
    const std::size_t end = begin + static_cast<std::size_t>(net.sizes_[l + 1]) * (net.sizes_[l] + 1);
    for (std::size_t i = begin; i < end; ++i) net.params_[i] = (2.0 * uniform_unit(rng) - 1.0) * bound;
  }
  return net;
}

double& QNetwork::weight(std::size_t layer, int out, int in) {
  return params_[offsets_[layer] + static_cast<std::size_t>(out) * sizes_[layer] + in];
}
double QNetwork::weight(std::size_t layer, int out, int in) const {
  return params_[offsets_[layer] + static_cast<std::size_t>(out) * sizes_[layer] + in];
}
double& QNetwork::bias(std::size_t layer, int out) { return params_[bias_offset(layer) + out]; }
double QNetwork::bias(std::size_t layer, int out) const { return params_[bias_offset(layer) + out]; }

QNetwork::Workspace QNetwork::make_workspace() const {
  Workspace ws;
  ws.activations.reserve(sizes_.size());
  for (int s : sizes_) ws.activations.emplace_back(static_cast<std::size_t>(s), 0.0);
  return ws;
}

std::span<const double> QNetwork::forward(std::span<const double> input, Workspace& ws) const {
  std::copy(input.begin(), input.end(), ws.activations[0].begin());
  const std::size_t layers = layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const int n_in = sizes_[l];
    const int n_out = sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + static_cast<std::size_t>(n_out) * n_in;
    const double* x = ws.activations[l].data();
    double* y = ws.activations[l + 1].data();
    const bool hidden = l + 1 < layers;
    for (int o = 0; o < n_out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * n_in;
      double acc = b[o];
      for (int i = 0; i < n_in; ++i) acc += row[i] * x[i];
      y[o] = hidden ? std::max(acc, 0.0) : acc;
    }
  }
  return ws.activations.back();
}

std::vector<double> QNetwork::evaluate(std::span<const double> input) const {
  Workspace ws = make_workspace();
  const auto out = forward(input, ws);
  return {out.begin(), out.end()};
}

std::vector<double> q_forward(const QNetwork& net, double s) {
  const double in[1] = {s};
  return net.evaluate(in);
}

namespace {

// Accumulates d(loss)/d(params) of one sample into grad; returns its squared error.
double accumulate_sample(const QNetwork& net, double state, int action, double target,
                         double scale, QNetwork::Workspace& ws, std::vector<double>& delta,
                         std::vector<double>& delta_prev, std::span<double> grad) {
  const double in[1] = {state};
  const auto q = net.forward(std::span<const double>(in, 1), ws);
  const double err = target - q[action];

  const auto& sizes = net.layer_sizes();
  const std::size_t layers = net.layer_count();
  const auto params = net.parameters();

  delta.assign(static_cast<std::size_t>(sizes.back()), 0.0);
  delta[action] = -2.0 * err * scale;

  for (std::size_t l = layers; l-- > 0;) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    const double* x = ws.activations[l].data();
    double* gw = grad.data() + net.weight_offset(l);
    double* gb = grad.data() + net.bias_offset(l);
    for (int o = 0; o < n_out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* grow = gw + static_cast<std::size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) grow[i] += d * x[i];
    }
    if (l == 0) break;
    // Back through the weights, then the rectifier of the previous layer.
    delta_prev.assign(static_cast<std::size_t>(n_in), 0.0);
    const double* w = params.data() + net.weight_offset(l);
    for (int o = 0; o < n_out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) delta_prev[i] += row[i] * d;
    }
    for (int i = 0; i < n_in; ++i)
      if (x[i] <= 0.0) delta_prev[i] = 0.0;
    delta.swap(delta_prev);
  }
  return err * err;
}

}  // namespace

namespace serial {
double td_loss_gradient(const QNetwork& net, const TdBatch& batch, std::span<double> grad) {
  if (net.input_size() != 1) throw std::invalid_argument("td_loss_gradient: scalar-state network expected");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n = batch.states.size();
  if (n == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  QNetwork::Workspace ws = net.make_workspace();
  std::vector<double> delta, delta_prev;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sse += accumulate_sample(net, batch.states[i], batch.actions[i], batch.targets[i], scale, ws,
                             delta, delta_prev, grad);
  return sse * scale;
}
}  // namespace serial

namespace omp {
double td_loss_gradient(const QNetwork& net, const TdBatch& batch, std::span<double> grad) {
  if (net.input_size() != 1) throw std::invalid_argument("td_loss_gradient: scalar-state network expected");
  std::fill(grad.begin(), grad.end(), 0.0);
  const long n = static_cast<long>(batch.states.size());
  if (n == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  const int threads = omp_get_max_threads();
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(threads));
  std::vector<double> partial_sse(static_cast<std::size_t>(threads), 0.0);

#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    auto& g = partial[t];
    g.assign(grad.size(), 0.0);
    QNetwork::Workspace ws = net.make_workspace();
    std::vector<double> delta, delta_prev;
    double sse = 0.0;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i)
      sse += accumulate_sample(net, batch.states[i], batch.actions[i], batch.targets[i], scale,
                               ws, delta, delta_prev, g);
    partial_sse[t] = sse;
  }

  double sse = 0.0;
  for (int t = 0; t < threads; ++t) {
    sse += partial_sse[t];
    const auto& g = partial[t];
    if (g.empty()) continue;
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += g[k];
  }
  return sse * scale;
}
}  // namespace omp

}  // namespace coex
