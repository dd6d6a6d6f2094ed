#include "qforest/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qforest/error.hpp"

namespace qforest::nn {

void init_uniform(DenseLayer& layer, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(layer.in_dim(), 1)));
  for (double& w : layer.weights.data) w = dist(rng) * scale;
  std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x) {
  if (x.size() != layer.in_dim()) {
    throw StructuralError("dense layer expects " + std::to_string(layer.in_dim()) + " inputs, got " +
                          std::to_string(x.size()));
  }
  std::vector<double> y(layer.out_dim());
  for (std::size_t r = 0; r < layer.out_dim(); ++r) {
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < layer.in_dim(); ++c) acc += layer.weights(r, c) * x[c];
    y[r] = layer.activation == Activation::TANH ? std::tanh(acc) : acc;
  }
  return y;
}

DenseGrad zero_grad(const DenseLayer& layer) {
  return {Matrix(layer.out_dim(), layer.in_dim(), 0.0), std::vector<double>(layer.out_dim(), 0.0)};
}

std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> x, std::span<const double> y,
                                   std::span<const double> dy, DenseGrad& grad) {
  if (x.size() != layer.in_dim() || y.size() != layer.out_dim() || dy.size() != layer.out_dim()) {
    throw StructuralError("dense_backward shape mismatch");
  }
  std::vector<double> dx(layer.in_dim(), 0.0);
  for (std::size_t r = 0; r < layer.out_dim(); ++r) {
    // tanh'(a) = 1 - tanh(a)^2
    const double dpre = layer.activation == Activation::TANH ? dy[r] * (1.0 - y[r] * y[r]) : dy[r];
    grad.bias[r] += dpre;
    for (std::size_t c = 0; c < layer.in_dim(); ++c) {
      grad.weights(r, c) += dpre * x[c];
      dx[c] += layer.weights(r, c) * dpre;
    }
  }
  return dx;
}

SoftmaxXent softmax_xent(std::span<const double> logits, int label) {
  if (logits.size() != 2) throw StructuralError("softmax_xent expects two logits");
  if (label != 0 && label != 1) throw StructuralError("label must be 0 or 1");
  if (!std::isfinite(logits[0]) || !std::isfinite(logits[1])) throw NumericError("non-finite logits");
  const double hi = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - hi);
  const double e1 = std::exp(logits[1] - hi);
  const double log_z = hi + std::log(e0 + e1);
  SoftmaxXent out;
  out.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
  out.loss = log_z - logits[static_cast<std::size_t>(label)];
  out.dlogits = {out.probs[0] - (label == 0 ? 1.0 : 0.0), out.probs[1] - (label == 1 ? 1.0 : 0.0)};
  return out;
}

void optimizer_step(OptimizerState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw StructuralError("optimizer: parameter/gradient size mismatch");
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw StructuralError("optimizer: moment size mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("optimizer: non-finite gradient at index " + std::to_string(i) + " (step " +
                         std::to_string(state.step) + ")");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace qforest::nn
