#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qforest/matrix.hpp"

namespace qforest::nn {

enum class Activation { TANH, LINEAR };

/// y = activation(W x + b), W is out x in.
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;
  Activation activation = Activation::LINEAR;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act)
      : weights(out, in, 0.0), bias(out, 0.0), activation(act) {}

  std::size_t in_dim() const noexcept { return weights.cols; }
  std::size_t out_dim() const noexcept { return weights.rows; }
  std::size_t num_params() const noexcept { return weights.data.size() + bias.size(); }

  bool operator==(const DenseLayer&) const = default;
};

struct DenseGrad {
  Matrix weights;
  std::vector<double> bias;
};

/// Uniform(-0.5, 0.5) / sqrt(in) weights, zero bias.
void init_uniform(DenseLayer& layer, std::mt19937_64& rng);

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x);

/// Backprop through one layer. `y` is the forward output for `x` and `dy` is
/// dL/dy. Accumulates into `grad` (same shapes as the layer) and returns dL/dx.
std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> x, std::span<const double> y,
                                   std::span<const double> dy, DenseGrad& grad);

DenseGrad zero_grad(const DenseLayer& layer);

struct SoftmaxXent {
  double loss;
  std::array<double, 2> probs;
  /// dloss/dlogits = probs - onehot(label).
  std::array<double, 2> dlogits;
};

/// Two-class softmax with cross-entropy, log-sum-exp stabilised.
SoftmaxXent softmax_xent(std::span<const double> logits, int label);

/// Adaptive-moment optimizer state for one flat parameter vector.
struct OptimizerState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update of `params` in place. Moments are sized on
/// first use. Throws NumericError on a non-finite gradient.
void optimizer_step(OptimizerState& state, std::span<double> params, std::span<const double> grads);

}  // namespace qforest::nn
