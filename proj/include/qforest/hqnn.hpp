#pragma once

// Hybrid quantum neural network.
//
//   features --dense(tanh)--> 3*nq encoding angles
//            --L re-uploading blocks on nq qubits--> <Z_0> .. <Z_{nq-1}>
//            --dense(linear)--> 2 logits --softmax--> P(class 1)
//
// Each block applies Ry Rz Rz on every qubit bound to the encoding angles, a
// CNOT entangler, Ry Rz Rz bound to that block's variational angles, and the
// entangler again. The encoding angles are shared by all blocks.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qforest/dataset.hpp"
#include "qforest/nn.hpp"
#include "qforest/qsim.hpp"
#include "json.hpp"

namespace qforest::hqnn {

enum class Entangler { Chain, Ring };

/// CNOT(q, q+1) for q = 0..nq-2; Ring also closes with CNOT(nq-1, 0) when nq >= 3.
qsim::Circuit build_circuit(int nq, int layers, Entangler entangler = Entangler::Chain);

/// Angle slot of encoding angle k (0..2) on qubit q.
constexpr std::size_t encoding_slot(int q, int k) { return static_cast<std::size_t>(3 * q + k); }
/// Angle slot of variational angle k on qubit q in block `layer`.
constexpr std::size_t variational_slot(int nq, int layer, int q, int k) {
  return static_cast<std::size_t>(3 * nq + 3 * nq * layer + 3 * q + k);
}

struct TrainConfig {
  int epochs = 100;
  int batch_size = 16;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HqnnModel {
  int nq = 0;
  int layers = 0;
  Entangler entangler = Entangler::Chain;
  nn::DenseLayer front;              ///< in -> 3*nq, tanh
  std::vector<double> variational;   ///< 3*nq*layers, block-major
  nn::DenseLayer head;               ///< nq -> 2, linear

  /// All parameters zero: the model outputs exactly 0.5 for every input.
  static HqnnModel zeros(std::size_t in_dim, int nq, int layers, Entangler entangler = Entangler::Chain);
  /// Seeded initialisation: dense weights uniform(-0.5,0.5)/sqrt(in), zero
  /// biases, variational angles uniform(-pi, pi).
  static HqnnModel random(std::size_t in_dim, int nq, int layers, std::uint64_t seed,
                          Entangler entangler = Entangler::Chain);

  std::size_t in_dim() const noexcept { return front.in_dim(); }
  std::size_t num_params() const noexcept;
  void check_shapes() const;

  /// Flat parameter order: front weights, front bias, variational, head weights, head bias.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  bool operator==(const HqnnModel&) const = default;
};

struct Prediction {
  std::array<double, 2> probs;
  double score;  ///< probs[1]
};

/// Evaluates with a prebuilt circuit for (nq, layers); avoids rebuilding it per sample.
class Evaluator {
 public:
  explicit Evaluator(const HqnnModel& model);

  Prediction forward(std::span<const double> features) const;

  const HqnnModel& model() const noexcept { return *model_; }
  const qsim::Circuit& circuit() const noexcept { return circuit_; }

 private:
  const HqnnModel* model_;
  qsim::Circuit circuit_;
};

Prediction forward(const HqnnModel& model, std::span<const double> features);

struct Gradient {
  nn::DenseGrad front;
  std::vector<double> variational;
  nn::DenseGrad head;
  double loss = 0.0;
  std::array<double, 2> probs{};

  /// Same order as HqnnModel::flatten.
  std::vector<double> flatten() const;
};

/// Exact gradient of the cross-entropy loss for one sample. Throws
/// NumericError (with a parameter dump) if anything non-finite appears.
Gradient backward(const HqnnModel& model, std::span<const double> features, int label);
Gradient backward(const Evaluator& eval, std::span<const double> features, int label);

/// Mean loss over `data` for the given model.
double mean_loss(const HqnnModel& model, const data::Dataset& data);

struct TrainResult {
  HqnnModel model;
  std::vector<double> epoch_losses;
};

/// Mini-batch training with Adam. The dataset must be non-empty and contain
/// both classes.
TrainResult train(const data::Dataset& dataset, int nq, int layers, const TrainConfig& config,
                  Entangler entangler = Entangler::Chain);

/// Trains from a given starting model instead of a fresh initialisation.
TrainResult train_from(HqnnModel model, const data::Dataset& dataset, const TrainConfig& config);

std::vector<double> predict_scores(const HqnnModel& model, std::span<const data::Sample> samples);
std::vector<double> predict_scores(const HqnnModel& model, const data::Dataset& dataset);

// --- persistence ---------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json to_json(const HqnnModel& model);
HqnnModel model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const HqnnModel& model);
HqnnModel load_model(const std::filesystem::path& path);

std::string to_string(Entangler e);
Entangler entangler_from_string(const std::string& s);

}  // namespace qforest::hqnn
