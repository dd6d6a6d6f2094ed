#include "qforest/hqnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "qforest/error.hpp"
#include "qforest/seed.hpp"

namespace qforest::hqnn {

namespace {

void append_entangler(std::vector<qsim::GateOp>& ops, int nq, Entangler entangler) {
  for (int q = 0; q + 1 < nq; ++q) ops.push_back(qsim::GateOp::cnot(q, q + 1));
  if (entangler == Entangler::Ring && nq >= 3) ops.push_back(qsim::GateOp::cnot(nq - 1, 0));
}

void append_rotations(std::vector<qsim::GateOp>& ops, int nq, std::size_t first_slot) {
  for (int q = 0; q < nq; ++q) {
    const std::size_t base = first_slot + static_cast<std::size_t>(3 * q);
    ops.push_back(qsim::GateOp::ry(q, base));
    ops.push_back(qsim::GateOp::rz(q, base + 1));
    ops.push_back(qsim::GateOp::rz(q, base + 2));
  }
}

std::vector<double> circuit_angles(const HqnnModel& model, std::span<const double> encoding) {
  std::vector<double> angles;
  angles.reserve(encoding.size() + model.variational.size());
  angles.insert(angles.end(), encoding.begin(), encoding.end());
  angles.insert(angles.end(), model.variational.begin(), model.variational.end());
  return angles;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

[[noreturn]] void throw_numeric(const HqnnModel& model, const std::string& where) {
  throw NumericError("non-finite value in " + where + "; parameters: " + to_json(model).dump());
}

void append(std::vector<double>& out, const nn::DenseGrad& g) {
  out.insert(out.end(), g.weights.data.begin(), g.weights.data.end());
  out.insert(out.end(), g.bias.begin(), g.bias.end());
}

void check_training_data(const data::Dataset& dataset, std::size_t in_dim) {
  if (dataset.empty()) throw ConfigError("training set is empty");
  const auto counts = dataset.class_counts();
  if (counts[0] == 0 || counts[1] == 0) throw ConfigError("training set contains a single class");
  if (dataset.num_features != in_dim) {
    throw StructuralError("model expects " + std::to_string(in_dim) + " features, dataset has " +
                          std::to_string(dataset.num_features));
  }
  if (dataset.has_unimputed_cells()) throw NumericError("training set contains unimputed cells");
}

}  // namespace

qsim::Circuit build_circuit(int nq, int layers, Entangler entangler) {
  if (layers < 1) throw ConfigError("layer count must be >= 1");
  const std::size_t per_block = static_cast<std::size_t>(3 * nq);
  std::vector<qsim::GateOp> ops;
  for (int layer = 0; layer < layers; ++layer) {
    append_rotations(ops, nq, 0);
    append_entangler(ops, nq, entangler);
    append_rotations(ops, nq, per_block + per_block * static_cast<std::size_t>(layer));
    append_entangler(ops, nq, entangler);
  }
  return qsim::Circuit(nq, std::move(ops), per_block * static_cast<std::size_t>(layers + 1));
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

HqnnModel HqnnModel::zeros(std::size_t in_dim, int nq, int layers, Entangler entangler) {
  if (nq < qsim::kMinQubits || nq > qsim::kMaxQubits) throw ConfigError("unsupported qubit count " + std::to_string(nq));
  if (layers < 1) throw ConfigError("layer count must be >= 1");
  if (in_dim < 1) throw ConfigError("model needs at least one input feature");
  HqnnModel m;
  m.nq = nq;
  m.layers = layers;
  m.entangler = entangler;
  m.front = nn::DenseLayer(in_dim, static_cast<std::size_t>(3 * nq), nn::Activation::TANH);
  m.variational.assign(static_cast<std::size_t>(3 * nq * layers), 0.0);
  m.head = nn::DenseLayer(static_cast<std::size_t>(nq), 2, nn::Activation::LINEAR);
  return m;
}

HqnnModel HqnnModel::random(std::size_t in_dim, int nq, int layers, std::uint64_t seed, Entangler entangler) {
  HqnnModel m = zeros(in_dim, nq, layers, entangler);
  std::mt19937_64 rng(seed);
  nn::init_uniform(m.front, rng);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (double& v : m.variational) v = angle(rng);
  nn::init_uniform(m.head, rng);
  return m;
}

std::size_t HqnnModel::num_params() const noexcept {
  return front.num_params() + variational.size() + head.num_params();
}

void HqnnModel::check_shapes() const {
  const auto nqs = static_cast<std::size_t>(nq);
  if (front.out_dim() != 3 * nqs || front.bias.size() != 3 * nqs || front.weights.data.size() != 3 * nqs * front.in_dim())
    throw StructuralError("front layer shape inconsistent with qubit count");
  if (variational.size() != 3 * nqs * static_cast<std::size_t>(layers))
    throw StructuralError("variational vector length inconsistent with qubits and layers");
  if (head.in_dim() != nqs || head.out_dim() != 2 || head.bias.size() != 2 || head.weights.data.size() != 2 * nqs)
    throw StructuralError("head layer shape inconsistent with qubit count");
  if (front.activation != nn::Activation::TANH || head.activation != nn::Activation::LINEAR)
    throw StructuralError("unexpected layer activations");
}

std::vector<double> HqnnModel::flatten() const {
  std::vector<double> p;
  p.reserve(num_params());
  p.insert(p.end(), front.weights.data.begin(), front.weights.data.end());
  p.insert(p.end(), front.bias.begin(), front.bias.end());
  p.insert(p.end(), variational.begin(), variational.end());
  p.insert(p.end(), head.weights.data.begin(), head.weights.data.end());
  p.insert(p.end(), head.bias.begin(), head.bias.end());
  return p;
}

void HqnnModel::unflatten(std::span<const double> p) {
  if (p.size() != num_params()) throw StructuralError("flat parameter vector has wrong length");
  auto it = p.begin();
  auto take = [&](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(front.weights.data);
  take(front.bias);
  take(variational);
  take(head.weights.data);
  take(head.bias);
}

std::vector<double> Gradient::flatten() const {
  std::vector<double> g;
  append(g, front);
  g.insert(g.end(), variational.begin(), variational.end());
  append(g, head);
  return g;
}

Evaluator::Evaluator(const HqnnModel& model)
    : model_(&model), circuit_(build_circuit(model.nq, model.layers, model.entangler)) {
  model.check_shapes();
}

Prediction Evaluator::forward(std::span<const double> features) const {
  const auto encoding = nn::dense_forward(model_->front, features);
  const auto angles = circuit_angles(*model_, encoding);
  const auto z = qsim::expect_z_all(qsim::run_circuit(circuit_, angles));
  const auto logits = nn::dense_forward(model_->head, z);
  // The label only affects the loss, not the probabilities.
  const auto sx = nn::softmax_xent(logits, 1);
  return {sx.probs, sx.probs[1]};
}

Prediction forward(const HqnnModel& model, std::span<const double> features) {
  return Evaluator(model).forward(features);
}

Gradient backward(const Evaluator& eval, std::span<const double> features, int label) {
  const HqnnModel& model = eval.model();
  const auto encoding = nn::dense_forward(model.front, features);
  const auto angles = circuit_angles(model, encoding);
  if (!all_finite(angles)) throw_numeric(model, "circuit angles");

  std::vector<double> z;
  const Matrix jac = qsim::grad_expectations(eval.circuit(), angles, z);
  const auto logits = nn::dense_forward(model.head, z);
  if (!all_finite(logits)) throw_numeric(model, "head logits");
  const auto sx = nn::softmax_xent(logits, label);

  Gradient g{nn::zero_grad(model.front), std::vector<double>(model.variational.size(), 0.0), nn::zero_grad(model.head),
             sx.loss, sx.probs};
  const auto dz = nn::dense_backward(model.head, z, logits, sx.dlogits, g.head);

  // dL/d(slot s) = sum_q dL/dz_q * dz_q/d(slot s)
  std::vector<double> dangles(jac.cols, 0.0);
  for (std::size_t q = 0; q < jac.rows; ++q) {
    for (std::size_t s = 0; s < jac.cols; ++s) dangles[s] += dz[q] * jac(q, s);
  }
  const std::size_t n_enc = encoding.size();
  std::copy(dangles.begin() + static_cast<std::ptrdiff_t>(n_enc), dangles.end(), g.variational.begin());
  nn::dense_backward(model.front, features, encoding, std::span(dangles).first(n_enc), g.front);

  if (!std::isfinite(g.loss) || !all_finite(g.flatten())) throw_numeric(model, "gradient");
  return g;
}

Gradient backward(const HqnnModel& model, std::span<const double> features, int label) {
  return backward(Evaluator(model), features, label);
}

double mean_loss(const HqnnModel& model, const data::Dataset& data) {
  if (data.empty()) return 0.0;
  const Evaluator eval(model);
  double total = 0.0;
  for (const auto& s : data.samples) {
    const auto p = eval.forward(s.features);
    total += -std::log(p.probs[static_cast<std::size_t>(s.label)]);
  }
  return total / static_cast<double>(data.size());
}

TrainResult train(const data::Dataset& dataset, int nq, int layers, const TrainConfig& config, Entangler entangler) {
  config.validate();
  HqnnModel model =
      HqnnModel::random(dataset.num_features, nq, layers, derive_seed(config.seed, {seed_tag::kInit}), entangler);
  return train_from(std::move(model), dataset, config);
}

TrainResult train_from(HqnnModel model, const data::Dataset& dataset, const TrainConfig& config) {
  config.validate();
  model.check_shapes();
  check_training_data(dataset, model.in_dim());

  nn::OptimizerState opt;
  opt.lr = config.learning_rate;
  opt.beta1 = config.beta1;
  opt.beta2 = config.beta2;
  opt.eps = config.epsilon;

  std::mt19937_64 shuffle_rng(derive_seed(config.seed, {seed_tag::kShuffle}));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.epoch_losses.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<double> params = model.flatten();
  std::vector<double> grad_sum(params.size());
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
      const Evaluator eval(model);
      for (std::size_t i = start; i < stop; ++i) {
        const auto& s = dataset.samples[order[i]];
        const Gradient g = backward(eval, s.features, s.label);
        epoch_loss += g.loss;
        const auto flat = g.flatten();
        for (std::size_t k = 0; k < flat.size(); ++k) grad_sum[k] += flat[k];
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (double& v : grad_sum) v *= inv;
      nn::optimizer_step(opt, params, grad_sum);
      model.unflatten(params);
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  result.model = std::move(model);
  return result;
}

std::vector<double> predict_scores(const HqnnModel& model, std::span<const data::Sample> samples) {
  std::vector<double> scores;
  scores.reserve(samples.size());
  if (samples.empty()) return scores;
  const Evaluator eval(model);
  for (const auto& s : samples) scores.push_back(eval.forward(s.features).score);
  return scores;
}

std::vector<double> predict_scores(const HqnnModel& model, const data::Dataset& dataset) {
  return predict_scores(model, std::span<const data::Sample>(dataset.samples));
}

// --- persistence -----------------------------------------------------------------

std::string to_string(Entangler e) { return e == Entangler::Ring ? "ring" : "chain"; }

Entangler entangler_from_string(const std::string& s) {
  if (s == "chain") return Entangler::Chain;
  if (s == "ring") return Entangler::Ring;
  throw ConfigError("unknown entangler '" + s + "'");
}

namespace {

nlohmann::json layer_json(const nn::DenseLayer& l) {
  return {{"in", l.in_dim()},
          {"out", l.out_dim()},
          {"activation", l.activation == nn::Activation::TANH ? "tanh" : "linear"},
          {"weights", l.weights.data},
          {"bias", l.bias}};
}

nn::DenseLayer layer_from_json(const nlohmann::json& j) {
  const auto in = j.at("in").get<std::size_t>();
  const auto out = j.at("out").get<std::size_t>();
  const auto act = j.at("activation").get<std::string>();
  if (act != "tanh" && act != "linear") throw StructuralError("unknown activation '" + act + "'");
  nn::DenseLayer l(in, out, act == "tanh" ? nn::Activation::TANH : nn::Activation::LINEAR);
  l.weights.data = j.at("weights").get<std::vector<double>>();
  l.bias = j.at("bias").get<std::vector<double>>();
  if (l.weights.data.size() != in * out || l.bias.size() != out) throw StructuralError("layer arrays have wrong size");
  return l;
}

}  // namespace

nlohmann::json to_json(const HqnnModel& model) {
  return {{"format", "qforest-hqnn"},
          {"version", kModelSchemaVersion},
          {"qubits", model.nq},
          {"layers", model.layers},
          {"entangler", to_string(model.entangler)},
          {"front", layer_json(model.front)},
          {"variational", model.variational},
          {"head", layer_json(model.head)}};
}

HqnnModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "qforest-hqnn") throw StructuralError("not an HQNN model document");
    const int version = j.at("version").get<int>();
    if (version != kModelSchemaVersion) throw StructuralError("unsupported model schema version " + std::to_string(version));
    HqnnModel m;
    m.nq = j.at("qubits").get<int>();
    m.layers = j.at("layers").get<int>();
    m.entangler = entangler_from_string(j.at("entangler").get<std::string>());
    m.front = layer_from_json(j.at("front"));
    m.variational = j.at("variational").get<std::vector<double>>();
    m.head = layer_from_json(j.at("head"));
    m.check_shapes();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const HqnnModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(model).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

HqnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("model file is not valid JSON: ") + e.what());
  }
}

}  // namespace qforest::hqnn
