#include <gtest/gtest.h>

#include <filesystem>

#include "fd.hpp"
#include "gen.hpp"
#include "qforest/error.hpp"
#include "qforest/hqnn.hpp"
#include "qforest/metrics.hpp"

namespace {

using namespace qforest;
using namespace qforest::hqnn;
using qforest::testing::vec;

std::size_t count_kind(const qsim::Circuit& c, qsim::GateKind k) {
  std::size_t n = 0;
  for (const auto& op : c.ops()) n += op.kind == k;
  return n;
}

std::vector<int> labels_of(const data::Dataset& d) {
  std::vector<int> l;
  for (const auto& s : d.samples) l.push_back(s.label);
  return l;
}

TEST(HqnnCircuit, GateCountsSmall) {
  const auto c = build_circuit(2, 1);
  EXPECT_EQ(c.num_angles(), 12U);
  EXPECT_EQ(c.ops().size(), 14U);
  EXPECT_EQ(count_kind(c, qsim::GateKind::CNOT), 2U);
  EXPECT_EQ(count_kind(c, qsim::GateKind::RY), 4U);
  EXPECT_EQ(count_kind(c, qsim::GateKind::RZ), 8U);
}

TEST(HqnnCircuit, GateCountsLarge) {
  const auto c = build_circuit(4, 4);
  EXPECT_EQ(c.num_angles(), 60U);
  EXPECT_EQ(count_kind(c, qsim::GateKind::CNOT), 4U * 2U * 3U);
  EXPECT_EQ(count_kind(c, qsim::GateKind::RY) + count_kind(c, qsim::GateKind::RZ), 4U * 2U * 12U);
}

TEST(HqnnCircuit, LayoutOfOneLayer) {
  const auto c = build_circuit(2, 1);
  const auto& ops = c.ops();
  // Encoding block: Ry, Rz, Rz per qubit on the shared input angles.
  EXPECT_EQ(ops[0].kind, qsim::GateKind::RY);
  EXPECT_EQ(*ops[0].angle_slot, encoding_slot(0, 0));
  EXPECT_EQ(ops[1].kind, qsim::GateKind::RZ);
  EXPECT_EQ(ops[2].kind, qsim::GateKind::RZ);
  EXPECT_EQ(*ops[5].angle_slot, encoding_slot(1, 2));
  EXPECT_EQ(ops[6].kind, qsim::GateKind::CNOT);
  EXPECT_EQ(*ops[6].control, 0);
  EXPECT_EQ(ops[6].target, 1);
  EXPECT_EQ(*ops[7].angle_slot, variational_slot(2, 0, 0, 0));
  EXPECT_EQ(ops[13].kind, qsim::GateKind::CNOT);
}

TEST(HqnnCircuit, EncodingAnglesAreReuploadedEveryLayer) {
  const auto c = build_circuit(3, 3);
  std::size_t uses = 0;
  for (const auto& op : c.ops()) uses += op.angle_slot == encoding_slot(1, 2);
  EXPECT_EQ(uses, 3U);
}

TEST(HqnnCircuit, RingAddsClosingCnot) {
  const auto chain = build_circuit(3, 1, Entangler::Chain);
  const auto ring = build_circuit(3, 1, Entangler::Ring);
  EXPECT_EQ(count_kind(ring, qsim::GateKind::CNOT), count_kind(chain, qsim::GateKind::CNOT) + 2);
}

TEST(HqnnModel, ZeroParametersGiveHalf) {
  const auto m = HqnnModel::zeros(13, 3, 2);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto x = vec(rng, 13, -3, 3);
    const auto p = forward(m, x);
    EXPECT_DOUBLE_EQ(p.score, 0.5);
    EXPECT_DOUBLE_EQ(p.probs[0], 0.5);
  }
}

TEST(HqnnModel, ParameterCount) {
  const auto m = HqnnModel::random(13, 3, 2, 7);
  EXPECT_EQ(m.num_params(), 13U * 9 + 9 + 18 + 3 * 2 + 2);
  EXPECT_EQ(m.flatten().size(), m.num_params());
}

TEST(HqnnModel, FlattenRoundTrip) {
  auto m = HqnnModel::random(5, 2, 3, 9);
  const auto theta = m.flatten();
  auto other = HqnnModel::zeros(5, 2, 3);
  other.unflatten(theta);
  EXPECT_EQ(other, m);
  EXPECT_THROW(other.unflatten(std::vector<double>(theta.size() - 1)), StructuralError);
}

TEST(HqnnModel, RandomIsSeeded) {
  EXPECT_EQ(HqnnModel::random(6, 2, 2, 3), HqnnModel::random(6, 2, 2, 3));
  EXPECT_NE(HqnnModel::random(6, 2, 2, 3), HqnnModel::random(6, 2, 2, 4));
}

TEST(HqnnModel, ForwardRejectsWrongWidth) {
  const auto m = HqnnModel::random(4, 2, 1, 1);
  EXPECT_THROW(forward(m, std::vector<double>(3)), StructuralError);
}

TEST(HqnnProperty, BackwardMatchesFiniteDifference) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int nq = qforest::testing::uniform_int(rng, 1, 4);
    const int layers = qforest::testing::uniform_int(rng, 1, 3);
    const auto in = static_cast<std::size_t>(qforest::testing::uniform_int(rng, 1, 7));
    const auto model = HqnnModel::random(in, nq, layers, rng());
    const auto x = vec(rng, in, -2, 2);
    const int label = trial % 2;
    const auto g = backward(model, x, label);
    EXPECT_NEAR(g.loss, qforest::testing::hqnn_loss(model, x, label), 1e-12);
    EXPECT_LT(qforest::testing::relative_error(g.flatten(), qforest::testing::fd_gradient(model, x, label)), 1e-6)
        << "nq=" << nq << " layers=" << layers;
  }
}

TEST(HqnnProperty, RingGradientMatchesFiniteDifference) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = HqnnModel::random(4, 3, 2, rng(), Entangler::Ring);
    const auto x = vec(rng, 4);
    const auto g = backward(model, x, 1);
    EXPECT_LT(qforest::testing::relative_error(g.flatten(), qforest::testing::fd_gradient(model, x, 1)), 1e-6);
  }
}

TEST(HqnnTrain, LearnsSeparableData) {
  const auto ds = qforest::testing::separable(200, 4, 5);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 3;
  const auto result = train(ds, 2, 1, cfg);
  ASSERT_EQ(result.epoch_losses.size(), 60U);
  EXPECT_LT(result.epoch_losses.back(), result.epoch_losses.front());
  const double auc = metrics::roc_auc(predict_scores(result.model, ds), labels_of(ds)).auc;
  EXPECT_GE(auc, 0.95);
}

TEST(HqnnTrain, Deterministic) {
  const auto ds = qforest::testing::random_dataset(20, 20, 3, 8);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 42;
  const auto a = train(ds, 2, 2, cfg);
  const auto b = train(ds, 2, 2, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
  cfg.seed = 43;
  EXPECT_NE(train(ds, 2, 2, cfg).model, a.model);
}

TEST(HqnnTrain, RejectsBadConfig) {
  const auto ds = qforest::testing::random_dataset(10, 10, 3, 1);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(ds, 2, 1, cfg), ConfigError);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(train(ds, 2, 1, cfg), ConfigError);
  cfg = {};
  cfg.learning_rate = -1;
  EXPECT_THROW(train(ds, 2, 1, cfg), ConfigError);
  EXPECT_THROW(train(qforest::testing::random_dataset(10, 0, 3, 1), 2, 1, TrainConfig{}), ConfigError);
  EXPECT_THROW(train(data::Dataset{}, 2, 1, TrainConfig{}), ConfigError);
}

TEST(HqnnTrain, NonFiniteFeatureIsNumericError) {
  auto ds = qforest::testing::random_dataset(10, 10, 3, 1);
  ds.samples[0].features[1] = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(train(ds, 2, 1, cfg), NumericError);
}

TEST(HqnnPersistence, SaveLoadRoundTrip) {
  const auto m = HqnnModel::random(13, 3, 2, 77, Entangler::Ring);
  const auto path = std::filesystem::temp_directory_path() / "qforest_hqnn_roundtrip.json";
  save_model(path, m);
  const auto loaded = load_model(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded, m);
  std::mt19937_64 rng(2);
  const auto x = vec(rng, 13);
  EXPECT_EQ(forward(loaded, x).score, forward(m, x).score);
}

TEST(HqnnPersistence, RejectsForeignJson) {
  EXPECT_THROW(model_from_json(nlohmann::json{{"format", "other"}}), StructuralError);
  auto j = to_json(HqnnModel::random(3, 2, 1, 1));
  j["variational"] = std::vector<double>{1.0};
  EXPECT_THROW(model_from_json(j), StructuralError);
}

}  // namespace
