#include "qforest/forest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "qforest/error.hpp"
#include "qforest/seed.hpp"
#include "qforest/worker_pool.hpp"

namespace qforest::forest {

std::size_t tree_count(std::size_t m, int nq) {
  if (m < 1) throw ConfigError("feature count must be >= 1");
  if (nq < 1) throw ConfigError("qubit count must be >= 1");
  const std::size_t cap = 3 * static_cast<std::size_t>(nq);
  return (m + cap - 1) / cap;
}

void FeaturePartition::validate() const {
  const std::size_t cap = 3 * static_cast<std::size_t>(nq);
  if (groups.size() != tree_count(m, nq)) throw StructuralError("partition has wrong tree count");
  std::set<std::size_t> seen;
  for (const auto& g : groups) {
    if (g.empty()) throw StructuralError("partition has an empty group");
    if (g.size() > cap) throw StructuralError("partition group exceeds 3*nq features");
    if (!std::is_sorted(g.begin(), g.end())) throw StructuralError("partition group is not sorted");
    for (std::size_t i : g) {
      if (i >= m) throw StructuralError("partition index out of range");
      if (!seen.insert(i).second) throw StructuralError("partition groups overlap");
    }
  }
  if (seen.size() != m) throw StructuralError("partition does not cover every feature");
}

FeaturePartition partition_features(std::size_t m, int nq, std::uint64_t seed, ChunkPolicy policy) {
  const std::size_t d = tree_count(m, nq);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> sizes(d);
  if (policy == ChunkPolicy::Balanced) {
    for (std::size_t i = 0; i < d; ++i) sizes[i] = m / d + (i < m % d ? 1 : 0);
  } else {
    const std::size_t chunk = (m + d - 1) / d;
    std::size_t remaining = m;
    for (std::size_t i = 0; i < d; ++i) {
      // Leave at least one feature for every later group.
      sizes[i] = std::min(chunk, remaining - (d - 1 - i));
      remaining -= sizes[i];
    }
  }

  FeaturePartition p{m, nq, {}};
  std::size_t pos = 0;
  for (std::size_t size : sizes) {
    std::vector<std::size_t> g(order.begin() + static_cast<std::ptrdiff_t>(pos),
                               order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(g.begin(), g.end());
    p.groups.push_back(std::move(g));
    pos += size;
  }
  return p;
}

void HqrfModel::validate() const {
  partition.validate();
  if (trees.size() != partition.num_trees()) throw StructuralError("forest tree count does not match partition");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    trees[i].check_shapes();
    if (trees[i].in_dim() != partition.groups[i].size()) {
      throw StructuralError("tree " + std::to_string(i) + " input size does not match its feature group");
    }
    if (trees[i].nq != nq || trees[i].layers != layers) throw StructuralError("tree architecture mismatch");
  }
}

std::uint64_t tree_seed(std::uint64_t master, std::size_t index) {
  // Tree 0 keeps the master seed, so a one-tree forest is exactly the plain HQNN.
  return index == 0 ? master : derive_seed(master, {seed_tag::kTree, index});
}

HqrfModel train_forest(const data::Dataset& dataset, FeaturePartition partition, int layers,
                       const hqnn::TrainConfig& config, unsigned threads, hqnn::Entangler entangler) {
  config.validate();
  if (partition.m != dataset.num_features) throw StructuralError("partition size does not match dataset features");
  partition.validate();

  HqrfModel forest;
  forest.nq = partition.nq;
  forest.layers = layers;
  forest.trees.resize(partition.num_trees());
  parallel_for(partition.num_trees(), threads, [&](std::size_t i) {
    try {
      hqnn::TrainConfig tree_config = config;
      tree_config.seed = tree_seed(config.seed, i);
      forest.trees[i] =
          hqnn::train(dataset.project(partition.groups[i]), partition.nq, layers, tree_config, entangler).model;
    } catch (const ConfigError& e) {
      throw ConfigError("tree " + std::to_string(i) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("tree " + std::to_string(i) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("tree " + std::to_string(i) + ": " + e.what());
    }
  });
  forest.partition = std::move(partition);
  return forest;
}

HqrfModel train_forest(const data::Dataset& dataset, int nq, int layers, const hqnn::TrainConfig& config,
                       const ForestTrainOptions& options) {
  return train_forest(dataset, partition_features(dataset.num_features, nq, options.partition_seed, options.policy),
                      layers, config, options.threads, options.entangler);
}

double aggregate_scores(std::span<const double> tree_scores) {
  if (tree_scores.empty()) throw StructuralError("cannot aggregate zero tree scores");
  double sum = 0.0;
  for (double s : tree_scores) sum += s;
  return sum / static_cast<double>(tree_scores.size());
}

ForestPrediction predict(const HqrfModel& model, std::span<const double> features) {
  if (features.size() != model.partition.m) {
    throw StructuralError("forest expects " + std::to_string(model.partition.m) + " features, got " +
                          std::to_string(features.size()));
  }
  std::vector<double> tree_scores;
  tree_scores.reserve(model.trees.size());
  std::vector<double> slice;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    slice.clear();
    for (std::size_t i : model.partition.groups[t]) slice.push_back(features[i]);
    tree_scores.push_back(hqnn::forward(model.trees[t], slice).score);
  }
  const double score = aggregate_scores(tree_scores);
  return {score, score >= 0.5 ? 1 : 0};
}

std::vector<double> predict_scores(const HqrfModel& model, const data::Dataset& dataset) {
  if (dataset.num_features != model.partition.m) throw StructuralError("forest feature count mismatch");
  std::vector<std::vector<double>> per_tree;
  per_tree.reserve(model.trees.size());
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    per_tree.push_back(hqnn::predict_scores(model.trees[t], dataset.project(model.partition.groups[t])));
  }
  std::vector<double> scores(dataset.size());
  std::vector<double> votes(model.trees.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t t = 0; t < model.trees.size(); ++t) votes[t] = per_tree[t][i];
    scores[i] = aggregate_scores(votes);
  }
  return scores;
}

std::string to_string(ChunkPolicy p) { return p == ChunkPolicy::Balanced ? "balanced" : "paper-5-5-3"; }

ChunkPolicy chunk_policy_from_string(const std::string& s) {
  if (s == "balanced") return ChunkPolicy::Balanced;
  if (s == "paper-5-5-3") return ChunkPolicy::CeilFill;
  throw ConfigError("unknown partition policy '" + s + "' (expected balanced or paper-5-5-3)");
}

nlohmann::json to_json(const HqrfModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) trees.push_back(hqnn::to_json(t));
  return {{"format", "qforest-hqrf"},
          {"version", kForestSchemaVersion},
          {"features", model.partition.m},
          {"qubits", model.nq},
          {"layers", model.layers},
          {"groups", model.partition.groups},
          {"trees", trees}};
}

HqrfModel forest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "qforest-hqrf") throw StructuralError("not an HQRF model document");
    const int version = j.at("version").get<int>();
    if (version != kForestSchemaVersion) throw StructuralError("unsupported forest schema version " + std::to_string(version));
    HqrfModel f;
    f.nq = j.at("qubits").get<int>();
    f.layers = j.at("layers").get<int>();
    f.partition.m = j.at("features").get<std::size_t>();
    f.partition.nq = f.nq;
    f.partition.groups = j.at("groups").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& t : j.at("trees")) f.trees.push_back(hqnn::model_from_json(t));
    f.validate();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed forest document: ") + e.what());
  }
}

void save_forest(const std::filesystem::path& path, const HqrfModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(model).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

HqrfModel load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return forest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("forest file is not valid JSON: ") + e.what());
  }
}

}  // namespace qforest::forest
