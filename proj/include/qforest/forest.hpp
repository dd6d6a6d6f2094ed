#pragma once

// Hybrid quantum random forest: the m input features are split into
// D = ceil(m / (3 nq)) disjoint groups and an independent HQNN is trained on
// each group. The forest score is the mean of the per-tree P(class 1).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qforest/dataset.hpp"
#include "qforest/hqnn.hpp"
#include "json.hpp"

namespace qforest::forest {

enum class ChunkPolicy {
  /// Group sizes differ by at most one (13 features, nq=2: 5/4/4).
  Balanced,
  /// ceil(m/D) per group with the remainder last (13 features, nq=2: 5/5/3).
  CeilFill,
};

std::size_t tree_count(std::size_t m, int nq);

struct FeaturePartition {
  std::size_t m = 0;
  int nq = 0;
  /// Sorted feature indices per tree.
  std::vector<std::vector<std::size_t>> groups;

  std::size_t num_trees() const noexcept { return groups.size(); }
  /// Throws StructuralError if any partition invariant is violated.
  void validate() const;

  bool operator==(const FeaturePartition&) const = default;
};

/// Seeded shuffle of 0..m-1 split into contiguous chunks; indices within each
/// group are then sorted.
FeaturePartition partition_features(std::size_t m, int nq, std::uint64_t seed,
                                    ChunkPolicy policy = ChunkPolicy::Balanced);

struct HqrfModel {
  FeaturePartition partition;
  std::vector<hqnn::HqnnModel> trees;
  int nq = 0;
  int layers = 0;

  void validate() const;
  bool operator==(const HqrfModel&) const = default;
};

/// Seed handed to tree `index` for a forest trained with `master`. Tree 0
/// receives `master` itself.
std::uint64_t tree_seed(std::uint64_t master, std::size_t index);

struct ForestTrainOptions {
  ChunkPolicy policy = ChunkPolicy::Balanced;
  /// Seed for the feature shuffle.
  std::uint64_t partition_seed = 0;
  /// Worker threads for tree training; 1 trains sequentially.
  unsigned threads = 1;
  hqnn::Entangler entangler = hqnn::Entangler::Chain;
};

/// Trains one HQNN per feature group. Tree i uses TrainConfig::seed =
/// tree_seed(config.seed, i). Errors from a tree are rethrown annotated with
/// the tree index.
HqrfModel train_forest(const data::Dataset& dataset, int nq, int layers, const hqnn::TrainConfig& config,
                       const ForestTrainOptions& options = {});

/// Trains with an explicit partition.
HqrfModel train_forest(const data::Dataset& dataset, FeaturePartition partition, int layers,
                       const hqnn::TrainConfig& config, unsigned threads = 1,
                       hqnn::Entangler entangler = hqnn::Entangler::Chain);

/// Soft vote: arithmetic mean of per-tree scores.
double aggregate_scores(std::span<const double> tree_scores);

struct ForestPrediction {
  double score;
  int label;  ///< 1 iff score >= 0.5
};

ForestPrediction predict(const HqrfModel& model, std::span<const double> features);
std::vector<double> predict_scores(const HqrfModel& model, const data::Dataset& dataset);

inline constexpr int kForestSchemaVersion = 1;

nlohmann::json to_json(const HqrfModel& model);
HqrfModel forest_from_json(const nlohmann::json& j);
void save_forest(const std::filesystem::path& path, const HqrfModel& model);
HqrfModel load_forest(const std::filesystem::path& path);

std::string to_string(ChunkPolicy p);
ChunkPolicy chunk_policy_from_string(const std::string& s);

}  // namespace qforest::forest
