#pragma once

// Experiment grids: every (qubits, layers) cell is trained and scored for each
// run and fold, then summarised per cell.
//
// Seed chain (all via derive_seed):
//   split     = derive(master, {kSplit, run})        (run -> 0 with fixed_folds)
//   model     = derive(master, {kModel, qubits, layers, run, fold})
//   partition = derive(master, {kPartition, qubits, run})           (HQRF only)
// Tree seeds then follow forest::tree_seed(model, tree).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qforest/dataset.hpp"
#include "qforest/forest.hpp"
#include "qforest/hqnn.hpp"
#include "qforest/metrics.hpp"
#include "json.hpp"

namespace qforest::runner {

enum class ModelKind { Hqnn, Hqrf };
enum class Protocol { Cv10, Split70 };
enum class Imputation {
  /// Group medians over the whole dataset, before splitting.
  Paper,
  /// Group medians from the training rows only; test rows get the pooled
  /// training median so their labels are never consulted.
  TrainOnly,
};

struct ExperimentConfig {
  std::string dataset = "cleveland";
  /// Dataset file; empty selects the default file for `dataset`.
  std::filesystem::path data_path;
  ModelKind model = ModelKind::Hqnn;
  std::vector<int> qubits{2, 3, 4};
  std::vector<int> layers{1, 2, 3, 4};
  Protocol protocol = Protocol::Cv10;
  int runs = 10;
  std::uint64_t seed = 0;
  hqnn::TrainConfig train;
  bool standardize = true;
  Imputation imputation = Imputation::Paper;
  forest::ChunkPolicy partition = forest::ChunkPolicy::Balanced;
  hqnn::Entangler entangler = hqnn::Entangler::Chain;
  bool fixed_folds = false;
  /// Record wall-clock seconds. Off by default so reports are reproducible.
  bool record_timing = false;
  /// Worker threads; never affects results.
  unsigned threads = 1;

  void validate() const;
  std::size_t folds() const noexcept { return protocol == Protocol::Cv10 ? 10 : 1; }

  bool operator==(const ExperimentConfig&) const = default;
};

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  bool operator==(const Stats&) const = default;
};

Stats summarize(const std::vector<double>& values);

struct TaskRecord {
  int run = 0;
  int fold = 0;
  std::optional<std::string> error;
  double train_auc = 0.0;
  double test_auc = 0.0;
  metrics::ConfusionMatrix confusion;  ///< test set at threshold 0.5
  metrics::SummaryMetrics summary;
  double seconds = 0.0;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
  /// Feature groups used by an HQRF task.
  std::vector<std::vector<std::size_t>> partition;

  bool operator==(const TaskRecord&) const = default;
};

struct CellReport {
  int qubits = 0;
  int layers = 0;
  std::vector<TaskRecord> tasks;  ///< run-major, then fold
  std::optional<std::string> error;
  Stats train_auc;
  Stats test_auc;
  metrics::ConfusionMatrix confusion;  ///< pooled over tasks
  metrics::SummaryMetrics summary;
  double seconds = 0.0;

  bool operator==(const CellReport&) const = default;
};

struct GridReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;  ///< qubits-major, then layers, in config order

  /// Highest mean test AUC among cells without errors.
  const CellReport* best_cell() const;
  bool any_failed() const;

  bool operator==(const GridReport&) const = default;
};

struct TaskProgress {
  int qubits;
  int layers;
  int run;
  int fold;
  const TaskRecord* record;
};
using ProgressFn = std::function<void(const TaskProgress&)>;

/// Default file path for "cleveland" / "statlog" under `data_dir`.
std::filesystem::path default_data_path(const std::string& dataset, const std::filesystem::path& data_dir);
/// QFOREST_DATA_DIR from the environment, else the directory configured at build time.
std::filesystem::path default_data_dir();

/// Loads the configured dataset. With Imputation::TrainOnly missing cells stay NaN.
data::Dataset load_experiment_data(const ExperimentConfig& config);

GridReport run_grid(const ExperimentConfig& config, const ProgressFn& progress = {});
/// As above with an already loaded dataset.
GridReport run_grid(const ExperimentConfig& config, const data::Dataset& dataset, const ProgressFn& progress = {});

// --- emission --------------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Json, Csv, Table };

nlohmann::json to_json(const GridReport& report);
GridReport report_from_json(const nlohmann::json& j);

std::string render_csv(const GridReport& report);
std::string render_table(const GridReport& report);

/// Writes <stem>.json / <stem>.csv / <stem>.txt into `out_dir` for the
/// requested formats, plus one ROC file per task of the best cell. Returns the
/// files written.
std::vector<std::filesystem::path> emit_report(const GridReport& report, const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir);

std::string report_stem(const ExperimentConfig& config);

std::string to_string(ModelKind m);
std::string to_string(Protocol p);
std::string to_string(Imputation i);
ModelKind model_from_string(const std::string& s);
Protocol protocol_from_string(const std::string& s);
Imputation imputation_from_string(const std::string& s);
ReportFormat format_from_string(const std::string& s);

/// Command-line entry point. Exit codes: 0 success, 1 runtime or numeric
/// failure (including failed grid cells), 2 usage or configuration error,
/// 3 input/output or ingest error.
int cli_main(int argc, const char* const* argv);

}  // namespace qforest::runner
