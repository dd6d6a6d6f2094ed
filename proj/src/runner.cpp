#include "qforest/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>

#include <fmt/format.h>

#include "qforest/error.hpp"
#include "qforest/seed.hpp"
#include "qforest/worker_pool.hpp"

#ifndef QFOREST_DEFAULT_DATA_DIR
#define QFOREST_DEFAULT_DATA_DIR "data"
#endif

namespace qforest::runner {

namespace {

constexpr double kTrainFraction = 0.7;
constexpr double kThreshold = 0.5;

std::vector<int> labels_of(const data::Dataset& d) {
  std::vector<int> l;
  l.reserve(d.size());
  for (const auto& s : d.samples) l.push_back(s.label);
  return l;
}

struct TaskKey {
  std::size_t cell;
  int qubits;
  int layers;
  int run;
  int fold;
};

TaskRecord run_task(const ExperimentConfig& config, const data::Dataset& dataset, const data::Split& split,
                    const TaskKey& key) {
  const auto start = std::chrono::steady_clock::now();
  TaskRecord rec;
  rec.run = key.run;
  rec.fold = key.fold;

  data::Dataset train = dataset.subset(split.train);
  data::Dataset test = dataset.subset(split.test);
  if (config.imputation == Imputation::TrainOnly) {
    const auto medians = data::compute_medians(train);
    train = data::impute(std::move(train), medians, true);
    test = data::impute(std::move(test), medians, false);
  }
  if (config.standardize) {
    auto st = data::standardize(train, {test});
    train = std::move(st.train);
    test = std::move(st.others.front());
  }

  hqnn::TrainConfig tc = config.train;
  tc.seed = derive_seed(config.seed, {seed_tag::kModel, static_cast<std::uint64_t>(key.qubits),
                                      static_cast<std::uint64_t>(key.layers), static_cast<std::uint64_t>(key.run),
                                      static_cast<std::uint64_t>(key.fold)});
  std::vector<double> train_scores;
  if (config.model == ModelKind::Hqnn) {
    const auto model = hqnn::train(train, key.qubits, key.layers, tc, config.entangler).model;
    train_scores = hqnn::predict_scores(model, train);
    rec.test_scores = hqnn::predict_scores(model, test);
  } else {
    const std::uint64_t pseed =
        derive_seed(config.seed, {seed_tag::kPartition, static_cast<std::uint64_t>(key.qubits),
                                  static_cast<std::uint64_t>(key.run)});
    auto partition = forest::partition_features(train.num_features, key.qubits, pseed, config.partition);
    rec.partition = partition.groups;
    const auto model = forest::train_forest(train, std::move(partition), key.layers, tc, 1, config.entangler);
    train_scores = forest::predict_scores(model, train);
    rec.test_scores = forest::predict_scores(model, test);
  }
  rec.test_labels = labels_of(test);
  rec.train_auc = metrics::roc_auc(train_scores, labels_of(train)).auc;
  rec.test_auc = metrics::roc_auc(rec.test_scores, rec.test_labels).auc;
  rec.confusion = metrics::confusion(rec.test_scores, rec.test_labels, kThreshold);
  rec.summary = metrics::summary_metrics(rec.confusion);
  if (config.record_timing) {
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

void finalize_cell(CellReport& cell, bool timing) {
  std::vector<double> train_auc;
  std::vector<double> test_auc;
  for (const auto& t : cell.tasks) {
    if (t.error) {
      if (!cell.error) cell.error = fmt::format("run {} fold {}: {}", t.run, t.fold, *t.error);
      continue;
    }
    train_auc.push_back(t.train_auc);
    test_auc.push_back(t.test_auc);
    cell.confusion += t.confusion;
    if (timing) cell.seconds += t.seconds;
  }
  cell.train_auc = summarize(train_auc);
  cell.test_auc = summarize(test_auc);
  if (cell.confusion.total() > 0) cell.summary = metrics::summary_metrics(cell.confusion);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset != "cleveland" && dataset != "statlog") {
    throw ConfigError("unknown dataset '" + dataset + "' (expected cleveland or statlog)");
  }
  if (qubits.empty()) throw ConfigError("qubit grid is empty");
  if (layers.empty()) throw ConfigError("layer grid is empty");
  for (int q : qubits) {
    if (q < 2 || q > 4) throw ConfigError("qubit count " + std::to_string(q) + " outside supported range 2..4");
  }
  for (int l : layers) {
    if (l < 1 || l > 4) throw ConfigError("layer count " + std::to_string(l) + " outside supported range 1..4");
  }
  auto has_duplicates = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (has_duplicates(qubits) || has_duplicates(layers)) throw ConfigError("grid contains duplicate values");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  train.validate();
}

Stats summarize(const std::vector<double>& values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  // Rounding can push the mean a hair outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

const CellReport* GridReport::best_cell() const {
  const CellReport* best = nullptr;
  for (const auto& c : cells) {
    if (c.error || c.test_auc.count == 0) continue;
    if (!best || c.test_auc.mean > best->test_auc.mean) best = &c;
  }
  return best;
}

bool GridReport::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellReport& c) { return c.error.has_value(); });
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("QFOREST_DATA_DIR"); env && *env) return env;
  return QFOREST_DEFAULT_DATA_DIR;
}

std::filesystem::path default_data_path(const std::string& dataset, const std::filesystem::path& data_dir) {
  if (dataset == "cleveland") return data_dir / "processed.cleveland.data";
  if (dataset == "statlog") return data_dir / "heart.dat";
  throw ConfigError("unknown dataset '" + dataset + "'");
}

data::Dataset load_experiment_data(const ExperimentConfig& config) {
  const auto path = config.data_path.empty() ? default_data_path(config.dataset, default_data_dir()) : config.data_path;
  if (config.dataset == "statlog") return data::load_statlog(path);
  auto raw = data::load_cleveland_raw(path);
  return config.imputation == Imputation::Paper ? data::impute_group_median(std::move(raw)) : raw;
}

GridReport run_grid(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  return run_grid(config, load_experiment_data(config), progress);
}

GridReport run_grid(const ExperimentConfig& config, const data::Dataset& dataset, const ProgressFn& progress) {
  config.validate();
  const auto counts = dataset.class_counts();
  if (counts[0] == 0 || counts[1] == 0) throw ConfigError("dataset must contain both classes");

  // Splits depend only on (seed, run), so every cell sees the same folds.
  std::vector<std::vector<data::Split>> splits(static_cast<std::size_t>(config.runs));
  for (int r = 0; r < config.runs; ++r) {
    const std::uint64_t s =
        derive_seed(config.seed, {seed_tag::kSplit, config.fixed_folds ? 0U : static_cast<std::uint64_t>(r)});
    splits[static_cast<std::size_t>(r)] = config.protocol == Protocol::Cv10
                                               ? data::stratified_kfold(dataset, 10, s)
                                               : std::vector<data::Split>{data::holdout_split(dataset, kTrainFraction, s)};
  }

  GridReport report;
  report.config = config;
  std::vector<TaskKey> keys;
  for (int q : config.qubits) {
    for (int l : config.layers) {
      CellReport cell;
      cell.qubits = q;
      cell.layers = l;
      const std::size_t cell_index = report.cells.size();
      for (int r = 0; r < config.runs; ++r) {
        for (std::size_t f = 0; f < config.folds(); ++f) keys.push_back({cell_index, q, l, r, static_cast<int>(f)});
      }
      report.cells.push_back(std::move(cell));
    }
  }

  std::vector<TaskRecord> records(keys.size());
  std::mutex progress_mutex;
  parallel_for(keys.size(), config.threads, [&](std::size_t i) {
    const TaskKey& key = keys[i];
    const auto& split = splits[static_cast<std::size_t>(key.run)][static_cast<std::size_t>(key.fold)];
    try {
      records[i] = run_task(config, dataset, split, key);
    } catch (const std::exception& e) {
      records[i] = TaskRecord{};
      records[i].run = key.run;
      records[i].fold = key.fold;
      records[i].error = e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress({key.qubits, key.layers, key.run, key.fold, &records[i]});
    }
  });

  for (std::size_t i = 0; i < keys.size(); ++i) report.cells[keys[i].cell].tasks.push_back(std::move(records[i]));
  for (auto& cell : report.cells) finalize_cell(cell, config.record_timing);
  return report;
}

// --- names -------------------------------------------------------------------------

std::string to_string(ModelKind m) { return m == ModelKind::Hqnn ? "hqnn" : "hqrf"; }
std::string to_string(Protocol p) { return p == Protocol::Cv10 ? "cv10" : "split70"; }
std::string to_string(Imputation i) { return i == Imputation::Paper ? "paper" : "train-only"; }

ModelKind model_from_string(const std::string& s) {
  if (s == "hqnn") return ModelKind::Hqnn;
  if (s == "hqrf") return ModelKind::Hqrf;
  throw ConfigError("unknown model '" + s + "' (expected hqnn or hqrf)");
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "cv10") return Protocol::Cv10;
  if (s == "split70") return Protocol::Split70;
  throw ConfigError("unknown protocol '" + s + "' (expected cv10 or split70)");
}

Imputation imputation_from_string(const std::string& s) {
  if (s == "paper") return Imputation::Paper;
  if (s == "train-only") return Imputation::TrainOnly;
  throw ConfigError("unknown imputation mode '" + s + "' (expected paper or train-only)");
}

ReportFormat format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "table" || s == "table-text") return ReportFormat::Table;
  throw ConfigError("unknown report format '" + s + "' (expected json, csv or table)");
}

}  // namespace qforest::runner
