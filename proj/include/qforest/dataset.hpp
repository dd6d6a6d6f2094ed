#pragma once

// Loading, imputation, standardisation and splitting of the Cleveland and
// Statlog heart-disease files.
//
// Feature order (13 inputs) for both files:
//   age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak,
//   slope, ca, thal
// Label 1 is coronary heart disease, 0 is normal.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qforest::data {

inline constexpr std::size_t kHeartFeatures = 13;

inline constexpr std::array<const char*, kHeartFeatures> kHeartFeatureNames = {
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak", "slope", "ca", "thal"};

struct Sample {
  std::vector<double> features;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

/// A cell that was missing ('?') in the source file.
struct Cell {
  std::size_t row;
  std::size_t col;

  auto operator<=>(const Cell&) const = default;
};

struct Dataset {
  std::string name;
  std::size_t num_features = 0;
  std::vector<Sample> samples;
  /// Cells that were missing in the source, sorted. Their values are NaN until
  /// imputed; imputation keeps this list so callers can tell what was filled.
  std::vector<Cell> missing;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::array<std::size_t, 2> class_counts() const;
  /// Number of distinct rows with at least one missing cell.
  std::size_t rows_with_missing() const;
  bool has_unimputed_cells() const;

  /// Rows at `indices`, in the given order. Missing-cell rows are remapped.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  /// Columns at `columns`, in the given order.
  Dataset project(const std::vector<std::size_t>& columns) const;

  /// Bitwise comparison; NaN cells compare equal to NaN cells.
  bool same_values(const Dataset& other) const;
};

// --- ingest ---------------------------------------------------------------

/// Parses the UCI processed Cleveland layout: 14 comma-separated fields, '?'
/// for missing, target in {0..4} collapsed to {0,1}. Missing cells stay NaN.
Dataset parse_cleveland(std::istream& in);

/// Parses the UCI Statlog heart layout: 13 whitespace-separated features and a
/// label in {1,2} mapped to {0,1}. Any '?' is an error.
Dataset parse_statlog(std::istream& in);

/// parse_cleveland + impute_group_median.
Dataset load_cleveland(const std::filesystem::path& path);
/// parse_cleveland only; missing cells remain NaN.
Dataset load_cleveland_raw(const std::filesystem::path& path);
Dataset load_statlog(const std::filesystem::path& path);

// --- imputation -------------------------------------------------------------

/// Per-feature medians: by label, and pooled over all labels.
struct Medians {
  std::array<std::vector<double>, 2> by_label;
  std::vector<double> pooled;
};

/// Medians over the present (non-NaN) cells of `reference`. A feature missing
/// for an entire class is reported as an IngestError only when that cell is
/// needed, so the NaN is kept here.
Medians compute_medians(const Dataset& reference);

/// Replaces every NaN cell of `target` with the median for its label
/// (`use_labels`) or the pooled median. Non-missing cells are untouched.
Dataset impute(Dataset target, const Medians& medians, bool use_labels);

/// Fills each missing cell with the median of that feature over same-label
/// samples where the cell is present.
Dataset impute_group_median(Dataset dataset);

double median(std::vector<double> values);

// --- standardisation --------------------------------------------------------

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  ///< population std; 0 means centre only

  Dataset apply(Dataset d) const;
};

Standardizer fit_standardizer(const Dataset& train);

struct Standardized {
  Dataset train;
  std::vector<Dataset> others;
  Standardizer stats;
};

/// z-scores every feature with the train mean/std and applies the same
/// transform to `others`.
Standardized standardize(const Dataset& train, const std::vector<Dataset>& others = {});

// --- splitting --------------------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Class-wise shuffle then round-robin fold assignment. The round robin
/// continues across classes, so fold sizes differ by at most one. Each class
/// needs at least k members.
std::vector<Split> stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed);

/// Stratified holdout; each class contributes round(fraction * class size)
/// training rows.
Split holdout_split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

// --- canonical cache --------------------------------------------------------

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace qforest::data
