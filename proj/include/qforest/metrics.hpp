#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace qforest::metrics {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Predicted class 1 iff score >= threshold.
ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

/// Metrics whose denominator is zero are left empty rather than reported as 0.
struct SummaryMetrics {
  std::optional<double> acc;
  std::optional<double> sens;
  std::optional<double> spec;
  std::optional<double> ppv;
  std::optional<double> f1;

  bool operator==(const SummaryMetrics&) const = default;
};

SummaryMetrics summary_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr;        ///< 1 - specificity
  double tpr;        ///< sensitivity
  double threshold;  ///< score >= threshold counts as positive

  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  /// Starts at (0,0) with threshold +inf and ends at (1,1) with threshold -inf.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// ROC over every distinct score, trapezoidal area. Samples with tied scores
/// enter the curve together, which matches Mann-Whitney with ties counted 1/2.
/// Throws MetricError unless both classes are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Writes "fpr,tpr,threshold" followed by one line per point.
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace qforest::metrics
