#include "qforest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "qforest/error.hpp"

namespace qforest::metrics {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw StructuralError("scores and labels differ in length");
  for (int l : labels) {
    if (l != 0 && l != 1) throw StructuralError("labels must be 0 or 1");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("NaN score");
  }
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  if (scores.empty()) throw StructuralError("confusion matrix of zero samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) (predicted ? cm.tp : cm.fn)++;
    else (predicted ? cm.fp : cm.tn)++;
  }
  return cm;
}

SummaryMetrics summary_metrics(const ConfusionMatrix& cm) {
  SummaryMetrics m;
  m.acc = ratio(cm.tp + cm.tn, cm.total());
  m.sens = ratio(cm.tp, cm.tp + cm.fn);
  m.spec = ratio(cm.tn, cm.tn + cm.fp);
  m.ppv = ratio(cm.tp, cm.tp + cm.fp);
  if (m.ppv && m.sens && (*m.ppv + *m.sens) > 0.0) m.f1 = 2.0 * *m.ppv * *m.sens / (*m.ppv + *m.sens);
  return m;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw MetricError("AUC is undefined unless both classes are present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double inf = std::numeric_limits<double>::infinity();
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  RocCurve curve;
  curve.points.push_back({0.0, 0.0, inf});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::size_t tp0 = tp;
    const std::size_t fp0 = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) (labels[order[i]] == 1 ? tp : fp)++;
    // Trapezoid in count space keeps the sum exact until the final division.
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
    curve.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, threshold});
  }
  curve.points.push_back({1.0, 1.0, -inf});
  curve.auc = area / (2.0 * np * nn);
  return curve;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr,threshold\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const auto& p : curve.points) out << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace qforest::metrics
