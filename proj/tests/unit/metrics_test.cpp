#include <gtest/gtest.h>

#include <sstream>

#include "gen.hpp"
#include "qforest/error.hpp"
#include "qforest/metrics.hpp"

namespace {

using namespace qforest;
using namespace qforest::metrics;
using qforest::testing::uniform_int;

double mann_whitney(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

struct Instance {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Scores on a coarse grid so ties are frequent.
Instance random_instance(std::mt19937_64& rng) {
  Instance in;
  const int n = uniform_int(rng, 2, 50);
  const int levels = uniform_int(rng, 1, 12);
  for (int i = 0; i < n; ++i) {
    in.scores.push_back(static_cast<double>(uniform_int(rng, 0, levels)) / levels);
    in.labels.push_back(uniform_int(rng, 0, 1));
  }
  in.labels[0] = 0;
  in.labels[1] = 1;
  return in;
}

TEST(Confusion, ThresholdIsInclusive) {
  const std::vector<double> s{0.5, 0.49, 0.9, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  const auto cm = confusion(s, y);
  EXPECT_EQ(cm, (ConfusionMatrix{1, 1, 1, 1}));
  EXPECT_EQ(confusion(s, y, 0.95), (ConfusionMatrix{0, 2, 0, 2}));
}

TEST(Confusion, RejectsBadInput) {
  const std::vector<double> s{0.5, 0.4};
  EXPECT_THROW(confusion(s, std::vector<int>{1}), StructuralError);
  EXPECT_THROW(confusion(s, std::vector<int>{1, 2}), StructuralError);
  EXPECT_THROW(confusion(std::vector<double>{}, std::vector<int>{}), StructuralError);
}

TEST(Summary, WorkedExample) {
  const auto m = summary_metrics({50, 40, 10, 5});
  EXPECT_NEAR(*m.acc, 90.0 / 105.0, 1e-15);
  EXPECT_NEAR(*m.acc, 0.8571, 5e-5);
  EXPECT_NEAR(*m.sens, 0.9091, 5e-5);
  EXPECT_NEAR(*m.spec, 0.8, 1e-15);
  EXPECT_NEAR(*m.ppv, 0.8333, 5e-5);
  EXPECT_NEAR(*m.f1, 0.8696, 5e-5);
}

TEST(Summary, UndefinedRatiosAreEmpty) {
  const auto m = summary_metrics({0, 10, 0, 0});
  EXPECT_EQ(*m.acc, 1.0);
  EXPECT_FALSE(m.sens);
  EXPECT_FALSE(m.ppv);
  EXPECT_FALSE(m.f1);
  EXPECT_EQ(*m.spec, 1.0);
  const auto z = summary_metrics({0, 0, 3, 4});
  EXPECT_EQ(*z.ppv, 0.0);
  EXPECT_EQ(*z.sens, 0.0);
  EXPECT_FALSE(z.f1);
}

TEST(SummaryProperty, MatchesDefinitions) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    ConfusionMatrix cm{static_cast<std::size_t>(uniform_int(rng, 0, 200)),
                       static_cast<std::size_t>(uniform_int(rng, 0, 200)),
                       static_cast<std::size_t>(uniform_int(rng, 0, 200)),
                       static_cast<std::size_t>(uniform_int(rng, 0, 200))};
    if (t < 10) cm.tp = 0;
    if (t >= 10 && t < 20) cm.fp = cm.tn = 0;
    const double tp = double(cm.tp), tn = double(cm.tn), fp = double(cm.fp), fn = double(cm.fn);
    const auto m = summary_metrics(cm);
    if (tp + tn + fp + fn > 0) EXPECT_EQ(*m.acc, (tp + tn) / (tp + tn + fp + fn));
    if (tp + fn > 0) EXPECT_EQ(*m.sens, tp / (tp + fn)); else EXPECT_FALSE(m.sens);
    if (tn + fp > 0) EXPECT_EQ(*m.spec, tn / (tn + fp)); else EXPECT_FALSE(m.spec);
    if (tp + fp > 0) EXPECT_EQ(*m.ppv, tp / (tp + fp)); else EXPECT_FALSE(m.ppv);
    if (tp + fn > 0 && tp + fp > 0 && tp > 0) {
      const double p = tp / (tp + fp), r = tp / (tp + fn);
      EXPECT_EQ(*m.f1, 2 * p * r / (p + r));
      EXPECT_NEAR(*m.f1, 2 * tp / (2 * tp + fp + fn), 1e-14);
    } else {
      EXPECT_FALSE(m.f1);
    }
  }
}

TEST(Roc, PerfectAndReversed) {
  const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
  EXPECT_EQ(roc_auc(s, std::vector<int>{1, 1, 0, 0}).auc, 1.0);
  EXPECT_EQ(roc_auc(s, std::vector<int>{0, 0, 1, 1}).auc, 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}).auc, 0.5);
}

TEST(Roc, CurveShape) {
  const std::vector<double> s{0.9, 0.7, 0.7, 0.3};
  const auto c = roc_auc(s, std::vector<int>{1, 0, 1, 0});
  ASSERT_EQ(c.points.size(), 5U);
  EXPECT_EQ(c.points.front().fpr, 0.0);
  EXPECT_TRUE(std::isinf(c.points.front().threshold));
  EXPECT_EQ(c.points[2].threshold, 0.7);
  EXPECT_EQ(c.points[2].tpr, 1.0);
  EXPECT_EQ(c.points[2].fpr, 0.5);
  EXPECT_EQ(c.points.back().fpr, 1.0);
  EXPECT_EQ(c.points.back().tpr, 1.0);
  EXPECT_DOUBLE_EQ(c.auc, 0.875);
}

TEST(Roc, SingleClassIsMetricError) {
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), MetricError);
  EXPECT_THROW(roc_auc(std::vector<double>{std::nan(""), 0.2}, std::vector<int>{0, 1}), NumericError);
}

TEST(RocProperty, EqualsMannWhitney) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 500; ++t) {
    const auto in = random_instance(rng);
    EXPECT_NEAR(roc_auc(in.scores, in.labels).auc, mann_whitney(in.scores, in.labels), 1e-12);
  }
}

TEST(RocProperty, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    std::vector<double> warped;
    for (double s : in.scores) warped.push_back(std::exp(3 * s) - 7);
    EXPECT_EQ(roc_auc(warped, in.labels).auc, roc_auc(in.scores, in.labels).auc);
  }
}

TEST(RocProperty, ComplementedScoresGiveOneMinus) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    std::vector<double> flipped;
    for (double s : in.scores) flipped.push_back(1 - s);
    EXPECT_NEAR(roc_auc(flipped, in.labels).auc, 1 - roc_auc(in.scores, in.labels).auc, 1e-12);
  }
}

TEST(RocProperty, CurveIsMonotone) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    const auto c = roc_auc(in.scores, in.labels);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
      EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
      EXPECT_LT(c.points[i].threshold, c.points[i - 1].threshold);
    }
  }
}

TEST(RocCsv, Format) {
  std::ostringstream out;
  write_roc_csv(out, roc_auc(std::vector<double>{0.25, 0.75}, std::vector<int>{0, 1}));
  EXPECT_EQ(out.str(), "fpr,tpr,threshold\n0,0,inf\n0,1,0.75\n1,1,0.25\n1,1,-inf\n");
}

}  // namespace
