#include <gtest/gtest.h>

#include "riskforge/metrics.hpp"
#include "riskforge/random.hpp"

using namespace riskforge;

namespace {

// Area under the empirical ROC curve by sweeping thresholds over the distinct
// scores and integrating with the trapezoid rule.
double trapezoid_auc(const std::vector<int>& y, const std::vector<double>& s) {
  std::vector<double> cuts(s);
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double pos = 0, neg = 0;
  for (int v : y) (v ? pos : neg) += 1;
  double area = 0, prev_tpr = 0, prev_fpr = 0;
  for (double c : cuts) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (s[i] >= c) (y[i] ? tp : fp) += 1;
    const double tpr = tp / pos, fpr = fp / neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

}  // namespace

TEST(Auc, FourPointFixture) {
  const std::vector<int> y{1, 0, 1, 0};
  const std::vector<double> s{0.9, 0.8, 0.7, 0.1};
  EXPECT_DOUBLE_EQ(roc_auc(y, s), 0.75);
}

TEST(Auc, MatchesTrapezoidRocOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.4;
      // coarse grid so that ties are common
      s[i] = static_cast<double>(rng.below(8)) / 8 + 0.2 * y[i];
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(roc_auc(y, s), trapezoid_auc(y, s), 1e-12);
  }
}

TEST(Auc, TiesAndDegenerateInput) {
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<int>{0, 0, 1}, std::vector<double>{0.1, 0.2, 0.3}), 1.0);
  try {
    roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.2, 0.4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
  try {
    roc_auc(std::vector<int>{1, 0}, std::vector<double>{0.2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Confusion, HandTable) {
  const std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 1};
  const std::vector<int> p{1, 0, 1, 1, 0, 0, 0, 1};
  const auto ct = confusion_matrix(y, p);
  EXPECT_EQ(ct.tp, 3u);
  EXPECT_EQ(ct.fn, 1u);
  EXPECT_EQ(ct.fp, 1u);
  EXPECT_EQ(ct.tn, 3u);
  EXPECT_DOUBLE_EQ(ct.accuracy(), 0.75);
  const auto pr = precision_recall_f(ct);
  EXPECT_DOUBLE_EQ(pr.precision, 0.75);
  EXPECT_DOUBLE_EQ(pr.recall, 0.75);
  EXPECT_DOUBLE_EQ(pr.f_beta, 0.75);
  // beta = 2 on p = 3/4, r = 3/4 is still 3/4; skew recall to separate them.
  ConfusionTable skew{2, 2, 5, 0};  // p = 0.5, r = 1
  EXPECT_DOUBLE_EQ(precision_recall_f(skew, 2).f_beta, 5 * 0.5 * 1 / (4 * 0.5 + 1));
  EXPECT_DOUBLE_EQ(precision_recall_f(skew, 1).f_beta, 2.0 / 3.0);
}

TEST(Confusion, UndefinedRatiosAreFlaggedZero) {
  const auto none_predicted = precision_recall_f(confusion_matrix(std::vector<int>{1, 0}, std::vector<int>{0, 0}));
  EXPECT_TRUE(none_predicted.precision_undefined);
  EXPECT_EQ(none_predicted.precision, 0);
  EXPECT_FALSE(none_predicted.recall_undefined);
  EXPECT_TRUE(none_predicted.f_undefined);
  const auto no_positives = precision_recall_f(confusion_matrix(std::vector<int>{0, 0}, std::vector<int>{0, 1}));
  EXPECT_TRUE(no_positives.recall_undefined);
  EXPECT_EQ(no_positives.recall, 0);
}

TEST(Confusion, Rejections) {
  try {
    confusion_matrix(std::vector<int>{1, 0}, std::vector<int>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  EXPECT_THROW(confusion_matrix(std::vector<int>{2}, std::vector<int>{1}), Error);
}
