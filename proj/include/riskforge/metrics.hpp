#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "riskforge/error.hpp"
#include "riskforge/stats.hpp"

namespace riskforge {

struct ConfusionTable {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const {
    return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0;
  }
};

inline ConfusionTable confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(ErrorCode::LengthMismatch, "y_true has " + std::to_string(y_true.size()) +
                                               " entries, y_pred " + std::to_string(y_pred.size()));
  if (y_true.empty()) throw Error(ErrorCode::LengthMismatch, "confusion matrix of zero rows");
  ConfusionTable ct;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    if (y_true[i]) (y_pred[i] ? ct.tp : ct.fn) += 1;
    else (y_pred[i] ? ct.fp : ct.tn) += 1;
  }
  return ct;
}

// A ratio with a zero denominator is reported as 0 with its flag set.
struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  double f_beta = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f_undefined = false;
};

inline PrecisionRecall precision_recall_f(const ConfusionTable& ct, double beta = 1.0) {
  PrecisionRecall r;
  const double tp = static_cast<double>(ct.tp);
  if (ct.tp + ct.fp == 0) r.precision_undefined = true;
  else r.precision = tp / static_cast<double>(ct.tp + ct.fp);
  if (ct.tp + ct.fn == 0) r.recall_undefined = true;
  else r.recall = tp / static_cast<double>(ct.tp + ct.fn);
  const double b2 = beta * beta;
  const double denom = b2 * r.precision + r.recall;
  if (denom == 0) r.f_undefined = true;
  else r.f_beta = (1 + b2) * r.precision * r.recall / denom;
  return r;
}

// Mann-Whitney form: (sum of positive ranks - n1(n1+1)/2) / (n1 n0), with
// tied scores sharing mid-ranks.
inline double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size())
    throw Error(ErrorCode::LengthMismatch, "labels and scores differ in length");
  const auto ranks = average_ranks(scores);
  double n1 = 0, rank_sum = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i]) {
      n1 += 1;
      rank_sum += ranks[i];
    }
  }
  const double n0 = static_cast<double>(y_true.size()) - n1;
  if (n1 == 0 || n0 == 0) throw Error(ErrorCode::SingleClass, "AUC needs both classes");
  return (rank_sum - n1 * (n1 + 1) / 2) / (n1 * n0);
}

}  // namespace riskforge
