#pragma once

// Model evaluation and the repeated split/train/evaluate benchmark.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "riskforge/metrics.hpp"
#include "riskforge/model.hpp"
#include "riskforge/parallel.hpp"

namespace riskforge {

struct ModelMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double auc = 0;
  ConfusionTable confusion;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

inline ModelMetrics evaluate_model(const Model& model, const Dataset& test, double threshold = 0.5) {
  if (test.rows() == 0) throw Error(ErrorCode::EmptyDataset, "empty test set");
  std::vector<double> scores(test.rows());
  std::vector<int> predicted(test.rows());
  for (std::size_t i = 0; i < test.rows(); ++i) {
    scores[i] = predict_score(model, test.row(i));
    predicted[i] = scores[i] >= threshold ? 1 : 0;
  }
  ModelMetrics m;
  m.confusion = confusion_matrix(test.labels, predicted);
  m.accuracy = m.confusion.accuracy();
  const auto pr = precision_recall_f(m.confusion, 1.0);
  m.precision = pr.precision;
  m.recall = pr.recall;
  m.f1 = pr.f_beta;
  m.precision_undefined = pr.precision_undefined;
  m.recall_undefined = pr.recall_undefined;
  m.auc = roc_auc(test.labels, scores);
  return m;
}

inline json to_json(const ModelMetrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"auc", m.auc},
              {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp},
                             {"tn", m.confusion.tn}, {"fn", m.confusion.fn}}},
              {"precision_undefined", m.precision_undefined},
              {"recall_undefined", m.recall_undefined}};
}

struct BenchmarkCell {
  Family family = Family::DecisionTree;
  double fraction = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  ModelMetrics metrics;
  std::string error;
};

struct MetricSummary {
  double mean = 0;
  double std = 0;  // population std across successful cells
};

struct FamilySummary {
  Family family = Family::DecisionTree;
  std::size_t cells = 0;
  std::size_t failures = 0;
  MetricSummary accuracy, precision, recall, f1, auc;
};

struct BenchmarkReport {
  std::vector<double> fractions;
  std::vector<std::uint64_t> seeds;
  std::vector<BenchmarkCell> cells;
  std::vector<FamilySummary> summaries;

  const FamilySummary& summary(Family f) const {
    for (const auto& s : summaries)
      if (s.family == f) return s;
    throw Error(ErrorCode::InvalidArgument, "family " + family_id(f) + " was not benchmarked");
  }
};

namespace detail {

inline MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(v.size()));
  return s;
}

}  // namespace detail

// Cross product of (fraction, seed): split, train every family with the cell
// seed, evaluate on the held-out part. Cells are independent and stored by
// key, so worker scheduling cannot change the report. A failing cell is
// recorded with its error instead of aborting the run.
inline BenchmarkReport repeated_evaluation(const std::vector<Family>& families, const Dataset& data,
                                           const std::vector<double>& fractions,
                                           const std::vector<std::uint64_t>& seeds,
                                           const TrainConfig& base_cfg = {}) {
  if (families.empty() || fractions.empty() || seeds.empty())
    throw Error(ErrorCode::InvalidArgument, "benchmark grids must be non-empty");
  BenchmarkReport report;
  report.fractions = fractions;
  report.seeds = seeds;
  std::vector<std::pair<double, std::uint64_t>> grid;
  for (double f : fractions)
    for (auto s : seeds) grid.emplace_back(f, s);
  report.cells.resize(grid.size() * families.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    const auto [fraction, seed] = grid[g];
    std::optional<SplitPair> split;
    std::string split_error;
    try {
      split = stratified_split(data, fraction, seed);
    } catch (const std::exception& e) {
      split_error = e.what();
    }
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
      BenchmarkCell& cell = report.cells[g * families.size() + fi];
      cell.family = families[fi];
      cell.fraction = fraction;
      cell.seed = seed;
      if (!split) {
        cell.error = split_error;
        continue;
      }
      try {
        TrainConfig cfg = base_cfg;
        cfg.seed = seed;
        const Model model = train_family(families[fi], split->train, cfg);
        cell.metrics = evaluate_model(model, split->test);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  });
  for (auto f : families) {
    FamilySummary s;
    s.family = f;
    std::vector<double> acc, prec, rec, f1, auc;
    for (const auto& c : report.cells) {
      if (c.family != f) continue;
      ++s.cells;
      if (!c.ok) {
        ++s.failures;
        continue;
      }
      acc.push_back(c.metrics.accuracy);
      prec.push_back(c.metrics.precision);
      rec.push_back(c.metrics.recall);
      f1.push_back(c.metrics.f1);
      auc.push_back(c.metrics.auc);
    }
    s.accuracy = detail::summarize(acc);
    s.precision = detail::summarize(prec);
    s.recall = detail::summarize(rec);
    s.f1 = detail::summarize(f1);
    s.auc = detail::summarize(auc);
    report.summaries.push_back(s);
  }
  return report;
}

// Display rows in the conventional order. The linear SVM family is listed
// under both "SVM" and "Linear SVC".
inline std::vector<std::pair<std::string, Family>> table_rows(const BenchmarkReport& r,
                                                              std::size_t perceptron_iterations = 10) {
  std::vector<std::pair<std::string, Family>> ordered = {
      {"SVM", Family::LinearSvm},
      {"LR", Family::Logistic},
      {"DT", Family::DecisionTree},
      {"RF", Family::RandomForest},
      {"Linear SVC", Family::LinearSvm},
      {"Perceptron (iter=" + std::to_string(perceptron_iterations) + ")", Family::Perceptron},
      {"GBT (XGBoost-style)", Family::GradientBoosted}};
  std::vector<std::pair<std::string, Family>> out;
  for (auto& row : ordered)
    for (const auto& s : r.summaries)
      if (s.family == row.second) {
        out.push_back(row);
        break;
      }
  return out;
}

inline std::string format_table(const BenchmarkReport& r, std::size_t perceptron_iterations = 10) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %9s %9s %9s %9s %8s %4s\n", "Model", "Accuracy", "Precision",
                "Recall", "F1 Score", "AUC", "AUC%");
  os << line;
  for (const auto& [name, fam] : table_rows(r, perceptron_iterations)) {
    const auto& s = r.summary(fam);
    std::snprintf(line, sizeof line, "%-22s %9.2f %9.2f %9.2f %9.2f %8.4f %4.0f\n", name.c_str(),
                  100 * s.accuracy.mean, 100 * s.precision.mean, 100 * s.recall.mean, 100 * s.f1.mean,
                  s.auc.mean, std::round(100 * s.auc.mean));
    os << line;
  }
  return os.str();
}

inline json to_json(const BenchmarkReport& r, std::size_t perceptron_iterations = 10) {
  auto summary_json = [](const MetricSummary& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  json rows = json::array();
  for (const auto& [name, fam] : table_rows(r, perceptron_iterations)) {
    const auto& s = r.summary(fam);
    rows.push_back({{"model", name},
                    {"family", family_id(fam)},
                    {"cells", s.cells},
                    {"failures", s.failures},
                    {"accuracy", summary_json(s.accuracy)},
                    {"precision", summary_json(s.precision)},
                    {"recall", summary_json(s.recall)},
                    {"f1", summary_json(s.f1)},
                    {"auc", summary_json(s.auc)},
                    {"auc_percent_rounded", std::round(100 * s.auc.mean)}});
  }
  json cells = json::array();
  for (const auto& c : r.cells) {
    json jc{{"family", family_id(c.family)}, {"fraction", c.fraction}, {"seed", c.seed}, {"ok", c.ok}};
    if (c.ok) jc["metrics"] = to_json(c.metrics);
    else jc["error"] = c.error;
    cells.push_back(jc);
  }
  return json{{"format_version", kReportFormatVersion},
              {"kind", "benchmark"},
              {"threshold", 0.5},
              {"undefined_metric_policy", "zero_with_flag"},
              {"fractions", r.fractions},
              {"seeds", r.seeds},
              {"rows", rows},
              {"cells", cells}};
}

}  // namespace riskforge
