#pragma once

// Feature attribution.
//
// All Shapley explainers share one cooperative game: for an explicand x and a
// background set R, the value of a coalition S is
//
//   v(S) = mean over r in R of f(x_S, r_{not S})
//
// where f is the model output on the explanation's scale and (x_S, r_{not S})
// takes x's values on S and r's elsewhere. base_value = v(empty set),
// prediction = v(all features), and base_value + sum(phi) = prediction.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "riskforge/model.hpp"
#include "riskforge/parallel.hpp"
#include "riskforge/random.hpp"

namespace riskforge {

inline constexpr int kExplanationFormatVersion = 1;

struct BackgroundSet {
  std::size_t width = 0;
  std::vector<double> values;  // row-major
  std::string source;
  std::uint64_t seed = 0;

  std::size_t size() const { return width ? values.size() / width : 0; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * width, width}; }

  static BackgroundSet from_rows(std::size_t width, std::vector<double> values, std::string source = "explicit") {
    BackgroundSet bg;
    bg.width = width;
    bg.values = std::move(values);
    bg.source = std::move(source);
    if (bg.size() == 0 || bg.values.size() % width != 0)
      throw Error(ErrorCode::InvalidArgument, "background set must hold at least one complete row");
    return bg;
  }

  json provenance() const { return json{{"source", source}, {"seed", seed}, {"size", size()}}; }
};

// Up to m of the indices 0..n-1 chosen without replacement by a seeded
// stream, in ascending order; all of them when m == 0 or m >= n.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (m == 0 || n <= m) return idx;
  Rng rng(derive_seed(seed, {0xb6}));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline BackgroundSet make_background(const Dataset& ds, std::size_t max_rows = 128, std::uint64_t seed = 0,
                                     std::string source = "training rows") {
  require_complete(ds);
  if (ds.rows() == 0) throw Error(ErrorCode::EmptyDataset, "background source has no rows");
  BackgroundSet bg;
  bg.width = ds.cols();
  for (auto i : sample_indices(ds.rows(), max_rows, seed)) {
    auto r = ds.row(i);
    bg.values.insert(bg.values.end(), r.begin(), r.end());
  }
  bg.source = std::move(source);
  bg.seed = seed;
  return bg;
}

struct Explanation {
  double base_value = 0;
  std::vector<double> phi;
  double prediction = 0;
  OutputScale scale = OutputScale::Probability;
  std::string method;
  std::vector<double> feature_values;
  // Sampling estimator only.
  std::vector<double> standard_errors;
  double raw_residual = 0;

  double additivity_gap() const {
    return base_value + std::accumulate(phi.begin(), phi.end(), 0.0) - prediction;
  }
};

namespace detail {

inline void require_background(const BackgroundSet& bg, std::size_t width) {
  if (bg.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty background set");
  if (bg.width != width)
    throw Error(ErrorCode::SchemaMismatch, "background rows have " + std::to_string(bg.width) +
                                               " values, explicand has " + std::to_string(width));
}

// 1 / (a * C(a + b, a)) = (a-1)! b! / (a+b)!
inline double shapley_weight(std::size_t a, std::size_t b) {
  double c = 1;
  for (std::size_t i = 1; i <= b; ++i) c = c * static_cast<double>(a + i) / static_cast<double>(i);
  return 1.0 / (static_cast<double>(a) * c);
}

}  // namespace detail

// Exact enumeration of all 2^k coalitions; the reference oracle.
inline Explanation shapley_brute_force(const Model& model, std::span<const double> x, const BackgroundSet& bg,
                                       OutputScale scale) {
  const std::size_t k = x.size();
  detail::require_background(bg, k);
  if (k > 20) throw Error(ErrorCode::TooManyFeatures, std::to_string(k) + " features exceed the 2^20 guard");
  const std::size_t subsets = std::size_t{1} << k;
  std::vector<double> v(subsets, 0.0);
  std::vector<double> composite(k);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double sum = 0;
    for (std::size_t r = 0; r < bg.size(); ++r) {
      auto ref = bg.row(r);
      for (std::size_t j = 0; j < k; ++j) composite[j] = (mask >> j) & 1 ? x[j] : ref[j];
      sum += model_output(model, composite, scale);
    }
    v[mask] = sum / static_cast<double>(bg.size());
  }
  // |S|! (k-|S|-1)! / k!
  std::vector<double> weight(k, 0.0);
  for (std::size_t s = 0; s < k; ++s) {
    // s! (k-s-1)! / k! = 1 / (k * C(k-1, s))
    double c = 1;
    for (std::size_t i = 1; i <= s; ++i) c = c * static_cast<double>(k - 1 - s + i) / static_cast<double>(i);
    weight[s] = 1.0 / (static_cast<double>(k) * c);
  }
  Explanation e;
  e.phi.assign(k, 0.0);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t j = 0; j < k; ++j) {
      if ((mask >> j) & 1) continue;
      e.phi[j] += weight[size] * (v[mask | (std::size_t{1} << j)] - v[mask]);
    }
  }
  e.base_value = v[0];
  e.prediction = v[subsets - 1];
  e.scale = scale;
  e.method = "brute_force";
  e.feature_values.assign(x.begin(), x.end());
  return e;
}

inline Explanation shapley_brute_force(const Model& model, std::span<const double> x, const BackgroundSet& bg) {
  return shapley_brute_force(model, x, bg, natural_scale(model));
}

namespace detail {

// Accumulates one tree's interventional Shapley values for a single
// (explicand, reference) pair. Along each root-to-leaf path every feature is
// either unconstrained (x and r both satisfy its conditions), in A (only x
// does), in B (only r does), or blocking (neither; the leaf is unreachable
// and never visited). A leaf of value v with |A| = a, |B| = b contributes
// v (a-1)! b! / (a+b)! to each feature in A and -v a! (b-1)! / (a+b)! to
// each feature in B.
class TreePairShap {
 public:
  TreePairShap(const TreeModel& tree, std::span<const double> x, std::span<const double> r,
               std::span<double> phi, std::vector<std::uint8_t>& marks)
      : tree_(tree), x_(x), r_(r), phi_(phi), marks_(marks) {}

  // Returns (base contribution, prediction contribution).
  std::pair<double, double> run() {
    walk(0);
    return {base_, prediction_};
  }

 private:
  enum : std::uint8_t { kFree = 0, kInA = 1, kInB = 2 };

  void walk(std::size_t node) {
    if (tree_.is_leaf(node)) {
      leaf(tree_.value[node]);
      return;
    }
    const auto f = static_cast<std::size_t>(tree_.feature[node]);
    const double t = tree_.threshold[node];
    const auto x_child = static_cast<std::size_t>(x_[f] < t ? tree_.left[node] : tree_.right[node]);
    const auto r_child = static_cast<std::size_t>(r_[f] < t ? tree_.left[node] : tree_.right[node]);
    switch (marks_[f]) {
      case kInA: walk(x_child); return;
      case kInB: walk(r_child); return;
      default: break;
    }
    if (x_child == r_child) {
      walk(x_child);
      return;
    }
    marks_[f] = kInA;
    in_a_.push_back(f);
    walk(x_child);
    in_a_.pop_back();
    marks_[f] = kInB;
    in_b_.push_back(f);
    walk(r_child);
    in_b_.pop_back();
    marks_[f] = kFree;
  }

  void leaf(double v) {
    const std::size_t a = in_a_.size(), b = in_b_.size();
    if (a == 0) base_ += v;
    if (b == 0) prediction_ += v;
    if (a > 0) {
      const double w = v * shapley_weight(a, b);
      for (auto j : in_a_) phi_[j] += w;
    }
    if (b > 0) {
      const double w = v * shapley_weight(b, a);
      for (auto j : in_b_) phi_[j] -= w;
    }
  }

  const TreeModel& tree_;
  std::span<const double> x_, r_;
  std::span<double> phi_;
  std::vector<std::uint8_t>& marks_;
  std::vector<std::size_t> in_a_, in_b_;
  double base_ = 0;
  double prediction_ = 0;
};

// Per-tree values averaged over references; returns (base, prediction).
inline std::pair<double, double> tree_shap_over_background(const TreeModel& tree, std::span<const double> x,
                                                           const BackgroundSet& bg, std::span<double> phi,
                                                           std::vector<std::uint8_t>& marks) {
  std::vector<double> acc(phi.size(), 0.0);
  double base = 0, pred = 0;
  for (std::size_t r = 0; r < bg.size(); ++r) {
    auto [b, p] = TreePairShap(tree, x, bg.row(r), acc, marks).run();
    base += b;
    pred += p;
  }
  const double inv = 1.0 / static_cast<double>(bg.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = acc[j] * inv;
  return {base * inv, pred * inv};
}

}  // namespace detail

// Exact interventional Shapley values for tree families in
// O(trees * references * leaves) per explicand. Forests average per-tree
// values; boosted models are explained on the margin as base_margin plus the
// learning-rate-weighted sum of per-tree values.
inline Explanation shapley_tree_exact(const Model& model, std::span<const double> x, const BackgroundSet& bg) {
  const std::size_t k = x.size();
  detail::require_background(bg, k);
  std::vector<const TreeModel*> trees;
  double weight = 1, offset = 0;
  OutputScale scale = OutputScale::Probability;
  if (const auto* t = std::get_if<TreeModel>(&model)) {
    trees.push_back(t);
  } else if (const auto* f = std::get_if<ForestModel>(&model)) {
    for (const auto& t : f->trees) trees.push_back(&t);
    weight = f->trees.empty() ? 0 : 1.0 / static_cast<double>(f->trees.size());
    if (f->trees.empty()) offset = 0.5;
  } else if (const auto* b = std::get_if<BoostedModel>(&model)) {
    for (const auto& t : b->trees) trees.push_back(&t);
    weight = b->learning_rate;
    offset = b->base_margin;
    scale = OutputScale::Margin;
  } else {
    throw Error(ErrorCode::UnsupportedModel, "tree explainer needs a tree-family model");
  }
  Explanation e;
  e.phi.assign(k, 0.0);
  e.base_value = offset;
  e.prediction = offset;
  std::vector<double> tree_phi(k);
  std::vector<std::uint8_t> marks(k, 0);
  for (const auto* t : trees) {
    auto [base, pred] = detail::tree_shap_over_background(*t, x, bg, tree_phi, marks);
    e.base_value += weight * base;
    e.prediction += weight * pred;
    for (std::size_t j = 0; j < k; ++j) e.phi[j] += weight * tree_phi[j];
  }
  e.scale = scale;
  e.method = "tree_exact";
  e.feature_values.assign(x.begin(), x.end());
  return e;
}

// Closed form on the margin: phi per encoded column is w_c (x_c - mean_c)
// over the background, folded back onto the source feature by summation.
inline Explanation shapley_linear(const LinearModel& model, std::span<const double> x, const BackgroundSet& bg) {
  detail::require_background(bg, x.size());
  const auto& enc = model.encoder;
  const std::size_t width = enc.width();
  std::vector<double> mean(width, 0.0), buf(width);
  for (std::size_t r = 0; r < bg.size(); ++r) {
    enc.transform(bg.row(r), buf);
    for (std::size_t c = 0; c < width; ++c) mean[c] += buf[c];
  }
  for (auto& m : mean) m /= static_cast<double>(bg.size());
  const auto xe = enc.transform(x);
  Explanation e;
  e.phi.assign(x.size(), 0.0);
  e.base_value = model.bias;
  for (std::size_t c = 0; c < width; ++c) {
    e.base_value += model.weights[c] * mean[c];
    e.phi[enc.columns()[c].feature] += model.weights[c] * (xe[c] - mean[c]);
  }
  e.prediction = model.margin_encoded(xe);
  e.scale = OutputScale::Margin;
  e.method = "linear";
  e.feature_values.assign(x.begin(), x.end());
  return e;
}

// Permutation-sampling estimate of the same game. Each sampled permutation
// adds features in order and records every marginal contribution; phi is the
// mean and standard_errors the standard error of the mean. Any residual
// (prediction - base - sum phi) is recorded and then spread over features in
// proportion to their standard errors (evenly if all are zero).
inline Explanation shapley_sampling(const Model& model, std::span<const double> x, const BackgroundSet& bg,
                                    std::size_t n_permutations, std::uint64_t seed, OutputScale scale) {
  const std::size_t k = x.size();
  detail::require_background(bg, k);
  if (n_permutations < 1) throw Error(ErrorCode::InvalidArgument, "n_permutations must be at least 1");
  std::vector<std::vector<double>> composites(bg.size(), std::vector<double>(k));
  auto coalition_value = [&] {
    double sum = 0;
    for (const auto& c : composites) sum += model_output(model, c, scale);
    return sum / static_cast<double>(bg.size());
  };
  auto reset = [&] {
    for (std::size_t r = 0; r < bg.size(); ++r) {
      auto ref = bg.row(r);
      std::copy(ref.begin(), ref.end(), composites[r].begin());
    }
  };
  reset();
  const double base = coalition_value();
  for (auto& c : composites) std::copy(x.begin(), x.end(), c.begin());
  const double prediction = coalition_value();

  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  std::vector<std::size_t> order(k);
  Rng rng(seed);
  for (std::size_t p = 0; p < n_permutations; ++p) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    reset();
    double prev = base;
    for (auto j : order) {
      for (auto& c : composites) c[j] = x[j];
      const double cur = coalition_value();
      const double delta = cur - prev;
      sum[j] += delta;
      sum_sq[j] += delta * delta;
      prev = cur;
    }
  }
  Explanation e;
  e.phi.resize(k);
  e.standard_errors.resize(k);
  const double m = static_cast<double>(n_permutations);
  for (std::size_t j = 0; j < k; ++j) {
    e.phi[j] = sum[j] / m;
    const double var = n_permutations > 1 ? std::max(0.0, (sum_sq[j] - m * e.phi[j] * e.phi[j]) / (m - 1)) : 0.0;
    e.standard_errors[j] = std::sqrt(var / m);
  }
  e.base_value = base;
  e.prediction = prediction;
  e.raw_residual = prediction - base - std::accumulate(e.phi.begin(), e.phi.end(), 0.0);
  const double se_total = std::accumulate(e.standard_errors.begin(), e.standard_errors.end(), 0.0);
  for (std::size_t j = 0; j < k; ++j)
    e.phi[j] += e.raw_residual * (se_total > 0 ? e.standard_errors[j] / se_total : 1.0 / static_cast<double>(k));
  e.scale = scale;
  e.method = "sampling";
  e.feature_values.assign(x.begin(), x.end());
  return e;
}

inline Explanation shapley_sampling(const Model& model, std::span<const double> x, const BackgroundSet& bg,
                                    std::size_t n_permutations, std::uint64_t seed) {
  return shapley_sampling(model, x, bg, n_permutations, seed, natural_scale(model));
}

// Exact fast path per family: tree explainer for tree families, closed form
// (margin scale) for linear families.
inline Explanation explain(const Model& model, std::span<const double> x, const BackgroundSet& bg) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) return shapley_linear(*lin, x, bg);
  return shapley_tree_exact(model, x, bg);
}

inline std::vector<Explanation> explain_rows(const Model& model, const Dataset& ds, const BackgroundSet& bg) {
  require_complete(ds);
  std::vector<Explanation> out(ds.rows());
  parallel_for(ds.rows(), [&](std::size_t i) { out[i] = explain(model, ds.row(i), bg); });
  return out;
}

enum class ImportanceMethod { Gain, MeanAbsShap };

struct GlobalImportance {
  std::vector<std::string> names;
  std::vector<double> importance;
  ImportanceMethod method = ImportanceMethod::Gain;
  std::vector<std::size_t> ranking;  // feature indices, most important first

  std::vector<std::string> top(std::size_t n) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(n, ranking.size()); ++i) out.push_back(names[ranking[i]]);
    return out;
  }
};

namespace detail {

inline void rank(GlobalImportance& g) {
  g.ranking.resize(g.importance.size());
  std::iota(g.ranking.begin(), g.ranking.end(), 0);
  std::stable_sort(g.ranking.begin(), g.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return g.importance[a] > g.importance[b]; });
}

inline std::vector<std::string> feature_names(const FeatureSchema& schema) {
  std::vector<std::string> names;
  for (const auto& f : schema.features()) names.push_back(f.name);
  return names;
}

}  // namespace detail

// Per feature, the summed split gain (boosted) or cover-weighted Gini
// decrease (CART, forest) over every split on it, normalized to sum 1.
inline GlobalImportance gain_importance(const Model& model, const FeatureSchema& schema) {
  std::vector<const TreeModel*> trees;
  if (const auto* t = std::get_if<TreeModel>(&model)) trees.push_back(t);
  else if (const auto* f = std::get_if<ForestModel>(&model)) for (const auto& t : f->trees) trees.push_back(&t);
  else if (const auto* b = std::get_if<BoostedModel>(&model)) for (const auto& t : b->trees) trees.push_back(&t);
  else throw Error(ErrorCode::UnsupportedModel, "gain importance needs a tree-family model");
  GlobalImportance g;
  g.names = detail::feature_names(schema);
  g.method = ImportanceMethod::Gain;
  g.importance.assign(schema.size(), 0.0);
  for (const auto* t : trees)
    for (std::size_t i = 0; i < t->node_count(); ++i)
      if (!t->is_leaf(i)) g.importance.at(static_cast<std::size_t>(t->feature[i])) += std::max(0.0, t->gain[i]);
  const double total = std::accumulate(g.importance.begin(), g.importance.end(), 0.0);
  if (total > 0)
    for (auto& v : g.importance) v /= total;
  detail::rank(g);
  return g;
}

inline GlobalImportance global_mean_abs_shap(std::span<const Explanation> explanations, const FeatureSchema& schema) {
  GlobalImportance g;
  g.names = detail::feature_names(schema);
  g.method = ImportanceMethod::MeanAbsShap;
  g.importance.assign(schema.size(), 0.0);
  for (const auto& e : explanations)
    for (std::size_t j = 0; j < schema.size(); ++j) g.importance[j] += std::fabs(e.phi.at(j));
  if (!explanations.empty())
    for (auto& v : g.importance) v /= static_cast<double>(explanations.size());
  detail::rank(g);
  return g;
}

inline GlobalImportance global_mean_abs_shap(const Model& model, const Dataset& ds, const BackgroundSet& bg) {
  const auto explanations = explain_rows(model, ds, bg);
  return global_mean_abs_shap(explanations, ds.schema);
}

struct BeeswarmRecord {
  std::size_t row = 0;
  std::size_t feature = 0;
  double value = 0;
  double phi = 0;
};

struct BeeswarmData {
  std::vector<BeeswarmRecord> records;  // row-major over (row, feature)
  std::vector<double> base_values;      // per row
  std::vector<double> predictions;      // per row
  OutputScale scale = OutputScale::Probability;
};

inline BeeswarmData beeswarm_export(const Model& model, const Dataset& ds, const BackgroundSet& bg) {
  const auto explanations = explain_rows(model, ds, bg);
  BeeswarmData out;
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    const auto& e = explanations[i];
    for (std::size_t j = 0; j < ds.cols(); ++j) out.records.push_back({i, j, ds.at(i, j), e.phi[j]});
    out.base_values.push_back(e.base_value);
    out.predictions.push_back(e.prediction);
    out.scale = e.scale;
  }
  return out;
}

struct DependenceSummary {
  double value = 0;
  std::size_t count = 0;
  double mean_phi = 0;
  double fraction_positive = 0;
};

struct DependenceData {
  std::string feature;
  std::vector<std::pair<double, double>> points;  // (feature value, phi) per row
  std::vector<DependenceSummary> summary;         // per category, categorical features only
};

inline DependenceData dependence_values(std::span<const Explanation> explanations, const Dataset& ds,
                                        std::string_view feature) {
  const std::size_t j = ds.schema.require_index(feature);
  DependenceData d;
  d.feature = ds.schema.feature(j).name;
  for (std::size_t i = 0; i < explanations.size(); ++i) d.points.emplace_back(ds.at(i, j), explanations[i].phi[j]);
  if (ds.schema.feature(j).is_categorical()) {
    std::map<double, DependenceSummary> by_value;
    for (const auto& [v, phi] : d.points) {
      auto& s = by_value[v];
      s.value = v;
      ++s.count;
      s.mean_phi += phi;
      s.fraction_positive += phi > 0 ? 1.0 : 0.0;
    }
    for (auto& [v, s] : by_value) {
      s.mean_phi /= static_cast<double>(s.count);
      s.fraction_positive /= static_cast<double>(s.count);
      d.summary.push_back(s);
    }
  }
  return d;
}

inline DependenceData dependence_values(const Model& model, const Dataset& ds, const BackgroundSet& bg,
                                        std::string_view feature) {
  ds.schema.require_index(feature);
  const auto explanations = explain_rows(model, ds, bg);
  return dependence_values(explanations, ds, feature);
}

// Serialization. Per-feature records carry the (id, feature, value, shap)
// columns of a single-sample attribution table.
inline json to_json(const Explanation& e, const FeatureSchema& schema) {
  json feats = json::array();
  for (std::size_t j = 0; j < e.phi.size(); ++j) {
    json f{{"id", j}, {"feature", schema.feature(j).name}, {"value", e.feature_values.at(j)}, {"shap", e.phi[j]}};
    if (!e.standard_errors.empty()) f["standard_error"] = e.standard_errors[j];
    feats.push_back(f);
  }
  json out{{"format_version", kExplanationFormatVersion},
           {"kind", "explanation"},
           {"method", e.method},
           {"output_scale", to_string(e.scale)},
           {"base_value", e.base_value},
           {"prediction", e.prediction},
           {"features", feats}};
  if (e.scale == OutputScale::Margin) {
    out["base_probability"] = sigmoid(e.base_value);
    out["predicted_probability"] = sigmoid(e.prediction);
  }
  if (e.method == "sampling") out["raw_residual"] = e.raw_residual;
  return out;
}

inline Explanation explanation_from_json(const json& j) {
  Explanation e;
  e.base_value = j.at("base_value").get<double>();
  e.prediction = j.value("prediction", 0.0);
  e.scale = j.value("output_scale", std::string("probability")) == "margin" ? OutputScale::Margin
                                                                            : OutputScale::Probability;
  e.method = j.value("method", std::string("external"));
  for (const auto& f : j.at("features")) {
    e.feature_values.push_back(f.at("value").get<double>());
    e.phi.push_back(f.at("shap").get<double>());
  }
  if (!j.contains("prediction"))
    e.prediction = e.base_value + std::accumulate(e.phi.begin(), e.phi.end(), 0.0);
  return e;
}

inline json to_json(const GlobalImportance& g) {
  json feats = json::array();
  for (std::size_t r = 0; r < g.ranking.size(); ++r) {
    const auto j = g.ranking[r];
    feats.push_back({{"rank", r + 1}, {"id", j}, {"feature", g.names[j]}, {"importance", g.importance[j]}});
  }
  return json{{"format_version", kExplanationFormatVersion},
              {"kind", "global_importance"},
              {"method", g.method == ImportanceMethod::Gain ? "gain" : "mean_abs_shap"},
              {"features", feats}};
}

inline json to_json(const BeeswarmData& b, const FeatureSchema& schema) {
  json records = json::array();
  for (const auto& r : b.records)
    records.push_back({{"row", r.row}, {"id", r.feature}, {"feature", schema.feature(r.feature).name},
                       {"value", r.value}, {"shap", r.phi}});
  return json{{"format_version", kExplanationFormatVersion},
              {"kind", "beeswarm"},
              {"output_scale", to_string(b.scale)},
              {"base_values", b.base_values},
              {"predictions", b.predictions},
              {"records", records}};
}

inline json to_json(const DependenceData& d) {
  json points = json::array();
  for (const auto& [v, phi] : d.points) points.push_back({v, phi});
  json summary = json::array();
  for (const auto& s : d.summary)
    summary.push_back({{"value", s.value}, {"count", s.count}, {"mean_shap", s.mean_phi},
                       {"fraction_positive", s.fraction_positive}});
  return json{{"format_version", kExplanationFormatVersion},
              {"kind", "dependence"},
              {"feature", d.feature},
              {"points", points},
              {"summary", summary}};
}

}  // namespace riskforge
