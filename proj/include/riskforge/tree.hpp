#pragma once

// Binary decision trees and the three tree learners: CART (Gini), random
// forest (bagged CART with per-node feature sampling) and second-order
// gradient-boosted trees on the logistic loss.
//
// All learners share one split search over pre-binned columns. A column's
// bins are its sorted distinct training values; a candidate split sits at the
// midpoint between two consecutive values present in the node, and rows go
// left iff value < threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "riskforge/config.hpp"
#include "riskforge/error.hpp"
#include "riskforge/parallel.hpp"
#include "riskforge/random.hpp"
#include "riskforge/tabular.hpp"

namespace riskforge {

enum class LeafSemantics { ClassProbability, MarginIncrement };

// Flat node arrays; node 0 is the root and feature[i] < 0 marks a leaf.
struct TreeModel {
  LeafSemantics semantics = LeafSemantics::ClassProbability;
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::vector<double> cover;
  std::vector<double> gain;  // loss reduction of the split; 0 at leaves

  std::size_t node_count() const { return feature.size(); }
  bool is_leaf(std::size_t node) const { return feature[node] < 0; }

  std::size_t leaf_for(std::span<const double> row) const {
    std::size_t node = 0;
    while (!is_leaf(node))
      node = static_cast<std::size_t>(row[static_cast<std::size_t>(feature[node])] < threshold[node]
                                          ? left[node]
                                          : right[node]);
    return node;
  }

  double predict(std::span<const double> row) const { return value[leaf_for(row)]; }

  int depth() const {
    std::vector<int> d(node_count(), 0);
    int best = 0;
    for (std::size_t i = 0; i < node_count(); ++i) {
      if (is_leaf(i)) continue;
      d[static_cast<std::size_t>(left[i])] = d[static_cast<std::size_t>(right[i])] = d[i] + 1;
      best = std::max(best, d[i] + 1);
    }
    return best;
  }

  std::size_t add_leaf(double v, double c) {
    feature.push_back(-1);
    threshold.push_back(0);
    left.push_back(-1);
    right.push_back(-1);
    value.push_back(v);
    cover.push_back(c);
    gain.push_back(0);
    return feature.size() - 1;
  }

  json to_json() const {
    return json{{"leaf_semantics",
                 semantics == LeafSemantics::ClassProbability ? "class_probability" : "margin_increment"},
                {"feature_index", feature}, {"threshold", threshold}, {"left", left},
                {"right", right}, {"value", value}, {"cover", cover}, {"gain", gain}};
  }

  static TreeModel from_json(const json& j) {
    TreeModel t;
    t.semantics = j.at("leaf_semantics").get<std::string>() == "class_probability"
                      ? LeafSemantics::ClassProbability
                      : LeafSemantics::MarginIncrement;
    t.feature = j.at("feature_index").get<std::vector<int>>();
    t.threshold = j.at("threshold").get<std::vector<double>>();
    t.left = j.at("left").get<std::vector<int>>();
    t.right = j.at("right").get<std::vector<int>>();
    t.value = j.at("value").get<std::vector<double>>();
    t.cover = j.at("cover").get<std::vector<double>>();
    t.gain = j.value("gain", std::vector<double>(t.feature.size(), 0.0));
    const std::size_t n = t.feature.size();
    if (t.threshold.size() != n || t.left.size() != n || t.right.size() != n ||
        t.value.size() != n || t.cover.size() != n || t.gain.size() != n || n == 0)
      throw Error(ErrorCode::Format, "tree node arrays have inconsistent lengths");
    for (std::size_t i = 0; i < n; ++i) {
      if (t.feature[i] < 0) continue;
      for (int child : {t.left[i], t.right[i]})
        if (child <= static_cast<int>(i) || child >= static_cast<int>(n))
          throw Error(ErrorCode::Format, "tree child index out of order");
    }
    return t;
  }
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t features_per_split = 0;
  bool bootstrap = true;

  double predict(std::span<const double> row) const {
    double sum = 0;
    for (const auto& t : trees) sum += t.predict(row);
    return trees.empty() ? 0.5 : sum / static_cast<double>(trees.size());
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct BoostedModel {
  std::vector<TreeModel> trees;
  double base_margin = 0;
  double learning_rate = 0.1;
  double lambda = 1.0;
  std::vector<double> train_loss;  // mean log-loss after each round, [0] = base

  double margin(std::span<const double> row) const {
    double sum = 0;
    for (const auto& t : trees) sum += t.predict(row);
    return base_margin + learning_rate * sum;
  }
  double predict(std::span<const double> row) const { return sigmoid(margin(row)); }
};

// Column-major bin indices plus each column's sorted distinct values.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> bins;           // bins[j * rows + i]
  std::vector<std::vector<double>> edges;    // distinct sorted values per column

  std::uint32_t bin(std::size_t i, std::size_t j) const { return bins[j * rows + i]; }

  static BinnedMatrix build(const EncodedMatrix& m) {
    BinnedMatrix b;
    b.rows = m.rows;
    b.cols = m.cols;
    b.bins.resize(m.rows * m.cols);
    b.edges.resize(m.cols);
    std::vector<double> column(m.rows);
    for (std::size_t j = 0; j < m.cols; ++j) {
      for (std::size_t i = 0; i < m.rows; ++i) column[i] = m.at(i, j);
      auto& e = b.edges[j];
      e = column;
      std::sort(e.begin(), e.end());
      e.erase(std::unique(e.begin(), e.end()), e.end());
      for (std::size_t i = 0; i < m.rows; ++i)
        b.bins[j * m.rows + i] = static_cast<std::uint32_t>(
            std::lower_bound(e.begin(), e.end(), column[i]) - e.begin());
    }
    return b;
  }
};

namespace detail {

// Gini criterion. Stats are (positive count, total count); the score of a
// split is the cover-weighted impurity decrease.
struct GiniCriterion {
  struct Stat {
    double pos = 0;
    double n = 0;
    Stat& operator+=(const Stat& o) {
      pos += o.pos;
      n += o.n;
      return *this;
    }
  };
  std::span<const int> labels;

  void add(Stat& s, std::uint32_t row) const {
    s.pos += labels[row];
    s.n += 1;
  }
  static Stat minus(const Stat& a, const Stat& b) { return {a.pos - b.pos, a.n - b.n}; }
  static double weighted_impurity(const Stat& s) {
    // n * gini = n - (pos^2 + neg^2) / n
    const double neg = s.n - s.pos;
    return s.n - (s.pos * s.pos + neg * neg) / s.n;
  }
  static double gain(const Stat& parent, const Stat& l, const Stat& r) {
    return weighted_impurity(parent) - weighted_impurity(l) - weighted_impurity(r);
  }
  // Zero-decrease splits are allowed (XOR-style interactions need them).
  static bool accept(double gain) { return gain > -1e-9; }
  static bool pure(const Stat& s) { return s.pos == 0 || s.pos == s.n; }
  static double leaf_value(const Stat& s) { return s.pos / s.n; }
};

// Second-order logistic criterion over per-row gradient/hessian.
struct NewtonCriterion {
  struct Stat {
    double g = 0;
    double h = 0;
    double n = 0;
    Stat& operator+=(const Stat& o) {
      g += o.g;
      h += o.h;
      n += o.n;
      return *this;
    }
  };
  std::span<const double> grad;
  std::span<const double> hess;
  double lambda = 1.0;

  void add(Stat& s, std::uint32_t row) const {
    s.g += grad[row];
    s.h += hess[row];
    s.n += 1;
  }
  static Stat minus(const Stat& a, const Stat& b) { return {a.g - b.g, a.h - b.h, a.n - b.n}; }
  double score(const Stat& s) const { return s.g * s.g / (s.h + lambda); }
  double gain(const Stat& parent, const Stat& l, const Stat& r) const {
    return 0.5 * (score(l) + score(r) - score(parent));
  }
  static bool accept(double gain) { return gain > 0; }
  static bool pure(const Stat&) { return false; }
  double leaf_value(const Stat& s) const { return -s.g / (s.h + lambda); }
};

template <typename Criterion>
class TreeGrower {
 public:
  using Stat = typename Criterion::Stat;

  TreeGrower(const BinnedMatrix& x, const Criterion& crit, int max_depth,
             std::size_t min_leaf, std::size_t features_per_split, Rng* feature_rng)
      : x_(x), crit_(crit), max_depth_(max_depth), min_leaf_(std::max<std::size_t>(1, min_leaf)),
        features_per_split_(features_per_split == 0 ? x.cols : std::min(features_per_split, x.cols)),
        rng_(feature_rng) {
    std::size_t widest = 1;
    for (const auto& e : x.edges) widest = std::max(widest, e.size());
    hist_.resize(widest);
  }

  TreeModel grow(std::vector<std::uint32_t> rows, LeafSemantics semantics) {
    tree_ = TreeModel{};
    tree_.semantics = semantics;
    rows_ = std::move(rows);
    degenerate_root_ = false;
    build(0, rows_.size(), 0);
    return std::move(tree_);
  }

  // True when the root had mixed labels but no feature separated any rows.
  bool degenerate_root() const { return degenerate_root_; }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    std::uint32_t last_left_bin = 0;
    double threshold = 0;
    double gain = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end, int depth) {
    Stat total{};
    for (std::size_t i = begin; i < end; ++i) crit_.add(total, rows_[i]);
    const double n = static_cast<double>(end - begin);

    const bool can_split = depth < max_depth_ && end - begin >= 2 * min_leaf_ && !Criterion::pure(total);
    Split best;
    if (can_split) best = find_split(begin, end, total);
    if (!best.found) {
      if (depth == 0 && can_split) degenerate_root_ = true;
      return tree_.add_leaf(crit_.leaf_value(total), n);
    }

    const std::size_t node = tree_.add_leaf(0, n);
    tree_.feature[node] = static_cast<int>(best.feature);
    tree_.threshold[node] = best.threshold;
    tree_.gain[node] = best.gain;
    auto mid = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                     rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                     [&](std::uint32_t r) { return x_.bin(r, best.feature) <= best.last_left_bin; });
    const std::size_t split = static_cast<std::size_t>(mid - rows_.begin());
    const std::size_t l = build(begin, split, depth + 1);
    const std::size_t r = build(split, end, depth + 1);
    tree_.left[node] = static_cast<int>(l);
    tree_.right[node] = static_cast<int>(r);
    return node;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(x_.cols);
    std::iota(all.begin(), all.end(), 0);
    if (features_per_split_ >= x_.cols || rng_ == nullptr) return all;
    for (std::size_t i = 0; i < features_per_split_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_->below(all.size() - i));
      std::swap(all[i], all[j]);
    }
    all.resize(features_per_split_);
    std::sort(all.begin(), all.end());
    return all;
  }

  Split find_split(std::size_t begin, std::size_t end, const Stat& total) {
    Split best;
    const std::size_t count = end - begin;
    for (std::size_t j : candidate_features()) {
      const auto& edges = x_.edges[j];
      const std::size_t nbins = edges.size();
      if (nbins < 2) continue;
      // Gather the bins present in this node with their stats, ascending.
      present_.clear();
      if (count * 4 >= nbins) {
        for (std::size_t b = 0; b < nbins; ++b) hist_[b] = Stat{};
        for (std::size_t i = begin; i < end; ++i) {
          const auto b = x_.bin(rows_[i], j);
          crit_.add(hist_[b], rows_[i]);
        }
        for (std::uint32_t b = 0; b < nbins; ++b)
          if (hist_[b].n > 0) present_.push_back(b);
      } else {
        keyed_.clear();
        for (std::size_t i = begin; i < end; ++i)
          keyed_.push_back((static_cast<std::uint64_t>(x_.bin(rows_[i], j)) << 32) | rows_[i]);
        std::sort(keyed_.begin(), keyed_.end());
        for (auto key : keyed_) {
          const auto b = static_cast<std::uint32_t>(key >> 32);
          if (present_.empty() || present_.back() != b) {
            present_.push_back(b);
            hist_[b] = Stat{};
          }
          crit_.add(hist_[b], static_cast<std::uint32_t>(key & 0xffffffffu));
        }
      }
      Stat left{};
      for (std::size_t p = 0; p + 1 < present_.size(); ++p) {
        const auto b = present_[p];
        const Stat& h = hist_[b];
        left += h;
        const Stat right = Criterion::minus(total, left);
        if (left.n < static_cast<double>(min_leaf_) || right.n < static_cast<double>(min_leaf_)) continue;
        const double g = crit_.gain(total, left, right);
        if (!Criterion::accept(g)) continue;
        if (best.found && !(g > best.gain + 1e-12 * std::max(1.0, std::fabs(best.gain)))) continue;
        const double lo = edges[b];
        const double hi = edges[present_[p + 1]];
        double t = 0.5 * (lo + hi);
        if (!(lo < t && t <= hi)) t = hi;
        best = {true, j, b, t, g};
      }
    }
    return best;
  }

  const BinnedMatrix& x_;
  const Criterion& crit_;
  int max_depth_;
  std::size_t min_leaf_;
  std::size_t features_per_split_;
  Rng* rng_;
  TreeModel tree_;
  std::vector<std::uint32_t> rows_;
  std::vector<Stat> hist_;
  std::vector<std::uint32_t> present_;
  std::vector<std::uint64_t> keyed_;
  bool degenerate_root_ = false;
};

}  // namespace detail

struct TreeTrainResult {
  TreeModel tree;
  std::vector<std::string> warnings;
};

inline void require_trainable(const EncodedMatrix& train, std::size_t min_rows) {
  if (train.rows < std::max<std::size_t>(1, min_rows))
    throw Error(ErrorCode::TooFewRows, "need at least " + std::to_string(min_rows) +
                                           " training rows, got " + std::to_string(train.rows));
  if (train.rows > 0xffffffffu) throw Error(ErrorCode::InvalidArgument, "too many rows");
}

inline TreeTrainResult train_decision_tree_with_report(const EncodedMatrix& train, const TrainConfig& cfg) {
  require_trainable(train, 2 * cfg.tree.min_samples_leaf);
  const auto binned = BinnedMatrix::build(train);
  detail::GiniCriterion crit{train.labels};
  detail::TreeGrower grower(binned, crit, cfg.tree.max_depth, cfg.tree.min_samples_leaf, 0, nullptr);
  std::vector<std::uint32_t> rows(train.rows);
  std::iota(rows.begin(), rows.end(), 0u);
  TreeTrainResult out{grower.grow(std::move(rows), LeafSemantics::ClassProbability), {}};
  if (grower.degenerate_root())
    out.warnings.push_back("DegenerateData: no split separates the rows; single leaf with class fraction");
  return out;
}

inline TreeModel train_decision_tree(const EncodedMatrix& train, const TrainConfig& cfg = {}) {
  return train_decision_tree_with_report(train, cfg).tree;
}

inline std::size_t default_features_per_split(std::size_t k) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(k)))));
}

// Tree t draws its bootstrap sample and its per-node feature subsets from one
// stream seeded by (seed, t), so trees can be grown in any order.
inline ForestModel train_random_forest(const EncodedMatrix& train, const TrainConfig& cfg = {}) {
  require_trainable(train, 2 * cfg.tree.min_samples_leaf);
  const auto binned = BinnedMatrix::build(train);
  detail::GiniCriterion crit{train.labels};
  ForestModel forest;
  forest.bootstrap = cfg.forest.bootstrap;
  forest.features_per_split = cfg.forest.features_per_split == 0
                                  ? default_features_per_split(train.cols)
                                  : std::min(cfg.forest.features_per_split, train.cols);
  forest.trees.resize(cfg.forest.n_trees);
  forest.tree_seeds.resize(cfg.forest.n_trees);
  for (std::size_t t = 0; t < cfg.forest.n_trees; ++t) forest.tree_seeds[t] = derive_seed(cfg.seed, {t});
  parallel_for(cfg.forest.n_trees, [&](std::size_t t) {
    Rng rng(forest.tree_seeds[t]);
    std::vector<std::uint32_t> rows(train.rows);
    if (forest.bootstrap) {
      for (auto& r : rows) r = static_cast<std::uint32_t>(rng.below(train.rows));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    detail::TreeGrower grower(binned, crit, cfg.tree.max_depth, cfg.tree.min_samples_leaf,
                              forest.features_per_split, &rng);
    forest.trees[t] = grower.grow(std::move(rows), LeafSemantics::ClassProbability);
  });
  return forest;
}

inline double mean_log_loss(std::span<const double> margins, std::span<const int> labels) {
  double loss = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double z = margins[i];
    // log(1 + e^z) - y z, evaluated without overflow
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - labels[i] * z;
  }
  return loss / static_cast<double>(std::max<std::size_t>(1, margins.size()));
}

inline BoostedModel train_gradient_boosted(const EncodedMatrix& train, const TrainConfig& cfg = {}) {
  require_trainable(train, 2);
  const std::size_t n = train.rows;
  const double positives = static_cast<double>(std::count(train.labels.begin(), train.labels.end(), 1));
  if (positives == 0 || positives == static_cast<double>(n))
    throw Error(ErrorCode::SingleClass, "gradient boosting needs both classes");
  const auto binned = BinnedMatrix::build(train);

  BoostedModel model;
  model.learning_rate = cfg.boost.learning_rate;
  model.lambda = cfg.boost.lambda;
  const double prior = positives / static_cast<double>(n);
  model.base_margin = std::log(prior / (1 - prior));

  std::vector<double> margin(n, model.base_margin), grad(n), hess(n);
  model.train_loss.push_back(mean_log_loss(margin, train.labels));
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  for (std::size_t round = 0; round < cfg.boost.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - train.labels[i];
      hess[i] = p * (1 - p);
    }
    detail::NewtonCriterion crit{grad, hess, cfg.boost.lambda};
    detail::TreeGrower grower(binned, crit, cfg.boost.max_depth, 1, 0, nullptr);
    TreeModel tree = grower.grow(all, LeafSemantics::MarginIncrement);
    for (std::size_t i = 0; i < n; ++i) margin[i] += model.learning_rate * tree.predict(train.row(i));
    const double loss = mean_log_loss(margin, train.labels);
    if (!std::isfinite(loss))
      throw Error(ErrorCode::NonFiniteLoss, "log-loss diverged at round " + std::to_string(round));
    model.train_loss.push_back(loss);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace riskforge
