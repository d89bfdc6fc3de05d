#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "riskforge/tree.hpp"
#include "test_support.hpp"

using namespace rftest;

namespace {

EncodedMatrix matrix(std::vector<std::vector<double>> rows, std::vector<int> labels) {
  EncodedMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
  m.labels = std::move(labels);
  return m;
}

EncodedMatrix random_matrix(std::size_t n, std::size_t k, std::uint64_t seed, int distinct = 0) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(k));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i]) v = distinct ? static_cast<double>(rng.below(distinct)) : rng.uniform(-3, 3);
    const double s = rows[i][0] + (k > 1 ? rows[i][1] * rows[i][1] * 0.3 : 0) + rng.uniform(-1, 1);
    y[i] = s > 0.5 ? 1 : 0;
  }
  return matrix(rows, y);
}

// Reference CART: every feature, every midpoint between consecutive distinct
// node values, impurity from direct counts. Ties keep the first candidate
// found (lowest feature, then lowest threshold).
struct NaiveNode {
  int feature = -1;
  double threshold = 0;
  double value = 0;
  double gain = 0;
  std::unique_ptr<NaiveNode> left, right;
};

double weighted_gini(double pos, double n) { return n - (pos * pos + (n - pos) * (n - pos)) / n; }

std::unique_ptr<NaiveNode> naive_cart(const EncodedMatrix& m, const std::vector<std::size_t>& rows, int depth,
                                      int max_depth, std::size_t min_leaf) {
  auto node = std::make_unique<NaiveNode>();
  double pos = 0;
  for (auto i : rows) pos += m.labels[i];
  const double n = static_cast<double>(rows.size());
  node->value = pos / n;
  if (depth >= max_depth || rows.size() < 2 * min_leaf || pos == 0 || pos == n) return node;
  bool found = false;
  double best_gain = 0, best_t = 0;
  int best_f = -1;
  for (std::size_t j = 0; j < m.cols; ++j) {
    std::set<double> values;
    for (auto i : rows) values.insert(m.at(i, j));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t b = 0; b + 1 < v.size(); ++b) {
      double t = 0.5 * (v[b] + v[b + 1]);
      if (!(v[b] < t && t <= v[b + 1])) t = v[b + 1];
      double lp = 0, ln = 0;
      for (auto i : rows)
        if (m.at(i, j) < t) {
          lp += m.labels[i];
          ln += 1;
        }
      if (ln < static_cast<double>(min_leaf) || n - ln < static_cast<double>(min_leaf)) continue;
      const double g = weighted_gini(pos, n) - weighted_gini(lp, ln) - weighted_gini(pos - lp, n - ln);
      if (!(g > -1e-9)) continue;
      if (found && !(g > best_gain + 1e-12 * std::max(1.0, std::fabs(best_gain)))) continue;
      found = true;
      best_gain = g;
      best_t = t;
      best_f = static_cast<int>(j);
    }
  }
  if (!found) return node;
  node->feature = best_f;
  node->threshold = best_t;
  node->gain = best_gain;
  std::vector<std::size_t> l, r;
  for (auto i : rows) (m.at(i, static_cast<std::size_t>(best_f)) < best_t ? l : r).push_back(i);
  node->left = naive_cart(m, l, depth + 1, max_depth, min_leaf);
  node->right = naive_cart(m, r, depth + 1, max_depth, min_leaf);
  return node;
}

void expect_same_tree(const TreeModel& t, std::size_t i, const NaiveNode& ref) {
  ASSERT_EQ(t.feature[i], ref.feature);
  if (ref.feature < 0) {
    EXPECT_DOUBLE_EQ(t.value[i], ref.value);
    return;
  }
  EXPECT_EQ(t.threshold[i], ref.threshold);
  EXPECT_NEAR(t.gain[i], ref.gain, 1e-9);
  expect_same_tree(t, static_cast<std::size_t>(t.left[i]), *ref.left);
  expect_same_tree(t, static_cast<std::size_t>(t.right[i]), *ref.right);
}

TrainConfig tree_cfg(int depth, std::size_t leaf) {
  TrainConfig cfg;
  cfg.tree.max_depth = depth;
  cfg.tree.min_samples_leaf = leaf;
  return cfg;
}

}  // namespace

TEST(Cart, MatchesNaiveReference) {
  int cases = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    for (int distinct : {0, 4}) {
      const auto m = random_matrix(60 + seed * 7, 3, seed, distinct);
      const int depth = 2 + static_cast<int>(seed % 5);
      const std::size_t leaf = 1 + seed % 4;
      const auto tree = train_decision_tree(m, tree_cfg(depth, leaf));
      std::vector<std::size_t> all(m.rows);
      std::iota(all.begin(), all.end(), 0);
      const auto ref = naive_cart(m, all, 0, depth, leaf);
      SCOPED_TRACE("seed " + std::to_string(seed));
      expect_same_tree(tree, 0, *ref);
      ++cases;
    }
  }
  EXPECT_EQ(cases, 60);
}

TEST(Cart, SeparableDataIsFitExactly) {
  const auto m = matrix({{1}, {2}, {3}, {10}, {11}, {12}}, {0, 0, 0, 1, 1, 1});
  const auto t = train_decision_tree(m, tree_cfg(12, 1));
  EXPECT_EQ(t.node_count(), 3u);
  EXPECT_EQ(t.threshold[0], 6.5);
  EXPECT_DOUBLE_EQ(t.gain[0], 3.0);  // 6 * 0.5 impurity removed
  for (std::size_t i = 0; i < m.rows; ++i) EXPECT_EQ(t.predict(m.row(i)), m.labels[i]);
}

TEST(Cart, XorNeedsZeroGainFirstSplit) {
  const auto m = matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  const auto t = train_decision_tree(m, tree_cfg(2, 1));
  EXPECT_EQ(t.depth(), 2);
  EXPECT_EQ(t.feature[0], 0);  // tie between features resolved to the lower index
  for (std::size_t i = 0; i < m.rows; ++i) EXPECT_EQ(t.predict(m.row(i)), m.labels[i]);
}

TEST(Cart, LimitsAndLeafFractions) {
  const auto m = random_matrix(500, 4, 9);
  for (int depth : {1, 3, 6}) {
    for (std::size_t leaf : {1, 5, 40}) {
      const auto t = train_decision_tree(m, tree_cfg(depth, leaf));
      EXPECT_LE(t.depth(), depth);
      std::map<std::size_t, std::pair<double, double>> seen;
      for (std::size_t i = 0; i < m.rows; ++i) {
        auto& s = seen[t.leaf_for(m.row(i))];
        s.first += m.labels[i];
        s.second += 1;
      }
      for (const auto& [leaf_id, s] : seen) {
        EXPECT_GE(s.second, static_cast<double>(leaf));
        EXPECT_DOUBLE_EQ(t.value[leaf_id], s.first / s.second);
        EXPECT_EQ(t.cover[leaf_id], s.second);
      }
    }
  }
}

TEST(Cart, DegenerateDataGivesSingleLeaf) {
  const auto m = matrix({{1, 2}, {1, 2}, {1, 2}, {1, 2}}, {0, 1, 1, 1});
  const auto r = train_decision_tree_with_report(m, tree_cfg(5, 1));
  EXPECT_EQ(r.tree.node_count(), 1u);
  EXPECT_DOUBLE_EQ(r.tree.value[0], 0.75);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("DegenerateData"), std::string::npos);
  EXPECT_THROW(train_decision_tree(matrix({{1}}, {1}), tree_cfg(5, 5)), Error);
}

TEST(Cart, JsonRoundTripAndValidation) {
  const auto t = train_decision_tree(random_matrix(200, 3, 4));
  const auto back = TreeModel::from_json(t.to_json());
  EXPECT_EQ(back.to_json(), t.to_json());
  auto j = t.to_json();
  j["value"].erase(0);
  EXPECT_THROW(TreeModel::from_json(j), Error);
}

TEST(Forest, OneUnbaggedTreeWithAllFeaturesIsCart) {
  const auto m = random_matrix(300, 4, 21);
  TrainConfig cfg = tree_cfg(6, 3);
  cfg.forest.n_trees = 1;
  cfg.forest.bootstrap = false;
  cfg.forest.features_per_split = 4;
  const auto f = train_random_forest(m, cfg);
  EXPECT_EQ(f.trees[0].to_json(), train_decision_tree(m, cfg).to_json());
}

TEST(Forest, MeanOfTreesDeterministicAcrossWorkers) {
  const auto m = random_matrix(400, 5, 2);
  TrainConfig cfg;
  cfg.forest.n_trees = 12;
  cfg.seed = 77;
  ::setenv("RISKFORGE_THREADS", "1", 1);
  const auto a = train_random_forest(m, cfg);
  ::setenv("RISKFORGE_THREADS", "3", 1);
  const auto b = train_random_forest(m, cfg);
  ::unsetenv("RISKFORGE_THREADS");
  EXPECT_EQ(a.features_per_split, 2u);
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    EXPECT_EQ(a.trees[t].to_json(), b.trees[t].to_json());
    EXPECT_EQ(a.tree_seeds[t], derive_seed(77, {t}));
  }
  for (std::size_t i = 0; i < 20; ++i) {
    double sum = 0;
    for (const auto& t : a.trees) sum += t.predict(m.row(i));
    EXPECT_DOUBLE_EQ(a.predict(m.row(i)), sum / 12);
  }
  cfg.seed = 78;
  EXPECT_NE(train_random_forest(m, cfg).trees[0].to_json(), a.trees[0].to_json());
}

TEST(Boosting, FirstRoundMatchesHandNewtonStep) {
  // One feature, one split: x < 2.5 holds labels {0, 0, 1}, the rest {1, 1, 1}.
  const auto m = matrix({{1}, {2}, {2}, {3}, {4}, {5}}, {0, 0, 1, 1, 1, 1});
  TrainConfig cfg;
  cfg.boost.rounds = 1;
  cfg.boost.max_depth = 1;
  cfg.boost.lambda = 1.0;
  cfg.boost.learning_rate = 0.3;
  const auto b = train_gradient_boosted(m, cfg);
  const double p = 4.0 / 6.0;
  EXPECT_DOUBLE_EQ(b.base_margin, std::log(p / (1 - p)));
  const auto& t = b.trees[0];
  ASSERT_EQ(t.node_count(), 3u);
  EXPECT_EQ(t.threshold[0], 2.5);
  const double h = p * (1 - p);
  const double gl = 3 * p - 1, hl = 3 * h;  // rows 0..2
  const double gr = 3 * p - 3, hr = 3 * h;  // rows 3..5
  const double g = gl + gr, hh = hl + hr;
  const auto left = static_cast<std::size_t>(t.left[0]), right = static_cast<std::size_t>(t.right[0]);
  EXPECT_NEAR(t.value[left], -gl / (hl + 1), 1e-12);
  EXPECT_NEAR(t.value[right], -gr / (hr + 1), 1e-12);
  EXPECT_NEAR(t.gain[0], 0.5 * (gl * gl / (hl + 1) + gr * gr / (hr + 1) - g * g / (hh + 1)), 1e-12);
  EXPECT_NEAR(b.margin(m.row(0)), b.base_margin + 0.3 * t.value[left], 1e-15);
}

TEST(Boosting, TrainingLossDecreases) {
  const auto m = random_matrix(600, 4, 13);
  TrainConfig cfg;
  cfg.boost.rounds = 40;
  const auto b = train_gradient_boosted(m, cfg);
  ASSERT_EQ(b.train_loss.size(), 41u);
  for (std::size_t r = 1; r < b.train_loss.size(); ++r) EXPECT_LE(b.train_loss[r], b.train_loss[r - 1] + 1e-12);
  EXPECT_LT(b.train_loss.back(), 0.6 * b.train_loss.front());
  for (const auto& t : b.trees) EXPECT_LE(t.depth(), 3);
  auto one_class = m;
  one_class.labels.assign(m.rows, 1);
  try {
    train_gradient_boosted(one_class, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}
