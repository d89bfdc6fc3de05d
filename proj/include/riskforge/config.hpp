#pragma once

#include <cstddef>
#include <cstdint>

#include "json.hpp"

namespace riskforge {

struct TreeParams {
  int max_depth = 12;
  std::size_t min_samples_leaf = 5;
};

struct ForestParams {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  std::size_t features_per_split = 0;  // 0: floor(sqrt(k))
};

struct BoostParams {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double lambda = 1.0;
};

struct LogisticParams {
  double learning_rate = 0.1;
  std::size_t max_epochs = 500;
  double tolerance = 1e-6;
  double l2 = 1e-4;
};

struct PerceptronParams {
  std::size_t iterations = 10;
};

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 50;
};

struct TrainConfig {
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;
  LogisticParams logistic;
  PerceptronParams perceptron;
  SvmParams svm;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TreeParams, max_depth, min_samples_leaf)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ForestParams, n_trees, bootstrap, features_per_split)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BoostParams, rounds, learning_rate, max_depth, lambda)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LogisticParams, learning_rate, max_epochs, tolerance, l2)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PerceptronParams, iterations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SvmParams, lambda, epochs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, tree, forest, boost, logistic, perceptron, svm, seed)

}  // namespace riskforge
