#pragma once

// Uniform scoring contract over the six model families, plus the portable
// model artifact.

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "riskforge/config.hpp"
#include "riskforge/linear.hpp"
#include "riskforge/tabular.hpp"
#include "riskforge/tree.hpp"

namespace riskforge {

enum class Family { DecisionTree, RandomForest, GradientBoosted, Logistic, Perceptron, LinearSvm };

inline constexpr Family kAllFamilies[] = {Family::DecisionTree, Family::RandomForest,
                                          Family::GradientBoosted, Family::Logistic,
                                          Family::Perceptron, Family::LinearSvm};

inline std::string family_id(Family f) {
  switch (f) {
    case Family::DecisionTree: return "dt";
    case Family::RandomForest: return "rf";
    case Family::GradientBoosted: return "gbt";
    case Family::Logistic: return "lr";
    case Family::Perceptron: return "perceptron";
    case Family::LinearSvm: return "svm";
  }
  return "dt";
}

inline Family family_from_id(const std::string& id) {
  for (auto f : kAllFamilies)
    if (family_id(f) == id) return f;
  throw Error(ErrorCode::InvalidArgument, "unknown model family '" + id + "'");
}

using Model = std::variant<TreeModel, ForestModel, BoostedModel, LinearModel>;

inline Family family_of(const Model& m) {
  return std::visit(
      [](const auto& x) -> Family {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TreeModel>) return Family::DecisionTree;
        else if constexpr (std::is_same_v<T, ForestModel>) return Family::RandomForest;
        else if constexpr (std::is_same_v<T, BoostedModel>) return Family::GradientBoosted;
        else {
          switch (x.kind) {
            case LinearKind::Logistic: return Family::Logistic;
            case LinearKind::Perceptron: return Family::Perceptron;
            case LinearKind::Hinge: return Family::LinearSvm;
          }
          return Family::Logistic;
        }
      },
      m);
}

inline bool is_tree_family(const Model& m) { return !std::holds_alternative<LinearModel>(m); }

// Which quantity an explanation decomposes.
enum class OutputScale { Probability, Margin };

inline std::string to_string(OutputScale s) { return s == OutputScale::Probability ? "probability" : "margin"; }

// Probability for single trees, forests and logistic regression; margin
// (log-odds or raw hinge/perceptron margin) for boosted, SVM and perceptron.
inline OutputScale natural_scale(const Model& m) {
  switch (family_of(m)) {
    case Family::DecisionTree:
    case Family::RandomForest:
    case Family::Logistic: return OutputScale::Probability;
    default: return OutputScale::Margin;
  }
}

inline std::size_t input_width(const Model& m, std::size_t fallback) {
  if (const auto* lin = std::get_if<LinearModel>(&m)) return lin->encoder.input_width();
  return fallback;
}

inline double predict_score(const Model& m, std::span<const double> row) {
  return std::visit([&](const auto& x) { return x.predict(row); }, m);
}

inline int predict_label(const Model& m, std::span<const double> row, double threshold = 0.5) {
  return predict_score(m, row) >= threshold ? 1 : 0;
}

// Model output on the requested scale. Trees and forests have no margin;
// asking for one returns the probability unchanged.
inline double model_output(const Model& m, std::span<const double> row, OutputScale scale) {
  if (scale == OutputScale::Probability) return predict_score(m, row);
  if (const auto* b = std::get_if<BoostedModel>(&m)) return b->margin(row);
  if (const auto* l = std::get_if<LinearModel>(&m)) return l->margin(row);
  return predict_score(m, row);
}

inline Model train_family(Family f, const Dataset& train, const TrainConfig& cfg = {}) {
  switch (f) {
    case Family::DecisionTree: return train_decision_tree(encode_for_trees(train), cfg);
    case Family::RandomForest: return train_random_forest(encode_for_trees(train), cfg);
    case Family::GradientBoosted: return train_gradient_boosted(encode_for_trees(train), cfg);
    default: break;
  }
  auto enc = encode_for_linear(train);
  switch (f) {
    case Family::Logistic: return train_logistic_regression(enc.matrix, enc.encoder, cfg);
    case Family::Perceptron: return train_perceptron(enc.matrix, enc.encoder, cfg);
    default: return train_linear_svm(enc.matrix, enc.encoder, cfg);
  }
}

inline constexpr int kArtifactFormatVersion = 1;

struct ModelArtifact {
  Model model;
  FeatureSchema schema;
  std::string fingerprint;
  TrainConfig config;
  json metrics = json::object();
  // Optional serving context: per-feature gap fills and reference rows
  // (row-major, schema width) drawn from the training data.
  std::vector<double> fill_values;
  std::vector<double> background;
  int format_version = kArtifactFormatVersion;

  Family family() const { return family_of(model); }
};

namespace detail {

inline json model_to_json(const Model& m) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TreeModel>) {
          return json{{"tree", x.to_json()}};
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& t : x.trees) trees.push_back(t.to_json());
          return json{{"trees", trees}, {"tree_seeds", x.tree_seeds},
                      {"features_per_split", x.features_per_split}, {"bootstrap", x.bootstrap}};
        } else if constexpr (std::is_same_v<T, BoostedModel>) {
          json trees = json::array();
          for (const auto& t : x.trees) trees.push_back(t.to_json());
          return json{{"trees", trees}, {"base_margin", x.base_margin}, {"learning_rate", x.learning_rate},
                      {"lambda", x.lambda}, {"link", "logistic"}, {"train_loss", x.train_loss}};
        } else {
          return json{{"kind", to_string(x.kind)}, {"weights", x.weights}, {"bias", x.bias},
                      {"encoder", x.encoder.to_json()}, {"converged", x.converged},
                      {"epochs_run", x.epochs_run}};
        }
      },
      m);
}

inline Model model_from_json(Family f, const json& j) {
  switch (f) {
    case Family::DecisionTree: return TreeModel::from_json(j.at("tree"));
    case Family::RandomForest: {
      ForestModel fm;
      for (const auto& t : j.at("trees")) fm.trees.push_back(TreeModel::from_json(t));
      fm.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
      fm.features_per_split = j.at("features_per_split").get<std::size_t>();
      fm.bootstrap = j.at("bootstrap").get<bool>();
      return fm;
    }
    case Family::GradientBoosted: {
      BoostedModel bm;
      for (const auto& t : j.at("trees")) bm.trees.push_back(TreeModel::from_json(t));
      bm.base_margin = j.at("base_margin").get<double>();
      bm.learning_rate = j.at("learning_rate").get<double>();
      bm.lambda = j.at("lambda").get<double>();
      bm.train_loss = j.value("train_loss", std::vector<double>{});
      return bm;
    }
    default: {
      LinearModel lm;
      lm.kind = linear_kind_from_string(j.at("kind").get<std::string>());
      lm.weights = j.at("weights").get<std::vector<double>>();
      lm.bias = j.at("bias").get<double>();
      lm.encoder = LinearEncoder::from_json(j.at("encoder"));
      lm.converged = j.value("converged", true);
      lm.epochs_run = j.value("epochs_run", std::size_t{0});
      if (lm.weights.size() != lm.encoder.width())
        throw Error(ErrorCode::Format, "linear weights do not match encoder width");
      return lm;
    }
  }
}

}  // namespace detail

inline ModelArtifact make_artifact(Model model, const FeatureSchema& schema, const TrainConfig& cfg,
                                   json metrics = json::object()) {
  ModelArtifact a;
  a.model = std::move(model);
  a.schema = schema;
  a.fingerprint = schema.fingerprint();
  a.config = cfg;
  a.metrics = std::move(metrics);
  return a;
}

inline json artifact_to_json(const ModelArtifact& a) {
  json j{{"format_version", a.format_version},
         {"kind", "model_artifact"},
         {"family", family_id(a.family())},
         {"schema", a.schema.to_json()},
         {"schema_fingerprint", a.fingerprint},
         {"config", a.config},
         {"metrics", a.metrics},
         {"model", detail::model_to_json(a.model)}};
  if (!a.fill_values.empty()) j["fill_values"] = a.fill_values;
  if (!a.background.empty()) j["background"] = a.background;
  return j;
}

inline ModelArtifact artifact_from_json(const json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kArtifactFormatVersion)
      throw Error(ErrorCode::VersionMismatch, "artifact format_version " + std::to_string(version) +
                                                  " but this build reads version " +
                                                  std::to_string(kArtifactFormatVersion));
    ModelArtifact a;
    a.schema = FeatureSchema::from_json(j.at("schema"));
    a.fingerprint = j.at("schema_fingerprint").get<std::string>();
    if (a.fingerprint != a.schema.fingerprint())
      throw Error(ErrorCode::FingerprintMismatch, "artifact fingerprint " + a.fingerprint +
                                                      " does not match its schema (" +
                                                      a.schema.fingerprint() + ")");
    a.config = j.at("config").get<TrainConfig>();
    a.metrics = j.value("metrics", json::object());
    a.model = detail::model_from_json(family_from_id(j.at("family").get<std::string>()), j.at("model"));
    a.fill_values = j.value("fill_values", std::vector<double>{});
    a.background = j.value("background", std::vector<double>{});
    if (!a.fill_values.empty() && a.fill_values.size() != a.schema.size())
      throw Error(ErrorCode::Format, "fill_values width does not match the schema");
    if (a.background.size() % std::max<std::size_t>(1, a.schema.size()) != 0)
      throw Error(ErrorCode::Format, "background rows do not match the schema width");
    a.format_version = version;
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, std::string("malformed artifact: ") + e.what());
  }
}

inline void save_artifact(const ModelArtifact& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << artifact_to_json(a).dump(1) << '\n';
}

// When `expected` is given, the artifact must have been trained against it.
inline ModelArtifact load_artifact(const std::string& path, const FeatureSchema* expected = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open artifact " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, "artifact " + path + ": " + e.what());
  }
  auto a = artifact_from_json(j);
  if (expected && expected->fingerprint() != a.fingerprint)
    throw Error(ErrorCode::FingerprintMismatch, "artifact was trained on schema " + a.fingerprint +
                                                    ", expected " + expected->fingerprint());
  return a;
}

inline void check_row_width(const ModelArtifact& a, std::span<const double> row) {
  if (row.size() != a.schema.size())
    throw Error(ErrorCode::SchemaMismatch, "row has " + std::to_string(row.size()) + " values, model expects " +
                                               std::to_string(a.schema.size()));
}

}  // namespace riskforge
