#include <gtest/gtest.h>

#include <fstream>

#include "riskforge/model.hpp"
#include "test_support.hpp"

using namespace rftest;

namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.forest.n_trees = 15;
  cfg.boost.rounds = 20;
  cfg.tree.max_depth = 6;
  return cfg;
}

ErrorCode load_error(const json& j) {
  try {
    artifact_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "artifact loaded";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Family, IdsRoundTrip) {
  for (auto f : kAllFamilies) EXPECT_EQ(family_from_id(family_id(f)), f);
  EXPECT_THROW(family_from_id("knn"), Error);
}

TEST(Artifact, SaveLoadPreservesScoresBitForBit) {
  const auto ds = random_dataset(300, 5, 21);
  const auto probes = random_dataset(100, 5, 22);
  const auto dir = temp_dir("artifact");
  for (auto f : kAllFamilies) {
    auto a = make_artifact(train_family(f, ds, small_config()), ds.schema, small_config(), json{{"note", 1}});
    a.fill_values = fill_values(ds);
    a.background.assign(ds.values.begin(), ds.values.begin() + 10 * 5);
    const auto path = dir + "/" + family_id(f) + ".json";
    save_artifact(a, path);
    const auto back = load_artifact(path, &ds.schema);
    EXPECT_EQ(back.family(), f);
    EXPECT_EQ(back.fill_values, a.fill_values);
    EXPECT_EQ(back.background, a.background);
    EXPECT_EQ(back.metrics, a.metrics);
    for (std::size_t i = 0; i < probes.rows(); ++i)
      ASSERT_EQ(predict_score(back.model, probes.row(i)), predict_score(a.model, probes.row(i))) << family_id(f);
    EXPECT_EQ(artifact_to_json(back), artifact_to_json(a));
  }
}

TEST(Artifact, RejectsVersionFingerprintAndWidth) {
  const auto ds = random_dataset(80, 3, 4);
  const auto a = make_artifact(train_family(Family::DecisionTree, ds), ds.schema, {});
  auto j = artifact_to_json(a);
  j["format_version"] = 99;
  EXPECT_EQ(load_error(j), ErrorCode::VersionMismatch);
  j = artifact_to_json(a);
  j["schema_fingerprint"] = "0000000000000000";
  EXPECT_EQ(load_error(j), ErrorCode::FingerprintMismatch);
  j = artifact_to_json(a);
  j["fill_values"] = {1.0};
  EXPECT_EQ(load_error(j), ErrorCode::Format);
  j = artifact_to_json(a);
  j["background"] = {1.0, 2.0};
  EXPECT_EQ(load_error(j), ErrorCode::Format);
  j = artifact_to_json(a);
  j.erase("model");
  EXPECT_EQ(load_error(j), ErrorCode::Format);

  const auto path = temp_dir("artifact_schema") + "/dt.json";
  save_artifact(a, path);
  const auto other = random_dataset(10, 4, 1).schema;
  try {
    load_artifact(path, &other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FingerprintMismatch);
  }
  try {
    load_artifact(path + ".missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingInput);
  }
}

TEST(Scoring, ScalesAndLabels) {
  const auto ds = random_dataset(200, 3, 9);
  const auto row = ds.row(0);
  for (auto f : kAllFamilies) {
    const auto m = train_family(f, ds, small_config());
    const bool probability = f == Family::DecisionTree || f == Family::RandomForest || f == Family::Logistic;
    EXPECT_EQ(natural_scale(m) == OutputScale::Probability, probability) << family_id(f);
    EXPECT_EQ(model_output(m, row, OutputScale::Probability), predict_score(m, row));
    EXPECT_EQ(predict_label(m, row, 0.3), predict_score(m, row) >= 0.3 ? 1 : 0);
    EXPECT_EQ(is_tree_family(m), f == Family::DecisionTree || f == Family::RandomForest ||
                                     f == Family::GradientBoosted);
  }
  const auto gbt = std::get<BoostedModel>(train_family(Family::GradientBoosted, ds, small_config()));
  EXPECT_DOUBLE_EQ(gbt.predict(row), 1 / (1 + std::exp(-gbt.margin(row))));
  EXPECT_EQ(model_output(Model(gbt), row, OutputScale::Margin), gbt.margin(row));
}
