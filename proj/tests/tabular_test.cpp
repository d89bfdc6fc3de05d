#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "test_support.hpp"

using namespace rftest;

namespace {

FeatureSchema small_schema() {
  auto age = numeric("Age");
  age.range = std::make_pair(0.0, 120.0);
  return FeatureSchema({age, categorical("Gender", {0, 1}), categorical("Religion", {0, 1, 2, 3})}, "Suicide",
                       {"Note"}, {"Patient ID"});
}

CsvLoad parse(const std::string& text, const FeatureSchema& schema) {
  std::istringstream in(text);
  return parse_csv(in, schema);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no riskforge::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Csv, RecordsFollowRfc4180) {
  std::istringstream in("a,b,c\r\n\"x, y\",\"say \"\"hi\"\"\",\"multi\nline\"\n1,,3\n");
  const auto rec = parse_csv_records(in);
  ASSERT_EQ(rec.size(), 3u);
  EXPECT_EQ(rec[1][0], "x, y");
  EXPECT_EQ(rec[1][1], "say \"hi\"");
  EXPECT_EQ(rec[1][2], "multi\nline");
  EXPECT_EQ(rec[2], (std::vector<std::string>{"1", "", "3"}));
}

TEST(Csv, RowBecomesFeatureVector) {
  const auto load = parse("Patient ID,Age,Gender,Religion,Note,Suicide\n7,56,1,3,hanging,1\n", small_schema());
  ASSERT_EQ(load.dataset.rows(), 1u);
  EXPECT_EQ(load.dataset.row(0)[0], 56);
  EXPECT_EQ(load.dataset.row(0)[1], 1);
  EXPECT_EQ(load.dataset.row(0)[2], 3);
  EXPECT_EQ(load.dataset.labels[0], 1);
  EXPECT_EQ(load.dataset.text[0][0], "hanging");
  EXPECT_TRUE(load.ignored_columns.empty());
}

TEST(Csv, QuestionMarkAndEmptyAreMissing) {
  const auto ds = parse("Age,Gender,Religion,Note,Suicide,Extra\n?,1,,x,0,9\n30,0,2,,1,9\n", small_schema());
  EXPECT_TRUE(is_missing(ds.dataset.at(0, 0)));
  EXPECT_TRUE(is_missing(ds.dataset.at(0, 2)));
  EXPECT_FALSE(is_missing(ds.dataset.at(1, 0)));
  EXPECT_EQ(ds.ignored_columns, std::vector<std::string>{"Extra"});
}

TEST(Csv, Rejections) {
  const auto schema = small_schema();
  EXPECT_EQ(code_of([&] { parse("Age,Gender,Note,Suicide\n1,1,x,0\n", schema); }), ErrorCode::MissingColumn);
  EXPECT_EQ(code_of([&] { parse("Age,Gender,Religion,Note,Suicide\n", schema); }), ErrorCode::EmptyDataset);
  EXPECT_EQ(code_of([&] { parse("Age,Gender,Religion,Note,Suicide\n130,1,1,x,0\n", schema); }),
            ErrorCode::TypeError);
  EXPECT_EQ(code_of([&] { parse("Age,Gender,Religion,Note,Suicide\n30,1,1,x,2\n", schema); }),
            ErrorCode::TypeError);
  try {
    parse("Age,Gender,Religion,Note,Suicide\n30,1,1,x,0\n31,1,9,x,0\n", schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeError);
    EXPECT_NE(std::string(e.what()).find("row 2, column 'Religion': undeclared code 9"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { load_csv("/nonexistent.csv", FeatureSchema()); }), ErrorCode::MissingInput);
}

TEST(Csv, WriteThenParseRoundTrips) {
  auto ds = parse("Age,Gender,Religion,Note,Suicide\n30.25,1,?,\"a, \"\"b\"\"\",0\n0.1,0,3,,1\n", small_schema())
                .dataset;
  std::ostringstream out;
  write_csv(out, ds);
  EXPECT_EQ(parse(out.str(), small_schema()).dataset, ds);
}

TEST(Schema, JsonRoundTripAndFingerprint) {
  const auto s = small_schema();
  const auto back = FeatureSchema::from_json(s.to_json());
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.fingerprint(), s.fingerprint());
  auto j = s.to_json();
  j["features"][1]["categories"].push_back({{"code", 2}, {"label", "other"}});
  EXPECT_NE(FeatureSchema::from_json(j).fingerprint(), s.fingerprint());
  j["format_version"] = 2;
  EXPECT_EQ(code_of([&] { FeatureSchema::from_json(j); }), ErrorCode::VersionMismatch);
  EXPECT_EQ(code_of([&] { s.require_index("Nope"); }), ErrorCode::UnknownFeature);
}

TEST(Cohort, SchemaDeclaresNineteenFeatures) {
  const auto schema = cohort_schema();
  EXPECT_EQ(schema.size(), 19u);
  EXPECT_EQ(schema.feature(0).name, "Age");
  EXPECT_EQ(schema.feature(18).name, "Humiliated");
  const auto load = load_csv(source_path("data/cohort/cohort.csv"), schema);
  EXPECT_EQ(load.dataset.rows(), 1000u);
  EXPECT_EQ(load.dataset.count_label(1), 500u);
}

TEST(Impute, MedianAndSmallestModeCode) {
  FeatureSchema s({numeric("x"), categorical("c", {0, 1, 2})}, "y");
  const double nan = missing_value();
  auto ds = make_dataset(s, {{1, 2}, {4, 1}, {nan, 1}, {10, 2}, {3, nan}}, {0, 1, 0, 1, 0});
  const auto r = impute(ds);
  // observed x = {1, 4, 10, 3}: median (3 + 4) / 2; codes 1 and 2 tie twice each.
  EXPECT_EQ(r.dataset.at(2, 0), 3.5);
  EXPECT_EQ(r.dataset.at(4, 1), 1);
  EXPECT_EQ(r.imputed_counts, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(impute(r.dataset).dataset, r.dataset);
  auto all_missing = make_dataset(s, {{nan, 1}, {nan, 2}}, {0, 1});
  EXPECT_EQ(code_of([&] { impute(all_missing); }), ErrorCode::AllMissingColumn);
}

TEST(Impute, IdempotentOnRandomData) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ds = random_dataset(40, 4, seed);
    Rng rng(seed + 100);
    for (auto& v : ds.values)
      if (rng.uniform() < 0.2) v = missing_value();
    for (std::size_t j = 0; j < ds.cols(); ++j) ds.at(0, j) = 1;  // keep every column observed
    const auto once = impute(ds).dataset;
    EXPECT_EQ(impute(once).dataset, once);
    for (double v : once.values) EXPECT_FALSE(is_missing(v));
  }
}

TEST(Encoding, TreesPassValuesThrough) {
  const auto ds = random_dataset(10, 3, 5);
  const auto m = encode_for_trees(ds);
  EXPECT_EQ(m.values, ds.values);
  EXPECT_EQ(decode_from_trees(m, ds.schema), ds);
  auto gap = ds;
  gap.at(3, 1) = missing_value();
  EXPECT_EQ(code_of([&] { encode_for_trees(gap); }), ErrorCode::InvalidArgument);
}

TEST(Encoding, LinearStandardizesAndOneHots) {
  FeatureSchema s({numeric("x"), categorical("b", {0, 1}), categorical("c", {0, 1, 2}), numeric("k")}, "y");
  const auto ds = make_dataset(s, {{1, 0, 2, 5}, {2, 1, 0, 5}, {6, 1, 1, 5}}, {0, 1, 1});
  const auto enc = encode_for_linear(ds);
  ASSERT_EQ(enc.matrix.cols, 6u);  // x, b, c=0, c=1, c=2, k
  const double mean = 3, sd = std::sqrt((4.0 + 1.0 + 9.0) / 3.0);
  EXPECT_NEAR(enc.matrix.at(0, 0), (1 - mean) / sd, 1e-15);
  EXPECT_NEAR(enc.matrix.at(2, 0), (6 - mean) / sd, 1e-15);
  EXPECT_EQ(enc.matrix.at(0, 1), 0);
  EXPECT_EQ(enc.matrix.at(1, 1), 1);
  EXPECT_EQ((std::vector<double>{enc.matrix.at(0, 2), enc.matrix.at(0, 3), enc.matrix.at(0, 4)}),
            (std::vector<double>{0, 0, 1}));
  EXPECT_EQ(enc.matrix.at(1, 5), 0);  // constant column centered only
  ASSERT_EQ(enc.warnings.size(), 1u);
  EXPECT_NE(enc.warnings[0].find("ZeroVariance"), std::string::npos);
  EXPECT_EQ(enc.matrix.source_feature, (std::vector<std::size_t>{0, 1, 2, 2, 2, 3}));
  const auto restored = LinearEncoder::from_json(enc.encoder.to_json());
  EXPECT_EQ(restored.transform(ds.row(2)), enc.encoder.transform(ds.row(2)));
  EXPECT_EQ(code_of([&] { enc.encoder.transform(std::vector<double>{1, 2}); }), ErrorCode::SchemaMismatch);
}

TEST(Split, StratifiedPartition) {
  const auto ds = random_dataset(203, 3, 11);
  for (double f : {0.2, 0.3}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto sp = stratified_split(ds, f, seed);
      std::set<std::size_t> all(sp.train_indices.begin(), sp.train_indices.end());
      for (auto i : sp.test_indices) EXPECT_TRUE(all.insert(i).second);
      EXPECT_EQ(all.size(), ds.rows());
      for (int c : {0, 1}) {
        const auto expected = std::llround(static_cast<double>(ds.count_label(c)) * f);
        EXPECT_EQ(static_cast<long long>(sp.test.count_label(c)), expected);
      }
      const auto again = stratified_split(ds, f, seed);
      EXPECT_EQ(again.test_indices, sp.test_indices);
    }
  }
  EXPECT_NE(stratified_split(ds, 0.2, 1).test_indices, stratified_split(ds, 0.2, 2).test_indices);
}

TEST(Split, DegenerateCases) {
  FeatureSchema s({numeric("x")}, "y");
  const auto tiny = make_dataset(s, {{1}, {2}, {3}}, {0, 0, 1});
  EXPECT_EQ(code_of([&] { stratified_split(tiny, 0.2, 1); }), ErrorCode::DegenerateSplit);
  EXPECT_EQ(code_of([&] { stratified_split(tiny, 1.5, 1); }), ErrorCode::InvalidArgument);
}
