#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "riskforge/tabular.hpp"

namespace rftest {

using namespace riskforge;

inline std::string source_path(const std::string& rel) { return std::string(RISKFORGE_SOURCE_DIR) + "/" + rel; }

inline FeatureSpec numeric(std::string name) {
  FeatureSpec f;
  f.name = std::move(name);
  return f;
}

inline FeatureSpec categorical(std::string name, std::vector<int> codes) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::Categorical;
  for (int c : codes) f.categories.push_back({c, "c" + std::to_string(c)});
  return f;
}

inline Dataset make_dataset(FeatureSchema schema, std::vector<std::vector<double>> rows, std::vector<int> labels) {
  Dataset ds;
  ds.schema = std::move(schema);
  for (const auto& r : rows) ds.values.insert(ds.values.end(), r.begin(), r.end());
  ds.labels = std::move(labels);
  return ds;
}

// k features: even indices numeric in [0, 10), odd indices categorical with
// codes 0..2; labels drawn from a noisy rule on the first two features.
inline Dataset random_dataset(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<FeatureSpec> feats;
  for (std::size_t j = 0; j < k; ++j)
    feats.push_back(j % 2 == 0 ? numeric("f" + std::to_string(j)) : categorical("f" + std::to_string(j), {0, 1, 2}));
  Dataset ds;
  ds.schema = FeatureSchema(feats, "y");
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      ds.values.push_back(j % 2 == 0 ? std::floor(rng.uniform(0, 10) * 4) / 4 : static_cast<double>(rng.below(3)));
    const double a = ds.values[i * k];
    const double b = k > 1 ? ds.values[i * k + 1] : 0;
    ds.labels.push_back((a > 5) != (b == 2) ? (rng.uniform() < 0.9) : (rng.uniform() < 0.15));
  }
  if (ds.count_label(0) == 0) ds.labels[0] = 0;
  if (ds.count_label(1) == 0) ds.labels[0] = 1;
  return ds;
}

inline FeatureSchema cohort_schema() { return FeatureSchema::load(source_path("data/cohort/schema.json")); }

inline Dataset cohort() { return impute(load_csv(source_path("data/cohort/cohort.csv"), cohort_schema()).dataset).dataset; }

inline std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("riskforge_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace rftest
