#pragma once

// Class-conditional augmentation: each synthetic row draws its class from a
// prior, then every feature independently from that class's empirical
// marginal. Numeric draws resample the observed pool and add uniform jitter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "riskforge/parallel.hpp"
#include "riskforge/random.hpp"
#include "riskforge/stats.hpp"
#include "riskforge/tabular.hpp"

namespace riskforge {

inline constexpr int kSynthesizerFormatVersion = 1;

struct Marginal {
  // Categorical: codes with probabilities (sums to 1).
  std::vector<int> codes;
  std::vector<double> probs;
  // Numeric: sorted observed pool, jitter half-width, clip range.
  std::vector<double> pool;
  double bandwidth = 0;
  double lo = 0;
  double hi = 0;
};

// Linear-interpolated quantile of a sorted sample.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// h = 0.5 * IQR / n^(1/5)
inline double jitter_bandwidth(std::span<const double> sorted) {
  if (sorted.size() < 2) return 0;
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  return 0.5 * iqr / std::pow(static_cast<double>(sorted.size()), 0.2);
}

struct Synthesizer {
  FeatureSchema schema;
  double class_prior = 0.5;  // P(label = 1)
  std::uint64_t fit_seed = 0;
  std::size_t fit_rows = 0;
  // marginals[c][j]
  std::vector<Marginal> marginals[2];
  // text pools per class, per text column
  std::vector<std::vector<std::string>> text_pools[2];

  json to_json() const {
    json classes = json::array();
    for (int c : {0, 1}) {
      json feats = json::array();
      for (std::size_t j = 0; j < marginals[c].size(); ++j) {
        const auto& m = marginals[c][j];
        if (schema.feature(j).is_categorical())
          feats.push_back({{"codes", m.codes}, {"probs", m.probs}});
        else
          feats.push_back({{"pool", m.pool}, {"bandwidth", m.bandwidth}, {"lo", m.lo}, {"hi", m.hi}});
      }
      classes.push_back({{"label", c}, {"features", feats}, {"text", text_pools[c]}});
    }
    return json{{"format_version", kSynthesizerFormatVersion},
                {"kind", "synthesizer"},
                {"schema", schema.to_json()},
                {"class_prior", class_prior},
                {"fit_seed", fit_seed},
                {"fit_rows", fit_rows},
                {"classes", classes}};
  }

  static Synthesizer from_json(const json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kSynthesizerFormatVersion)
      throw Error(ErrorCode::VersionMismatch,
                  "synthesizer format_version " + std::to_string(version) + ", expected " +
                      std::to_string(kSynthesizerFormatVersion));
    Synthesizer s;
    s.schema = FeatureSchema::from_json(j.at("schema"));
    s.class_prior = j.at("class_prior").get<double>();
    s.fit_seed = j.at("fit_seed").get<std::uint64_t>();
    s.fit_rows = j.at("fit_rows").get<std::size_t>();
    for (const auto& jc : j.at("classes")) {
      const int c = jc.at("label").get<int>();
      for (const auto& jf : jc.at("features")) {
        Marginal m;
        if (jf.contains("codes")) {
          m.codes = jf.at("codes").get<std::vector<int>>();
          m.probs = jf.at("probs").get<std::vector<double>>();
        } else {
          m.pool = jf.at("pool").get<std::vector<double>>();
          m.bandwidth = jf.at("bandwidth").get<double>();
          m.lo = jf.at("lo").get<double>();
          m.hi = jf.at("hi").get<double>();
        }
        s.marginals[c].push_back(std::move(m));
      }
      s.text_pools[c] = jc.at("text").get<std::vector<std::vector<std::string>>>();
    }
    return s;
  }
};

inline Synthesizer fit_synthesizer(const Dataset& train, std::uint64_t fit_seed = 0) {
  require_complete(train);
  const std::size_t n1 = train.count_label(1);
  if (n1 == 0 || n1 == train.rows())
    throw Error(ErrorCode::SingleClass, "synthesizer needs rows of both classes");
  Synthesizer s;
  s.schema = train.schema;
  s.fit_seed = fit_seed;
  s.fit_rows = train.rows();
  s.class_prior = static_cast<double>(n1) / static_cast<double>(train.rows());
  for (int c : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train.rows(); ++i)
      if (train.labels[i] == c) members.push_back(i);
    const double nc = static_cast<double>(members.size());
    for (std::size_t j = 0; j < train.cols(); ++j) {
      const auto& spec = train.schema.feature(j);
      Marginal m;
      if (spec.is_categorical()) {
        for (const auto& cat : spec.categories) {
          std::size_t count = 0;
          for (auto i : members) count += train.at(i, j) == cat.code;
          if (count == 0) continue;
          m.codes.push_back(cat.code);
          m.probs.push_back(static_cast<double>(count) / nc);
        }
      } else {
        for (auto i : members) m.pool.push_back(train.at(i, j));
        std::sort(m.pool.begin(), m.pool.end());
        m.bandwidth = jitter_bandwidth(m.pool);
        m.lo = m.pool.front();
        m.hi = m.pool.back();
      }
      s.marginals[c].push_back(std::move(m));
    }
    for (const auto& column : train.text) {
      std::vector<std::string> pool;
      for (auto i : members) pool.push_back(column[i]);
      s.text_pools[c].push_back(std::move(pool));
    }
  }
  return s;
}

namespace detail {

inline double draw(const Marginal& m, bool categorical, Rng& rng) {
  if (categorical) {
    const double u = rng.uniform();
    double acc = 0;
    for (std::size_t t = 0; t + 1 < m.probs.size(); ++t) {
      acc += m.probs[t];
      if (u < acc) return m.codes[t];
    }
    return m.codes.back();
  }
  double v = m.pool[rng.below(m.pool.size())];
  if (m.bandwidth > 0) v = std::clamp(v + rng.uniform(-m.bandwidth, m.bandwidth), m.lo, m.hi);
  return v;
}

}  // namespace detail

inline constexpr std::size_t kSynthShardRows = 4096;

// Rows are produced in shards of kSynthShardRows; shard s draws from the
// stream derive_seed(seed, {s}), so the output does not depend on worker
// count. class_ratio < 0 means "use the fitted prior".
inline Dataset generate(const Synthesizer& s, std::size_t n, std::uint64_t seed,
                        double class_ratio = -1) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "generate needs n >= 1");
  const double ratio = class_ratio < 0 ? s.class_prior : class_ratio;
  if (ratio > 1) throw Error(ErrorCode::InvalidArgument, "class_ratio must lie in [0, 1]");
  const std::size_t k = s.schema.size();
  const std::size_t t = s.text_pools[0].size();
  Dataset ds;
  ds.schema = s.schema;
  ds.values.assign(n * k, 0.0);
  ds.labels.assign(n, 0);
  ds.text.assign(t, std::vector<std::string>(n));
  std::vector<bool> categorical(k);
  for (std::size_t j = 0; j < k; ++j) categorical[j] = s.schema.feature(j).is_categorical();

  const std::size_t shards = (n + kSynthShardRows - 1) / kSynthShardRows;
  parallel_for(shards, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, {shard}));
    const std::size_t end = std::min(n, (shard + 1) * kSynthShardRows);
    for (std::size_t i = shard * kSynthShardRows; i < end; ++i) {
      const int c = rng.uniform() < ratio ? 1 : 0;
      ds.labels[i] = c;
      for (std::size_t j = 0; j < k; ++j)
        ds.values[i * k + j] = detail::draw(s.marginals[c][j], categorical[j], rng);
      for (std::size_t col = 0; col < t; ++col) {
        const auto& pool = s.text_pools[c][col];
        if (!pool.empty()) ds.text[col][i] = pool[rng.below(pool.size())];
      }
    }
  });
  return ds;
}

struct FidelityEntry {
  std::string feature;
  int label = 0;
  double original_mean = 0, original_std = 0;
  double synthetic_mean = 0, synthetic_std = 0;
  double mean_delta = 0, std_delta = 0;
};

struct FidelityReport {
  std::vector<FidelityEntry> entries;
  double max_mean_delta = 0;
  double max_std_delta = 0;
  std::size_t runs = 1;
  std::string limitation =
      "features are resampled independently within each class; cross-feature "
      "dependence is not preserved";

  const FidelityEntry& at(std::string_view feature, int label) const {
    for (const auto& e : entries)
      if (e.feature == feature && e.label == label) return e;
    throw Error(ErrorCode::UnknownFeature, "no fidelity entry for '" + std::string(feature) + "'");
  }

  void recompute_deltas() {
    max_mean_delta = max_std_delta = 0;
    for (auto& e : entries) {
      e.mean_delta = std::fabs(e.original_mean - e.synthetic_mean);
      e.std_delta = std::fabs(e.original_std - e.synthetic_std);
      max_mean_delta = std::max(max_mean_delta, e.mean_delta);
      max_std_delta = std::max(max_std_delta, e.std_delta);
    }
  }
};

inline FidelityReport fidelity_report(const Dataset& original, const Dataset& synthetic) {
  if (!(original.schema == synthetic.schema))
    throw Error(ErrorCode::SchemaMismatch, "original and synthetic schemas differ");
  const auto a = class_conditional_moments(original);
  const auto b = class_conditional_moments(synthetic);
  FidelityReport r;
  for (std::size_t j = 0; j < a.features.size(); ++j) {
    for (int c : {1, 0}) {
      FidelityEntry e;
      e.feature = a.features[j].feature;
      e.label = c;
      e.original_mean = a.features[j].mean[c];
      e.original_std = a.features[j].std[c];
      e.synthetic_mean = b.features[j].mean[c];
      e.synthetic_std = b.features[j].std[c];
      r.entries.push_back(e);
    }
  }
  r.recompute_deltas();
  return r;
}

// Averages synthetic moments across repeated generation runs, then recomputes
// the deltas against the (shared) original moments.
inline FidelityReport average_fidelity(std::span<const FidelityReport> runs) {
  if (runs.empty()) throw Error(ErrorCode::InvalidArgument, "no fidelity runs to average");
  FidelityReport out = runs.front();
  for (std::size_t e = 0; e < out.entries.size(); ++e) {
    double mean = 0, sd = 0;
    for (const auto& r : runs) {
      mean += r.entries.at(e).synthetic_mean;
      sd += r.entries.at(e).synthetic_std;
    }
    out.entries[e].synthetic_mean = mean / static_cast<double>(runs.size());
    out.entries[e].synthetic_std = sd / static_cast<double>(runs.size());
  }
  out.runs = runs.size();
  out.recompute_deltas();
  return out;
}

inline json to_json(const FidelityReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"feature", e.feature},
                       {"class", e.label ? "suicide" : "not_suicide"},
                       {"original", {{"mean", e.original_mean}, {"std", e.original_std}}},
                       {"synthetic", {{"mean", e.synthetic_mean}, {"std", e.synthetic_std}}},
                       {"delta", {{"mean", e.mean_delta}, {"std", e.std_delta}}}});
  return json{{"format_version", kReportFormatVersion},
              {"kind", "fidelity"},
              {"std_convention", "population"},
              {"runs", r.runs},
              {"max_mean_delta", r.max_mean_delta},
              {"max_std_delta", r.max_std_delta},
              {"limitation", r.limitation},
              {"entries", entries}};
}

}  // namespace riskforge
