#pragma once

// Descriptive analyses: class-conditional moments, per-code label counts,
// term frequencies over free text, and the Spearman correlation matrix.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "riskforge/tabular.hpp"

namespace riskforge {

inline constexpr int kReportFormatVersion = 1;

struct FeatureMoments {
  std::string feature;
  // Indexed by label: [0] = not suicide, [1] = suicide.
  double mean[2] = {0, 0};
  double std[2] = {0, 0};  // population standard deviation
  std::size_t count[2] = {0, 0};
};

struct ClassMoments {
  std::vector<FeatureMoments> features;

  const FeatureMoments& at(std::string_view name) const {
    for (const auto& f : features)
      if (f.feature == name) return f;
    throw Error(ErrorCode::UnknownFeature, "no moments for '" + std::string(name) + "'");
  }
};

inline ClassMoments class_conditional_moments(const Dataset& ds,
                                              const std::vector<std::string>& names) {
  if (ds.count_label(0) == 0 || ds.count_label(1) == 0)
    throw Error(ErrorCode::SingleClass, "class-conditional moments need both classes");
  ClassMoments out;
  for (const auto& name : names) {
    const std::size_t j = ds.schema.require_index(name);
    FeatureMoments m;
    m.feature = name;
    double sum[2] = {0, 0};
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      sum[ds.labels[i]] += ds.at(i, j);
      ++m.count[ds.labels[i]];
    }
    for (int c : {0, 1}) m.mean[c] = sum[c] / static_cast<double>(m.count[c]);
    double ss[2] = {0, 0};
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      const double d = ds.at(i, j) - m.mean[ds.labels[i]];
      ss[ds.labels[i]] += d * d;
    }
    for (int c : {0, 1}) m.std[c] = std::sqrt(ss[c] / static_cast<double>(m.count[c]));
    out.features.push_back(m);
  }
  return out;
}

inline ClassMoments class_conditional_moments(const Dataset& ds) {
  std::vector<std::string> names;
  for (const auto& f : ds.schema.features()) names.push_back(f.name);
  return class_conditional_moments(ds, names);
}

inline json to_json(const ClassMoments& m) {
  json feats = json::array();
  for (const auto& f : m.features) {
    feats.push_back({{"feature", f.feature},
                     {"suicide", {{"mean", f.mean[1]}, {"std", f.std[1]}, {"count", f.count[1]}}},
                     {"not_suicide", {{"mean", f.mean[0]}, {"std", f.std[0]}, {"count", f.count[0]}}}});
  }
  return json{{"format_version", kReportFormatVersion},
              {"kind", "class_moments"},
              {"std_convention", "population"},
              {"features", feats}};
}

struct GroupCountRow {
  int code = 0;
  std::string label;
  std::size_t suicide = 0;
  std::size_t not_suicide = 0;
};

struct GroupCounts {
  std::string feature;
  std::vector<GroupCountRow> rows;
};

inline GroupCounts group_label_counts(const Dataset& ds, std::string_view feature) {
  const std::size_t j = ds.schema.require_index(feature);
  const auto& spec = ds.schema.feature(j);
  if (!spec.is_categorical())
    throw Error(ErrorCode::NotCategorical, "'" + spec.name + "' is numeric");
  GroupCounts out;
  out.feature = spec.name;
  std::map<int, std::size_t> slot;
  for (const auto& c : spec.categories) {
    slot[c.code] = out.rows.size();
    out.rows.push_back({c.code, c.label, 0, 0});
  }
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    auto& row = out.rows.at(slot.at(static_cast<int>(ds.at(i, j))));
    (ds.labels[i] ? row.suicide : row.not_suicide) += 1;
  }
  return out;
}

inline json to_json(const GroupCounts& g) {
  json rows = json::array();
  for (const auto& r : g.rows)
    rows.push_back({{"code", r.code}, {"label", r.label},
                    {"suicide", r.suicide}, {"not_suicide", r.not_suicide}});
  return json{{"format_version", kReportFormatVersion}, {"kind", "group_counts"},
              {"feature", g.feature}, {"rows", rows}};
}

inline const std::vector<std::string>& default_stop_words() {
  static const std::vector<std::string> words = {
      "a", "about", "after", "all", "also", "an", "and", "any", "are", "as",
      "at", "be", "because", "been", "but", "by", "can", "due", "for", "from",
      "had", "has", "have", "he", "her", "his", "in", "into", "is", "it",
      "its", "not", "of", "on", "or", "other", "she", "so", "than", "that",
      "the", "their", "them", "there", "they", "this", "to", "was", "were",
      "which", "who", "with"};
  return words;
}

// One word per line; blank lines and lines starting with '#' are skipped.
inline std::vector<std::string> load_stop_words(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open stop-word list " + path);
  std::vector<std::string> words;
  for (std::string line; std::getline(in, line);) {
    const auto w = detail::trim(line);
    if (!w.empty() && w.front() != '#') words.push_back(w);
  }
  return words;
}

struct TermCount {
  std::string term;
  std::size_t count = 0;
};

using TermFrequencies = std::vector<TermCount>;

// Lowercases, splits on ASCII non-alphanumerics (bytes >= 0x80 stay inside
// tokens), drops stop words and tokens shorter than three bytes. top_n == 0
// returns every term.
inline TermFrequencies term_frequencies(const Dataset& ds, std::string_view text_column,
                                        std::size_t top_n,
                                        const std::vector<std::string>& stop_words = default_stop_words()) {
  const auto& cols = ds.schema.text_columns();
  auto it = std::find(cols.begin(), cols.end(), text_column);
  if (it == cols.end())
    throw Error(ErrorCode::UnknownColumn, "'" + std::string(text_column) + "' is not a text column");
  const std::set<std::string> stop(stop_words.begin(), stop_words.end());
  std::map<std::string, std::size_t> counts;
  auto flush = [&](std::string& token) {
    if (token.size() >= 3 && !stop.count(token)) ++counts[token];
    token.clear();
  };
  for (const auto& text : ds.text.at(static_cast<std::size_t>(it - cols.begin()))) {
    std::string token;
    for (unsigned char c : text) {
      if (std::isalnum(c) || c >= 0x80) token.push_back(static_cast<char>(std::tolower(c)));
      else flush(token);
    }
    flush(token);
  }
  TermFrequencies out;
  for (auto& [term, count] : counts) out.push_back({term, count});
  std::stable_sort(out.begin(), out.end(),
                   [](const TermCount& a, const TermCount& b) { return a.count > b.count; });
  if (top_n > 0 && out.size() > top_n) out.resize(top_n);
  return out;
}

inline json to_json(const TermFrequencies& tf) {
  json terms = json::array();
  for (const auto& t : tf) terms.push_back({{"term", t.term}, {"count", t.count}});
  return json{{"format_version", kReportFormatVersion}, {"kind", "term_frequencies"},
              {"terms", terms}};
}

// Ranks with ties sharing the average of the positions they span (1-based).
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major, names.size() squared
  std::vector<bool> constant;  // columns whose correlations were set to 0

  std::size_t size() const { return names.size(); }
  double at(std::size_t a, std::size_t b) const { return values[a * size() + b]; }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw Error(ErrorCode::UnknownFeature, "no variable '" + std::string(name) + "'");
  }
};

inline CorrelationMatrix spearman_matrix(const Dataset& ds, bool include_label) {
  const std::size_t n = ds.rows();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "Spearman correlation needs at least two rows");
  CorrelationMatrix out;
  std::vector<std::vector<double>> centered;
  std::vector<double> norms;
  auto add = [&](const std::string& name, const std::vector<double>& column) {
    auto r = average_ranks(column);
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (auto& v : r) {
      v -= mean;
      ss += v * v;
    }
    out.names.push_back(name);
    out.constant.push_back(!(ss > 0));
    norms.push_back(std::sqrt(ss));
    centered.push_back(std::move(r));
  };
  for (std::size_t j = 0; j < ds.cols(); ++j) add(ds.schema.feature(j).name, ds.column(j));
  if (include_label) add(ds.schema.label_name(), std::vector<double>(ds.labels.begin(), ds.labels.end()));

  const std::size_t m = out.names.size();
  out.values.assign(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    out.values[a * m + a] = 1.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      double r = 0;
      if (!out.constant[a] && !out.constant[b]) {
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
        r = std::clamp(dot / (norms[a] * norms[b]), -1.0, 1.0);
      }
      out.values[a * m + b] = out.values[b * m + a] = r;
    }
  }
  return out;
}

inline json to_json(const CorrelationMatrix& c) {
  std::vector<std::string> constant;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.constant[i]) constant.push_back(c.names[i]);
  return json{{"format_version", kReportFormatVersion}, {"kind", "spearman_matrix"},
              {"names", c.names}, {"values", c.values}, {"constant_columns", constant}};
}

}  // namespace riskforge
