#pragma once

// Typed tabular data: schema declaration, CSV ingestion, imputation,
// model-specific encodings and stratified splitting.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "riskforge/error.hpp"
#include "riskforge/random.hpp"

namespace riskforge {

using json = nlohmann::json;

inline constexpr int kSchemaFormatVersion = 1;

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

// 64-bit FNV-1a as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

enum class FeatureKind { Numeric, Categorical };

struct Category {
  int code = 0;
  std::string label;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::vector<Category> categories;                  // categorical only
  std::optional<std::pair<double, double>> range;    // numeric only

  bool is_categorical() const { return kind == FeatureKind::Categorical; }
  bool is_binary() const { return is_categorical() && categories.size() == 2; }

  bool has_code(int code) const {
    return std::any_of(categories.begin(), categories.end(),
                       [&](const Category& c) { return c.code == code; });
  }

  std::vector<int> codes() const {
    std::vector<int> out;
    for (const auto& c : categories) out.push_back(c.code);
    return out;
  }

  std::string label_for(int code) const {
    for (const auto& c : categories)
      if (c.code == code) return c.label;
    return {};
  }
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<FeatureSpec> features, std::string label_name,
                std::vector<std::string> text_columns = {},
                std::vector<std::string> dropped_columns = {})
      : features_(std::move(features)),
        label_name_(std::move(label_name)),
        text_columns_(std::move(text_columns)),
        dropped_columns_(std::move(dropped_columns)) {
    validate();
  }

  std::span<const FeatureSpec> features() const { return features_; }
  const FeatureSpec& feature(std::size_t j) const { return features_.at(j); }
  std::size_t size() const { return features_.size(); }
  const std::string& label_name() const { return label_name_; }
  const std::vector<std::string>& text_columns() const { return text_columns_; }
  const std::vector<std::string>& dropped_columns() const { return dropped_columns_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t j = 0; j < features_.size(); ++j)
      if (features_[j].name == name) return j;
    return std::nullopt;
  }

  std::size_t require_index(std::string_view name) const {
    if (auto j = index_of(name)) return *j;
    throw Error(ErrorCode::UnknownFeature, "no feature named '" + std::string(name) + "'");
  }

  json to_json() const {
    json feats = json::array();
    for (const auto& f : features_) {
      json jf{{"name", f.name},
              {"kind", f.is_categorical() ? "categorical" : "numeric"}};
      if (f.is_categorical()) {
        json cats = json::array();
        for (const auto& c : f.categories) cats.push_back({{"code", c.code}, {"label", c.label}});
        jf["categories"] = cats;
      } else if (f.range) {
        jf["range"] = {f.range->first, f.range->second};
      }
      feats.push_back(jf);
    }
    return json{{"format_version", kSchemaFormatVersion},
                {"features", feats},
                {"label_name", label_name_},
                {"text_columns", text_columns_},
                {"dropped_columns", dropped_columns_}};
  }

  static FeatureSchema from_json(const json& j) {
    try {
      const int version = j.at("format_version").get<int>();
      if (version != kSchemaFormatVersion)
        throw Error(ErrorCode::VersionMismatch,
                    "schema format_version " + std::to_string(version) +
                        ", expected " + std::to_string(kSchemaFormatVersion));
      std::vector<FeatureSpec> feats;
      for (const auto& jf : j.at("features")) {
        FeatureSpec f;
        f.name = jf.at("name").get<std::string>();
        const auto kind = jf.at("kind").get<std::string>();
        if (kind == "categorical") {
          f.kind = FeatureKind::Categorical;
          for (const auto& jc : jf.at("categories"))
            f.categories.push_back({jc.at("code").get<int>(), jc.value("label", std::string{})});
        } else if (kind == "numeric") {
          f.kind = FeatureKind::Numeric;
          if (jf.contains("range"))
            f.range = std::make_pair(jf["range"].at(0).get<double>(), jf["range"].at(1).get<double>());
        } else {
          throw Error(ErrorCode::Format, "feature '" + f.name + "' has unknown kind '" + kind + "'");
        }
        feats.push_back(std::move(f));
      }
      return FeatureSchema(std::move(feats), j.at("label_name").get<std::string>(),
                           j.value("text_columns", std::vector<std::string>{}),
                           j.value("dropped_columns", std::vector<std::string>{}));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Format, std::string("malformed schema: ") + e.what());
    }
  }

  static FeatureSchema load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open schema file " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Format, "schema " + path + ": " + e.what());
    }
    return from_json(j);
  }

  // FNV-1a over the canonical serialized form; identifies the feature
  // vocabulary a model was trained against.
  std::string fingerprint() const { return fnv1a_hex(to_json().dump()); }

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.to_json() == b.to_json();
  }

 private:
  void validate() const {
    std::set<std::string> names;
    for (const auto& f : features_) {
      if (!names.insert(f.name).second)
        throw Error(ErrorCode::InvalidArgument, "duplicate feature name '" + f.name + "'");
      if (f.is_categorical()) {
        std::set<int> codes;
        for (const auto& c : f.categories) {
          if (c.code < 0)
            throw Error(ErrorCode::InvalidArgument, "negative code in '" + f.name + "'");
          if (!codes.insert(c.code).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate code in '" + f.name + "'");
        }
        if (f.categories.empty())
          throw Error(ErrorCode::InvalidArgument, "categorical '" + f.name + "' declares no codes");
      } else if (f.range && f.range->first > f.range->second) {
        throw Error(ErrorCode::InvalidArgument, "range min > max for '" + f.name + "'");
      }
    }
    if (names.count(label_name_))
      throw Error(ErrorCode::InvalidArgument, "label '" + label_name_ + "' is also a feature");
  }

  std::vector<FeatureSpec> features_;
  std::string label_name_;
  std::vector<std::string> text_columns_;
  std::vector<std::string> dropped_columns_;
};

// n x k feature table (row-major, NaN = missing) with binary labels and
// optional free-text columns.
struct Dataset {
  FeatureSchema schema;
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::vector<std::string>> text;  // text[t][i]

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return schema.size(); }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
    return out;
  }

  Dataset select(std::span<const std::size_t> indices) const {
    Dataset out;
    out.schema = schema;
    out.values.reserve(indices.size() * cols());
    out.labels.reserve(indices.size());
    out.text.assign(text.size(), {});
    for (auto i : indices) {
      auto r = row(i);
      out.values.insert(out.values.end(), r.begin(), r.end());
      out.labels.push_back(labels[i]);
      for (std::size_t t = 0; t < text.size(); ++t) out.text[t].push_back(text[t][i]);
    }
    return out;
  }

  std::size_t count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    if (!(a.schema == b.schema) || a.labels != b.labels || a.text != b.text ||
        a.values.size() != b.values.size())
      return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const double x = a.values[i], y = b.values[i];
      if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
    }
    return true;
  }
};

// Parses RFC-4180 records: quoted fields, doubled quotes, embedded newlines,
// CRLF or LF terminators.
inline std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) in_quotes = true;
        else field.push_back(c);
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::Format, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline bool is_missing_cell(std::string_view s) { return s.empty() || s == "?"; }

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long> parse_integer(std::string_view s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc() && ptr == end) return v;
  // Accept integral reals such as "3.0".
  if (auto d = parse_double(s); d && std::floor(*d) == *d) return static_cast<long>(*d);
  return std::nullopt;
}

}  // namespace detail

struct CsvLoad {
  Dataset dataset;
  std::vector<std::string> ignored_columns;
};

inline CsvLoad parse_csv(std::istream& in, const FeatureSchema& schema) {
  auto records = parse_csv_records(in);
  if (records.empty()) throw Error(ErrorCode::Format, "missing header row");
  const auto& header = records.front();
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) position.emplace(detail::trim(header[c]), c);

  auto column_of = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end())
      throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in CSV header");
    return it->second;
  };

  const std::size_t k = schema.size();
  std::vector<std::size_t> feature_col(k);
  for (std::size_t j = 0; j < k; ++j) feature_col[j] = column_of(schema.feature(j).name);
  const std::size_t label_col = column_of(schema.label_name());
  std::vector<std::size_t> text_col;
  for (const auto& t : schema.text_columns()) text_col.push_back(column_of(t));

  CsvLoad out;
  std::set<std::string> known;
  for (const auto& f : schema.features()) known.insert(f.name);
  known.insert(schema.label_name());
  for (const auto& t : schema.text_columns()) known.insert(t);
  for (const auto& d : schema.dropped_columns()) known.insert(d);
  for (const auto& h : header)
    if (!known.count(detail::trim(h))) out.ignored_columns.push_back(detail::trim(h));

  Dataset& ds = out.dataset;
  ds.schema = schema;
  ds.text.assign(text_col.size(), {});
  const std::size_t n = records.size() - 1;
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "CSV has a header but no data rows");
  ds.values.reserve(n * k);
  ds.labels.reserve(n);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto cell = [&](std::size_t c) -> std::string {
      return c < rec.size() ? detail::trim(rec[c]) : std::string{};
    };
    auto fail = [&](const std::string& column, const std::string& what) {
      return Error(ErrorCode::TypeError,
                   "row " + std::to_string(r) + ", column '" + column + "': " + what);
    };
    for (std::size_t j = 0; j < k; ++j) {
      const auto& spec = schema.feature(j);
      const std::string s = cell(feature_col[j]);
      if (detail::is_missing_cell(s)) {
        ds.values.push_back(missing_value());
        continue;
      }
      if (spec.is_categorical()) {
        auto code = detail::parse_integer(s);
        if (!code) throw fail(spec.name, "'" + s + "' is not an integer code");
        if (!spec.has_code(static_cast<int>(*code)))
          throw fail(spec.name, "undeclared code " + s);
        ds.values.push_back(static_cast<double>(*code));
      } else {
        auto v = detail::parse_double(s);
        if (!v) throw fail(spec.name, "'" + s + "' is not a number");
        if (spec.range && (*v < spec.range->first || *v > spec.range->second))
          throw fail(spec.name, "value " + s + " outside declared range");
        ds.values.push_back(*v);
      }
    }
    const std::string label = cell(label_col);
    if (label == "0" || label == "1") ds.labels.push_back(label == "1" ? 1 : 0);
    else throw fail(schema.label_name(), "label '" + label + "' is not 0 or 1");
    for (std::size_t t = 0; t < text_col.size(); ++t) {
      std::string s = cell(text_col[t]);
      ds.text[t].push_back(s == "?" ? std::string{} : s);
    }
  }
  return out;
}

inline CsvLoad load_csv(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open CSV file " + path);
  return parse_csv(in, schema);
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
  if (is_missing(v)) return "?";
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline void write_csv(std::ostream& out, const Dataset& ds) {
  const auto& schema = ds.schema;
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  for (const auto& f : schema.features()) { sep(); out << detail::csv_escape(f.name); }
  for (const auto& t : schema.text_columns()) { sep(); out << detail::csv_escape(t); }
  sep();
  out << detail::csv_escape(schema.label_name()) << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    first = true;
    for (std::size_t j = 0; j < ds.cols(); ++j) { sep(); out << detail::format_number(ds.at(i, j)); }
    for (std::size_t t = 0; t < schema.text_columns().size(); ++t) {
      sep();
      out << detail::csv_escape(t < ds.text.size() ? ds.text[t][i] : std::string{});
    }
    sep();
    out << ds.labels[i] << '\n';
  }
}

struct ImputeResult {
  Dataset dataset;
  std::vector<std::size_t> imputed_counts;  // per feature
};

// Value that fills gaps in column j: the median of observed values for
// numeric features, the mode (smallest code on ties) for categorical ones.
inline double fill_value(const Dataset& ds, std::size_t j) {
  std::vector<double> observed;
  for (std::size_t i = 0; i < ds.rows(); ++i)
    if (const double v = ds.at(i, j); !is_missing(v)) observed.push_back(v);
  const auto& spec = ds.schema.feature(j);
  if (observed.empty())
    throw Error(ErrorCode::AllMissingColumn, "column '" + spec.name + "' has no observed values");
  if (spec.is_categorical()) {
    std::map<double, std::size_t> counts;
    for (double v : observed) ++counts[v];
    double fill = 0;
    std::size_t best = 0;
    for (const auto& [code, count] : counts)
      if (count > best) { best = count; fill = code; }
    return fill;
  }
  std::sort(observed.begin(), observed.end());
  const std::size_t m = observed.size();
  return m % 2 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
}

inline std::vector<double> fill_values(const Dataset& ds) {
  std::vector<double> out(ds.cols());
  for (std::size_t j = 0; j < ds.cols(); ++j) out[j] = fill_value(ds, j);
  return out;
}

inline ImputeResult impute(const Dataset& ds) {
  ImputeResult out{ds, std::vector<std::size_t>(ds.cols(), 0)};
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    std::vector<std::size_t> gaps;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (is_missing(ds.at(i, j))) gaps.push_back(i);
    if (gaps.empty()) continue;
    const double fill = fill_value(ds, j);
    for (auto i : gaps) out.dataset.at(i, j) = fill;
    out.imputed_counts[j] = gaps.size();
  }
  return out;
}

// Dense real matrix handed to learners, with the labels it was built from.
struct EncodedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> column_names;
  std::vector<std::size_t> source_feature;  // encoded column -> schema index

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

inline void require_complete(const Dataset& ds) {
  for (double v : ds.values)
    if (is_missing(v))
      throw Error(ErrorCode::InvalidArgument, "dataset has missing cells; impute first");
}

// Trees consume integer codes and numerics as-is, in schema order.
inline EncodedMatrix encode_for_trees(const Dataset& ds) {
  require_complete(ds);
  EncodedMatrix m;
  m.rows = ds.rows();
  m.cols = ds.cols();
  m.values = ds.values;
  m.labels = ds.labels;
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    m.column_names.push_back(ds.schema.feature(j).name);
    m.source_feature.push_back(j);
  }
  return m;
}

inline Dataset decode_from_trees(const EncodedMatrix& m, const FeatureSchema& schema) {
  if (m.cols != schema.size())
    throw Error(ErrorCode::SchemaMismatch, "encoded width does not match schema");
  Dataset ds;
  ds.schema = schema;
  ds.values = m.values;
  ds.labels = m.labels;
  ds.text.assign(schema.text_columns().size(), std::vector<std::string>(m.rows));
  return ds;
}

// Column layout and training statistics for the linear representation:
// standardized numerics, 0/1 binaries, one indicator per declared code for
// wider categoricals.
class LinearEncoder {
 public:
  struct Column {
    std::size_t feature = 0;
    enum class Kind { Standardized, Indicator } kind = Kind::Standardized;
    double center = 0;  // standardized: mean
    double scale = 1;   // standardized: population std (1 when constant)
    int code = 0;       // indicator: hot when value == code
    std::string name;
  };

  LinearEncoder() = default;

  static LinearEncoder fit(const Dataset& ds, std::vector<std::string>* warnings = nullptr) {
    require_complete(ds);
    LinearEncoder enc;
    enc.width_ = ds.cols();
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      const auto& spec = ds.schema.feature(j);
      if (spec.is_categorical()) {
        const auto codes = spec.codes();
        if (codes.size() <= 2) {
          Column c;
          c.feature = j;
          c.kind = Column::Kind::Indicator;
          c.code = codes.back();
          c.name = spec.name;
          enc.columns_.push_back(c);
        } else {
          for (int code : codes) {
            Column c;
            c.feature = j;
            c.kind = Column::Kind::Indicator;
            c.code = code;
            c.name = spec.name + "=" + std::to_string(code);
            enc.columns_.push_back(c);
          }
        }
      } else {
        double mean = 0;
        for (std::size_t i = 0; i < ds.rows(); ++i) mean += ds.at(i, j);
        mean /= static_cast<double>(std::max<std::size_t>(1, ds.rows()));
        double var = 0;
        for (std::size_t i = 0; i < ds.rows(); ++i) var += (ds.at(i, j) - mean) * (ds.at(i, j) - mean);
        var /= static_cast<double>(std::max<std::size_t>(1, ds.rows()));
        Column c;
        c.feature = j;
        c.center = mean;
        c.scale = std::sqrt(var);
        c.name = spec.name;
        if (!(c.scale > 0)) {
          c.scale = 1;
          if (warnings)
            warnings->push_back("ZeroVariance: '" + spec.name + "' is constant; centered only");
        }
        enc.columns_.push_back(c);
      }
    }
    return enc;
  }

  std::size_t input_width() const { return width_; }
  std::size_t width() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  void transform(std::span<const double> row, std::span<double> out) const {
    if (row.size() != width_)
      throw Error(ErrorCode::SchemaMismatch, "row has " + std::to_string(row.size()) +
                                                 " values, encoder expects " + std::to_string(width_));
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const auto& col = columns_[c];
      const double v = row[col.feature];
      out[c] = col.kind == Column::Kind::Indicator ? (v == col.code ? 1.0 : 0.0)
                                                   : (v - col.center) / col.scale;
    }
  }

  std::vector<double> transform(std::span<const double> row) const {
    std::vector<double> out(width());
    transform(row, out);
    return out;
  }

  EncodedMatrix transform(const Dataset& ds) const {
    require_complete(ds);
    EncodedMatrix m;
    m.rows = ds.rows();
    m.cols = width();
    m.values.resize(m.rows * m.cols);
    m.labels = ds.labels;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      transform(ds.row(i), std::span<double>(m.values.data() + i * m.cols, m.cols));
    for (const auto& c : columns_) {
      m.column_names.push_back(c.name);
      m.source_feature.push_back(c.feature);
    }
    return m;
  }

  json to_json() const {
    json cols = json::array();
    for (const auto& c : columns_) {
      cols.push_back({{"feature", c.feature},
                      {"kind", c.kind == Column::Kind::Indicator ? "indicator" : "standardized"},
                      {"center", c.center},
                      {"scale", c.scale},
                      {"code", c.code},
                      {"name", c.name}});
    }
    return json{{"input_width", width_}, {"columns", cols}};
  }

  static LinearEncoder from_json(const json& j) {
    LinearEncoder enc;
    enc.width_ = j.at("input_width").get<std::size_t>();
    for (const auto& jc : j.at("columns")) {
      Column c;
      c.feature = jc.at("feature").get<std::size_t>();
      c.kind = jc.at("kind").get<std::string>() == "indicator" ? Column::Kind::Indicator
                                                               : Column::Kind::Standardized;
      c.center = jc.at("center").get<double>();
      c.scale = jc.at("scale").get<double>();
      c.code = jc.at("code").get<int>();
      c.name = jc.at("name").get<std::string>();
      enc.columns_.push_back(c);
    }
    return enc;
  }

 private:
  std::size_t width_ = 0;
  std::vector<Column> columns_;
};

struct LinearEncoding {
  EncodedMatrix matrix;
  LinearEncoder encoder;
  std::vector<std::string> warnings;
};

inline LinearEncoding encode_for_linear(const Dataset& ds) {
  LinearEncoding out;
  out.encoder = LinearEncoder::fit(ds, &out.warnings);
  out.matrix = out.encoder.transform(ds);
  return out;
}

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double test_fraction = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Per class, shuffles that class's row indices with a seeded stream and sends
// round(count * fraction) of them to the test part. Both parts keep the input
// row order.
inline SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1))
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  SplitPair out;
  out.seed = seed;
  out.test_fraction = test_fraction;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (ds.labels[i] == cls) members.push_back(i);
    const auto test_count = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * test_fraction));
    if (members.empty() || test_count == 0 || test_count == members.size())
      throw Error(ErrorCode::DegenerateSplit,
                  "class " + std::to_string(cls) + " with " + std::to_string(members.size()) +
                      " rows cannot be split at fraction " + std::to_string(test_fraction));
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(cls)}));
    rng.shuffle(std::span<std::size_t>(members));
    out.test_indices.insert(out.test_indices.end(), members.begin(), members.begin() + test_count);
    out.train_indices.insert(out.train_indices.end(), members.begin() + test_count, members.end());
  }
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.train = ds.select(out.train_indices);
  out.test = ds.select(out.test_indices);
  return out;
}

}  // namespace riskforge
