#pragma once

// Batch commands behind the riskforge executable. Each command reads its
// inputs, writes its documents under out_dir and returns a RunManifest that
// lists every output with its fingerprint. Outputs depend only on inputs
// and flags; wall-clock time appears in the manifest alone.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "riskforge/benchmark.hpp"
#include "riskforge/explain.hpp"
#include "riskforge/stats.hpp"
#include "riskforge/synth.hpp"

#ifndef RISKFORGE_VERSION
#define RISKFORGE_VERSION "0.1.0"
#endif

namespace riskforge {

namespace fs = std::filesystem;

struct FileRecord {
  std::string path;
  std::string fingerprint;
};

struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::string version = RISKFORGE_VERSION;
  std::string started_at;
  std::string finished_at;
};

inline json to_json(const RunManifest& m) {
  auto files = [](const std::vector<FileRecord>& v) {
    json out = json::array();
    for (const auto& f : v) out.push_back({{"path", f.path}, {"fingerprint", f.fingerprint}});
    return out;
  };
  return json{{"format_version", kReportFormatVersion},
              {"kind", "run_manifest"},
              {"command", m.command},
              {"config", m.config},
              {"seeds", m.seeds},
              {"inputs", files(m.inputs)},
              {"outputs", files(m.outputs)},
              {"version", m.version},
              {"started_at", m.started_at},
              {"finished_at", m.finished_at}};
}

struct CommonOptions {
  std::string schema_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "report";  // report: JSON documents; table: plus text renderings
};

namespace detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Run {
 public:
  Run(std::string command, const CommonOptions& common) : common_(common) {
    if (common.format != "report" && common.format != "table")
      throw Error(ErrorCode::InvalidArgument, "--format must be 'report' or 'table'");
    manifest_.command = std::move(command);
    manifest_.started_at = utc_now();
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + common.out_dir + ": " + ec.message());
  }

  RunManifest& manifest() { return manifest_; }
  bool tables() const { return common_.format == "table"; }

  void input(const std::string& path) { manifest_.inputs.push_back({path, fnv1a_hex(read_file(path))}); }

  FeatureSchema schema() {
    if (common_.schema_path.empty()) throw Error(ErrorCode::MissingInput, "--schema is required");
    input(common_.schema_path);
    return FeatureSchema::load(common_.schema_path);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = (fs::path(common_.out_dir) / name).string();
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw Error(ErrorCode::Io, "cannot write " + path);
    manifest_.outputs.push_back({path, fnv1a_hex(content)});
  }

  void write(const std::string& name, const json& doc) { write(name, doc.dump(1) + "\n"); }

  RunManifest finish() {
    manifest_.finished_at = utc_now();
    const auto path = (fs::path(common_.out_dir) / (manifest_.command + "_manifest.json")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << to_json(manifest_).dump(1) << '\n')) throw Error(ErrorCode::Io, "cannot write " + path);
    return manifest_;
  }

 private:
  CommonOptions common_;
  RunManifest manifest_;
};

inline Dataset load_complete(Run& run, const std::string& csv, const FeatureSchema& schema,
                             json* notes = nullptr) {
  if (csv.empty()) throw Error(ErrorCode::MissingInput, "--data is required");
  run.input(csv);
  auto loaded = load_csv(csv, schema);
  auto imputed = impute(loaded.dataset);
  if (notes) {
    json counts = json::object();
    for (std::size_t j = 0; j < schema.size(); ++j)
      if (imputed.imputed_counts[j]) counts[schema.feature(j).name] = imputed.imputed_counts[j];
    (*notes)["imputed_cells"] = counts;
    (*notes)["ignored_columns"] = loaded.ignored_columns;
  }
  return std::move(imputed.dataset);
}

inline std::string file_slug(std::string_view name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
  return out;
}

}  // namespace detail

struct InspectOptions {
  std::string data;
  std::string stopwords_path;  // empty: built-in list
  std::size_t top_terms = 20;
};

// Moments, per-category label counts, term frequencies of each text column
// and the Spearman matrix (label included).
inline RunManifest cmd_inspect(const CommonOptions& common, const InspectOptions& opt) {
  detail::Run run("inspect", common);
  const auto schema = run.schema();
  json notes;
  const auto ds = detail::load_complete(run, opt.data, schema, &notes);
  auto stop = default_stop_words();
  if (!opt.stopwords_path.empty()) {
    run.input(opt.stopwords_path);
    stop = load_stop_words(opt.stopwords_path);
  }
  run.manifest().config = {{"data", opt.data}, {"top_terms", opt.top_terms}, {"stopwords", opt.stopwords_path},
                           {"rows", ds.rows()}};
  run.manifest().config.update(notes);

  const auto moments = class_conditional_moments(ds);
  run.write("moments.json", to_json(moments));
  json groups = json::array();
  for (const auto& f : schema.features())
    if (f.is_categorical()) groups.push_back(to_json(group_label_counts(ds, f.name)));
  run.write("group_counts.json", json{{"format_version", kReportFormatVersion}, {"kind", "group_counts_set"},
                                      {"features", groups}});
  json terms = json::array();
  for (const auto& col : schema.text_columns()) {
    auto t = to_json(term_frequencies(ds, col, opt.top_terms, stop));
    t["column"] = col;
    terms.push_back(t);
  }
  run.write("term_frequencies.json", json{{"format_version", kReportFormatVersion},
                                          {"kind", "term_frequencies_set"}, {"columns", terms}});
  const auto corr = spearman_matrix(ds, true);
  run.write("spearman.json", to_json(corr));

  if (run.tables()) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-34s %18s %18s\n", "Feature", "Suicide (mean,std)", "Not (mean,std)");
    os << line;
    for (const auto& m : moments.features) {
      std::snprintf(line, sizeof line, "%-34s   (%6.2f,%6.2f)    (%6.2f,%6.2f)\n", m.feature.c_str(), m.mean[1],
                    m.std[1], m.mean[0], m.std[0]);
      os << line;
    }
    run.write("moments.txt", os.str());
  }
  return run.finish();
}

struct AugmentOptions {
  std::string data;
  std::size_t n = 50000;
  double class_ratio = -1;  // < 0: the fitted class prior
};

// Fits the class-conditional synthesizer on the (imputed) input and draws n
// rows with --seed; writes the synthetic CSV, the fitted synthesizer and the
// fidelity report against the input.
inline RunManifest cmd_augment(const CommonOptions& common, const AugmentOptions& opt) {
  detail::Run run("augment", common);
  const auto schema = run.schema();
  json notes;
  const auto ds = detail::load_complete(run, opt.data, schema, &notes);
  run.manifest().seeds = {common.seed};
  run.manifest().config = {{"data", opt.data}, {"n", opt.n}, {"class_ratio", opt.class_ratio}};
  run.manifest().config.update(notes);
  const auto synth = fit_synthesizer(ds, common.seed);
  const auto out = generate(synth, opt.n, common.seed, opt.class_ratio);
  std::ostringstream csv;
  write_csv(csv, out);
  run.write("synthetic.csv", csv.str());
  run.write("synthesizer.json", synth.to_json());
  const auto fidelity = fidelity_report(ds, out);
  run.write("fidelity.json", to_json(fidelity));
  if (run.tables()) {
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "%-34s %5s %17s %17s %8s\n", "Feature", "Class", "Original", "Synthetic",
                  "|dMean|");
    os << line;
    for (const auto& e : fidelity.entries) {
      std::snprintf(line, sizeof line, "%-34s %5d  (%6.2f,%6.2f)  (%6.2f,%6.2f) %8.4f\n", e.feature.c_str(),
                    e.label, e.original_mean, e.original_std, e.synthetic_mean, e.synthetic_std, e.mean_delta);
      os << line;
    }
    run.write("fidelity.txt", os.str());
  }
  return run.finish();
}

struct BenchmarkOptions {
  std::string data;
  std::size_t augment_n = 0;  // > 0: augment to this many rows (seeded by --seed) first
  std::vector<Family> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<double> fractions{0.2, 0.3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t background_size = 128;
  bool save_artifacts = true;
  TrainConfig train;
};

// The repeated split/train/evaluate grid. One artifact per family is also
// trained on the training part of the first (fraction, seed) cell, carrying
// that split's imputation defaults and a background sample for serving.
inline RunManifest cmd_benchmark(const CommonOptions& common, const BenchmarkOptions& opt,
                                 BenchmarkReport* report_out = nullptr) {
  detail::Run run("benchmark", common);
  const auto schema = run.schema();
  json notes;
  auto ds = detail::load_complete(run, opt.data, schema, &notes);
  if (opt.augment_n > 0) ds = generate(fit_synthesizer(ds, common.seed), opt.augment_n, common.seed);
  json families = json::array();
  for (auto f : opt.families) families.push_back(family_id(f));
  run.manifest().seeds = opt.seeds;
  run.manifest().config = {{"data", opt.data},         {"augment_n", opt.augment_n},
                           {"augment_seed", common.seed}, {"families", families},
                           {"fractions", opt.fractions}, {"train", opt.train},
                           {"background_size", opt.background_size}};
  run.manifest().config.update(notes);

  const auto report = repeated_evaluation(opt.families, ds, opt.fractions, opt.seeds, opt.train);
  const auto iterations = opt.train.perceptron.iterations;
  run.write("benchmark_report.json", to_json(report, iterations));
  const auto table = format_table(report, iterations);
  run.write("benchmark_table.txt", table);
  if (run.tables()) std::cout << table;

  if (opt.save_artifacts) {
    const auto split = stratified_split(ds, opt.fractions.front(), opt.seeds.front());
    const auto fills = fill_values(split.train);
    const auto bg = make_background(split.train, opt.background_size, opt.seeds.front());
    for (auto f : opt.families) {
      TrainConfig cfg = opt.train;
      cfg.seed = opt.seeds.front();
      auto model = train_family(f, split.train, cfg);
      auto metrics = to_json(evaluate_model(model, split.test));
      metrics["fraction"] = opt.fractions.front();
      metrics["seed"] = opt.seeds.front();
      auto artifact = make_artifact(std::move(model), schema, cfg, metrics);
      artifact.fill_values = fills;
      artifact.background = bg.values;
      run.write("models/" + family_id(f) + ".json", artifact_to_json(artifact));
    }
  }
  if (report_out) *report_out = report;
  return run.finish();
}

enum class ExplainMode { Single, Global, Dependence, Beeswarm };

inline ExplainMode explain_mode_from_string(const std::string& s) {
  if (s == "single") return ExplainMode::Single;
  if (s == "global") return ExplainMode::Global;
  if (s == "dependence") return ExplainMode::Dependence;
  if (s == "beeswarm") return ExplainMode::Beeswarm;
  throw Error(ErrorCode::InvalidArgument, "unknown explain mode '" + s + "'");
}

struct ExplainOptions {
  std::string artifact;
  std::string data;
  ExplainMode mode = ExplainMode::Single;
  std::string feature;          // dependence mode
  std::size_t row = 0;          // single mode
  std::size_t max_rows = 1000;  // other modes; 0 = every row
  std::size_t background_size = 128;  // 0 = every data row
  bool full_background = false;
};

// Background: the artifact's stored sample when present (subsampled to
// background_size), otherwise rows of --data; --full-background uses every
// data row.
inline RunManifest cmd_explain(const CommonOptions& common, const ExplainOptions& opt) {
  detail::Run run("explain", common);
  std::optional<FeatureSchema> expected;
  if (!common.schema_path.empty()) expected = run.schema();
  if (opt.artifact.empty()) throw Error(ErrorCode::MissingInput, "--artifact is required");
  run.input(opt.artifact);
  const auto artifact = load_artifact(opt.artifact, expected ? &*expected : nullptr);
  const auto& schema = artifact.schema;
  const auto ds = detail::load_complete(run, opt.data, schema);

  BackgroundSet bg;
  if (!opt.full_background && !artifact.background.empty()) {
    Dataset refs;
    refs.schema = schema;
    refs.values = artifact.background;
    refs.labels.assign(refs.values.size() / schema.size(), 0);
    bg = make_background(refs, opt.background_size, common.seed, "artifact background");
  } else {
    bg = make_background(ds, opt.full_background ? 0 : opt.background_size, common.seed, "data rows");
  }
  run.manifest().seeds = {common.seed};
  run.manifest().config = {{"artifact", opt.artifact}, {"data", opt.data},
                           {"background", bg.provenance()}, {"max_rows", opt.max_rows}};

  auto subset = [&] { return ds.select(sample_indices(ds.rows(), opt.max_rows, common.seed)); };
  switch (opt.mode) {
    case ExplainMode::Single: {
      if (opt.row >= ds.rows())
        throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(opt.row) + " out of range (" +
                                                    std::to_string(ds.rows()) + " rows)");
      run.manifest().config["mode"] = "single";
      run.manifest().config["row"] = opt.row;
      const auto e = explain(artifact.model, ds.row(opt.row), bg);
      auto doc = to_json(e, schema);
      doc["row"] = opt.row;
      doc["score"] = predict_score(artifact.model, ds.row(opt.row));
      doc["background"] = bg.provenance();
      run.write("explanation_row" + std::to_string(opt.row) + ".json", doc);
      if (run.tables()) {
        std::ostringstream os;
        char line[160];
        std::snprintf(line, sizeof line, "%-10s %-34s %13s %10s\n", "Feature ID", "Feature", "Feature Value",
                      "SHAP");
        os << line;
        for (std::size_t j = 0; j < e.phi.size(); ++j) {
          std::snprintf(line, sizeof line, "%-10zu %-34s %13s %10.4f\n", j, schema.feature(j).name.c_str(),
                        detail::format_number(e.feature_values[j]).c_str(), e.phi[j]);
          os << line;
        }
        run.write("explanation_row" + std::to_string(opt.row) + ".txt", os.str());
      }
      break;
    }
    case ExplainMode::Global: {
      run.manifest().config["mode"] = "global";
      const auto rows = subset();
      const auto explanations = explain_rows(artifact.model, rows, bg);
      auto doc = to_json(global_mean_abs_shap(explanations, schema));
      doc["rows_explained"] = rows.rows();
      doc["background"] = bg.provenance();
      run.write("global_importance.json", doc);
      if (is_tree_family(artifact.model)) run.write("gain_importance.json", to_json(gain_importance(artifact.model, schema)));
      break;
    }
    case ExplainMode::Dependence: {
      if (opt.feature.empty()) throw Error(ErrorCode::InvalidArgument, "dependence mode needs --feature");
      run.manifest().config["mode"] = "dependence";
      run.manifest().config["feature"] = opt.feature;
      const auto rows = subset();
      auto doc = to_json(dependence_values(artifact.model, rows, bg, opt.feature));
      doc["background"] = bg.provenance();
      run.write("dependence_" + detail::file_slug(opt.feature) + ".json", doc);
      break;
    }
    case ExplainMode::Beeswarm: {
      run.manifest().config["mode"] = "beeswarm";
      const auto rows = subset();
      auto doc = to_json(beeswarm_export(artifact.model, rows, bg), schema);
      doc["background"] = bg.provenance();
      run.write("beeswarm.json", doc);
      break;
    }
  }
  return run.finish();
}

}  // namespace riskforge
