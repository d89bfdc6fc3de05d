// riskforge command-line entry point: inspect, augment, benchmark, explain, serve.

#include <csignal>
#include <iostream>

#include "CLI11.hpp"

#include "riskforge/pipeline.hpp"
#include "riskforge/service.hpp"

namespace {

using namespace riskforge;

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

std::vector<Family> parse_families(const std::vector<std::string>& ids) {
  std::vector<Family> out;
  for (const auto& id : ids) {
    if (id == "all") return {std::begin(kAllFamilies), std::end(kAllFamilies)};
    out.push_back(family_from_id(id));
  }
  return out;
}

void print_outputs(const RunManifest& m) {
  for (const auto& f : m.outputs) std::cerr << "wrote " << f.path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskforge: explainable suicide-risk prediction toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RISKFORGE_VERSION);

  CommonOptions common;
  app.add_option("--schema", common.schema_path, "Feature schema (JSON)");
  app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "Directory for output documents")->capture_default_str();
  app.add_option("--format", common.format, "report (JSON) or table (JSON plus text tables)")
      ->check(CLI::IsMember({"report", "table"}))
      ->capture_default_str();

  InspectOptions inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Descriptive statistics of a cohort CSV");
  inspect_cmd->add_option("--data", inspect.data, "Cohort CSV")->required();
  inspect_cmd->add_option("--stopwords", inspect.stopwords_path, "Stop-word list, one word per line");
  inspect_cmd->add_option("--top-terms", inspect.top_terms, "Terms kept per text column (0 = all)")
      ->capture_default_str();

  AugmentOptions augment;
  auto* augment_cmd = app.add_subcommand("augment", "Generate a synthetic cohort and its fidelity report");
  augment_cmd->add_option("--data", augment.data, "Cohort CSV")->required();
  augment_cmd->add_option("-n,--rows", augment.n, "Synthetic rows")->capture_default_str();
  augment_cmd->add_option("--class-ratio", augment.class_ratio, "Positive fraction (default: fitted prior)");

  BenchmarkOptions bench;
  std::vector<std::string> family_ids{"all"};
  auto* bench_cmd = app.add_subcommand("benchmark", "Repeated split/train/evaluate over model families");
  bench_cmd->add_option("--data", bench.data, "Cohort or synthetic CSV")->required();
  bench_cmd->add_option("--augment", bench.augment_n, "Augment to this many rows before benchmarking (0 = off)")
      ->capture_default_str();
  bench_cmd->add_option("--families", family_ids, "dt rf gbt lr perceptron svm, or all")->delimiter(',');
  bench_cmd->add_option("--fractions", bench.fractions, "Test fractions")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--seeds", bench.seeds, "Split/training seeds")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--background-size", bench.background_size, "Background rows stored in artifacts")
      ->capture_default_str();
  bench_cmd->add_option("--perceptron-iterations", bench.train.perceptron.iterations)->capture_default_str();
  bench_cmd->add_option("--trees", bench.train.forest.n_trees, "Random forest size")->capture_default_str();
  bench_cmd->add_option("--rounds", bench.train.boost.rounds, "Boosting rounds")->capture_default_str();
  bench_cmd->add_flag("!--no-artifacts", bench.save_artifacts, "Skip saving per-family model artifacts");

  ExplainOptions expl;
  std::string mode = "single";
  auto* explain_cmd = app.add_subcommand("explain", "Shapley explanations from a saved model artifact");
  explain_cmd->add_option("--artifact", expl.artifact, "Model artifact (JSON)")->required();
  explain_cmd->add_option("--data", expl.data, "Rows to explain (CSV)")->required();
  explain_cmd->add_option("--mode", mode, "single, global, dependence or beeswarm")
      ->check(CLI::IsMember({"single", "global", "dependence", "beeswarm"}))
      ->capture_default_str();
  explain_cmd->add_option("--feature", expl.feature, "Feature for dependence mode");
  explain_cmd->add_option("--row", expl.row, "Row index for single mode")->capture_default_str();
  explain_cmd->add_option("--max-rows", expl.max_rows, "Rows explained in batch modes (0 = all)")
      ->capture_default_str();
  explain_cmd->add_option("--background-size", expl.background_size)->capture_default_str();
  explain_cmd->add_flag("--full-background", expl.full_background, "Use every data row as background");

  std::string serve_artifact, host = "127.0.0.1";
  int port = 8080;
  ServiceOptions serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP scoring and explanation service");
  serve_cmd->add_option("--artifact", serve_artifact, "Model artifact (JSON)")->required();
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--background-size", serve_opts.background_size)->capture_default_str();
  serve_cmd->add_option("--threshold", serve_opts.threshold)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*inspect_cmd) print_outputs(cmd_inspect(common, inspect));
    else if (*augment_cmd) print_outputs(cmd_augment(common, augment));
    else if (*bench_cmd) {
      bench.families = parse_families(family_ids);
      print_outputs(cmd_benchmark(common, bench));
    } else if (*explain_cmd) {
      expl.mode = explain_mode_from_string(mode);
      print_outputs(cmd_explain(common, expl));
    } else if (*serve_cmd) {
      std::optional<FeatureSchema> expected;
      if (!common.schema_path.empty()) expected = FeatureSchema::load(common.schema_path);
      serve_opts.seed = common.seed;
      const RiskService service(load_artifact(serve_artifact, expected ? &*expected : nullptr), serve_opts);
      auto server = make_http_server(service);
      g_server = server.get();
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      std::cerr << "serving " << family_id(service.artifact().family()) << " model on " << host << ':' << port
                << '\n';
      if (!server->listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const Error& e) {
    std::cerr << "riskforge: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "riskforge: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
