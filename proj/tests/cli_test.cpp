#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "riskforge/error.hpp"
#include "riskforge/explain.hpp"
#include "test_support.hpp"

using namespace rftest;

namespace {

const std::string kSchema = source_path("data/cohort/schema.json");
const std::string kData = source_path("data/cohort/cohort.csv");

// Runs the CLI with stdout and stderr captured to <dir>/log.txt; returns the exit status.
int run(const std::string& dir, const std::string& args) {
  const std::string cmd =
      std::string(RISKFORGE_CLI_PATH) + " " + args + " > " + dir + "/log.txt 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in) << path;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string common(const std::string& out, const std::string& extra = "") {
  return "--schema " + kSchema + " --out-dir " + out + " --seed 3 " + extra + " ";
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// One shared benchmark run for the explain tests.
const std::string& benchmark_dir() {
  static const std::string dir = [] {
    auto d = temp_dir("cli_bench");
    EXPECT_EQ(run(d, common(d) + "benchmark --data " + kData + " --fractions 0.2 --seeds 1 --trees 10 --rounds 20"), 0)
        << slurp(d + "/log.txt");
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, UsageAndErrorExitCodes) {
  const auto d = temp_dir("cli_usage");
  EXPECT_EQ(run(d, ""), 2);
  EXPECT_EQ(run(d, "frobnicate"), 2);
  EXPECT_EQ(run(d, "--version"), 0);
  EXPECT_NE(slurp(d + "/log.txt").find("0.1.0"), std::string::npos);
  EXPECT_EQ(run(d, "--out-dir " + d + " inspect --data " + kData), exit_code(ErrorCode::MissingInput));
  EXPECT_NE(slurp(d + "/log.txt").find("--schema"), std::string::npos);
  EXPECT_EQ(run(d, common(d) + "inspect --data " + d + "/absent.csv"), exit_code(ErrorCode::MissingInput));
  EXPECT_EQ(run(d, common(d, "--format pdf") + "inspect --data " + kData), 2);
  EXPECT_EQ(run(d, common(d) + "benchmark --data " + kData + " --families knn"), exit_code(ErrorCode::InvalidArgument));
}

TEST(Cli, InspectWritesReportsAndManifest) {
  const auto d = temp_dir("cli_inspect");
  ASSERT_EQ(run(d, common(d, "--format table") + "inspect --data " + kData), 0) << slurp(d + "/log.txt");
  for (const char* f : {"moments.json", "group_counts.json", "term_frequencies.json", "spearman.json", "moments.txt"})
    EXPECT_TRUE(std::filesystem::exists(d + "/" + f)) << f;
  const auto manifest = json::parse(slurp(d + "/inspect_manifest.json"));
  EXPECT_EQ(manifest["command"], "inspect");
  EXPECT_EQ(manifest["outputs"].size(), 5u);
  EXPECT_EQ(manifest["inputs"].size(), 2u);
  const auto spearman = json::parse(slurp(d + "/spearman.json"));
  EXPECT_FALSE(spearman.empty());
}

TEST(Cli, AugmentIsByteIdenticalAcrossRuns) {
  const auto a = temp_dir("cli_aug_a");
  const auto b = temp_dir("cli_aug_b");
  const std::string args = "augment --data " + kData + " -n 3000";
  ASSERT_EQ(run(a, common(a) + args), 0) << slurp(a + "/log.txt");
  ASSERT_EQ(run(b, common(b) + args), 0);
  for (const char* f : {"synthetic.csv", "synthesizer.json", "fidelity.json"})
    EXPECT_EQ(slurp(a + "/" + f), slurp(b + "/" + f)) << f;
  EXPECT_EQ(lines(slurp(a + "/synthetic.csv")), 3001u);
  const auto c = temp_dir("cli_aug_c");
  ASSERT_EQ(run(c, "--schema " + kSchema + " --out-dir " + c + " --seed 4 " + args), 0);
  EXPECT_NE(slurp(a + "/synthetic.csv"), slurp(c + "/synthetic.csv"));
}

TEST(Cli, BenchmarkTableAndDeterminism) {
  const auto& a = benchmark_dir();
  const auto b = temp_dir("cli_bench_b");
  ASSERT_EQ(run(b, common(b) + "benchmark --data " + kData + " --fractions 0.2 --seeds 1 --trees 10 --rounds 20"), 0);
  EXPECT_EQ(slurp(a + "/benchmark_report.json"), slurp(b + "/benchmark_report.json"));
  EXPECT_EQ(slurp(a + "/models/gbt.json"), slurp(b + "/models/gbt.json"));
  const auto table = slurp(a + "/benchmark_table.txt");
  EXPECT_EQ(lines(table), 8u);
  for (const char* row : {"SVM", "LR", "DT", "RF", "Linear SVC", "Perceptron (iter=10)", "GBT"})
    EXPECT_NE(table.find(row), std::string::npos) << row;

  const auto single = temp_dir("cli_bench_dt");
  ASSERT_EQ(run(single, common(single, "--format table") + "benchmark --data " + kData +
                            " --families dt --fractions 0.2 --seeds 1 --no-artifacts"),
            0);
  EXPECT_EQ(lines(slurp(single + "/benchmark_table.txt")), 2u);
  EXPECT_FALSE(std::filesystem::exists(single + "/models"));
  EXPECT_NE(slurp(single + "/log.txt").find("DT"), std::string::npos);
}

TEST(Cli, ExplainSingleRowTable) {
  const auto& bench = benchmark_dir();
  const auto d = temp_dir("cli_explain_single");
  ASSERT_EQ(run(d, common(d, "--format table") + "explain --artifact " + bench + "/models/gbt.json --data " + kData +
                       " --mode single --row 4"),
            0)
      << slurp(d + "/log.txt");
  const auto txt = slurp(d + "/explanation_row4.txt");
  EXPECT_EQ(txt.rfind("Feature ID", 0), 0u);
  for (const char* col : {"Feature", "Feature Value", "SHAP"}) EXPECT_NE(txt.find(col), std::string::npos);
  EXPECT_GE(lines(txt), 20u);
  const auto e = explanation_from_json(json::parse(slurp(d + "/explanation_row4.json")));
  ASSERT_EQ(e.phi.size(), 19u);
  EXPECT_NEAR(e.additivity_gap(), 0, 1e-9);
  EXPECT_EQ(e.scale, OutputScale::Margin);
  EXPECT_EQ(run(d, common(d) + "explain --artifact " + bench + "/models/gbt.json --data " + kData +
                       " --mode single --row 5000"),
            exit_code(ErrorCode::InvalidArgument));
}

TEST(Cli, ExplainGlobalAndDependence) {
  const auto& bench = benchmark_dir();
  const auto d = temp_dir("cli_explain_global");
  const std::string base = common(d) + "explain --artifact " + bench + "/models/gbt.json --data " + kData;
  ASSERT_EQ(run(d, base + " --mode global --max-rows 200"), 0) << slurp(d + "/log.txt");
  const auto global = json::parse(slurp(d + "/global_importance.json"));
  EXPECT_EQ(global["method"], "mean_abs_shap");
  EXPECT_EQ(global["features"].size(), 19u);
  EXPECT_EQ(json::parse(slurp(d + "/gain_importance.json"))["method"], "gain");

  ASSERT_EQ(run(d, base + " --mode dependence --feature \"Education level\" --max-rows 200"), 0)
      << slurp(d + "/log.txt");
  std::string dep_file;
  for (const auto& entry : std::filesystem::directory_iterator(d))
    if (entry.path().filename().string().rfind("dependence_", 0) == 0) dep_file = entry.path().string();
  ASSERT_FALSE(dep_file.empty());
  const auto dep = json::parse(slurp(dep_file));
  EXPECT_EQ(dep["feature"], "Education level");
  EXPECT_EQ(dep["points"].size(), 200u);
  EXPECT_GE(dep["summary"].size(), 2u);
  EXPECT_EQ(run(d, base + " --mode dependence --feature Nope"), exit_code(ErrorCode::UnknownFeature));

  ASSERT_EQ(run(d, base + " --mode beeswarm --max-rows 50"), 0);
  EXPECT_EQ(json::parse(slurp(d + "/beeswarm.json"))["records"].size(), 50u * 19u);
}

TEST(Cli, ExplainRejectsForeignSchema) {
  const auto& bench = benchmark_dir();
  const auto d = temp_dir("cli_explain_schema");
  std::ofstream(d + "/schema.json") << FeatureSchema({numeric("x")}, "Suicide").to_json().dump();
  EXPECT_EQ(run(d, "--schema " + d + "/schema.json --out-dir " + d + " explain --artifact " + bench +
                       "/models/dt.json --data " + kData),
            exit_code(ErrorCode::FingerprintMismatch));
}
