#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gen.hpp"
#include "qforest/error.hpp"
#include "qforest/runner.hpp"

namespace {

using namespace qforest;
using namespace qforest::runner;

const std::filesystem::path kDataDir = QFOREST_TEST_DATA_DIR;

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.dataset = "statlog";
  c.data_path = kDataDir / "heart.dat";
  c.qubits = {2, 3};
  c.layers = {1, 2};
  c.runs = 2;
  c.seed = 5;
  c.train.epochs = 2;
  return c;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qforest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

TEST(Stats, SummarizeSample) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_EQ(s.count, 4U);
  EXPECT_EQ(summarize({0.7}).stddev, 0.0);
}

TEST(StatsProperty, MeanWithinRange) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) {
    auto v = qforest::testing::vec(rng, static_cast<std::size_t>(qforest::testing::uniform_int(rng, 1, 100)), 0.5, 1);
    if (t % 3 == 0) v.assign(v.size(), 0.1 + 0.2);
    const auto s = summarize(v);
    EXPECT_GE(s.mean, s.min);
    EXPECT_LE(s.mean, s.max);
  }
}

TEST(Config, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.qubits = {9};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.layers = {0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.layers = {1, 1};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.dataset = "iris";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.runs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Grid, ShapesAndInvariants) {
  const auto cfg = small_config();
  const auto r = run_grid(cfg);
  ASSERT_EQ(r.cells.size(), 4U);
  EXPECT_EQ(r.cells[1].qubits, 2);
  EXPECT_EQ(r.cells[1].layers, 2);
  for (const auto& c : r.cells) {
    EXPECT_FALSE(c.error);
    ASSERT_EQ(c.tasks.size(), 20U);
    EXPECT_EQ(c.test_auc.count, 20U);
    EXPECT_GE(c.test_auc.mean, c.test_auc.min);
    EXPECT_LE(c.test_auc.mean, c.test_auc.max);
    std::size_t pooled = 0;
    for (const auto& t : c.tasks) pooled += t.confusion.total();
    EXPECT_EQ(pooled, 270U * 2);
    EXPECT_EQ(c.confusion.total(), pooled);
    EXPECT_EQ(c.tasks[13].run, 1);
    EXPECT_EQ(c.tasks[13].fold, 3);
  }
  EXPECT_NE(r.best_cell(), nullptr);
}

TEST(Grid, ThreadCountDoesNotChangeResults) {
  auto cfg = small_config();
  cfg.model = ModelKind::Hqrf;
  const auto one = run_grid(cfg);
  cfg.threads = 4;
  const auto four = run_grid(cfg);
  EXPECT_EQ(to_json(one).dump(), to_json(four).dump());
  EXPECT_EQ(one.cells, four.cells);
}

TEST(Grid, RunsResplitUnlessFixed) {
  auto cfg = small_config();
  cfg.qubits = {2};
  cfg.layers = {1};
  const auto a = run_grid(cfg);
  EXPECT_NE(a.cells[0].tasks[0].test_labels, a.cells[0].tasks[10].test_labels);
  cfg.fixed_folds = true;
  const auto b = run_grid(cfg);
  EXPECT_EQ(b.cells[0].tasks[0].test_labels, b.cells[0].tasks[10].test_labels);
}

TEST(Grid, HqrfRecordsPartitionPerRun) {
  auto cfg = small_config();
  cfg.model = ModelKind::Hqrf;
  cfg.qubits = {2};
  cfg.layers = {1};
  cfg.protocol = Protocol::Split70;
  cfg.partition = forest::ChunkPolicy::CeilFill;
  const auto r = run_grid(cfg);
  ASSERT_EQ(r.cells[0].tasks.size(), 2U);
  EXPECT_EQ(r.cells[0].tasks[0].partition.size(), 3U);
  EXPECT_EQ(r.cells[0].tasks[0].partition[0].size(), 5U);
  EXPECT_NE(r.cells[0].tasks[0].partition, r.cells[0].tasks[1].partition);
}

TEST(Grid, TrainOnlyImputationOnCleveland) {
  ExperimentConfig cfg;
  cfg.dataset = "cleveland";
  cfg.data_path = kDataDir / "processed.cleveland.data";
  cfg.qubits = {2};
  cfg.layers = {1};
  cfg.runs = 1;
  cfg.train.epochs = 1;
  cfg.imputation = Imputation::TrainOnly;
  const auto raw = load_experiment_data(cfg);
  EXPECT_TRUE(raw.has_unimputed_cells());
  const auto r = run_grid(cfg, raw);
  EXPECT_FALSE(r.any_failed());
}

TEST(Grid, FailedCellIsReportedNotFatal) {
  auto ds = qforest::testing::random_dataset(30, 30, 13, 3);
  ds.samples[0].features[0] = std::numeric_limits<double>::infinity();
  auto cfg = small_config();
  cfg.qubits = {2};
  cfg.layers = {1};
  cfg.runs = 1;
  cfg.standardize = false;
  const auto r = run_grid(cfg, ds);
  EXPECT_TRUE(r.any_failed());
  ASSERT_TRUE(r.cells[0].error);
  EXPECT_NE(r.cells[0].error->find("run 0 fold"), std::string::npos);
  EXPECT_NE(render_table(r).find("failed"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  auto cfg = small_config();
  cfg.protocol = Protocol::Split70;
  const auto r = run_grid(cfg);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("version"), kReportSchemaVersion);
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_THROW(report_from_json(nlohmann::json{{"format", "x"}}), StructuralError);
}

TEST(Report, CsvRows) {
  const auto r = run_grid(small_config());
  const auto csv = render_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "dataset,model,qubits,layers,protocol,run,fold,train_auc,test_auc,acc,sens,spec,ppv,f1,seconds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2 * 10);
}

TEST(Report, TableShowsPercentages) {
  auto cfg = small_config();
  cfg.protocol = Protocol::Split70;
  const auto r = run_grid(cfg);
  const auto table = render_table(r);
  std::ostringstream expected;
  expected << std::fixed << std::setprecision(2) << 100 * r.cells[3].train_auc.mean << '/'
           << 100 * r.cells[3].test_auc.mean;
  EXPECT_NE(table.find(expected.str()), std::string::npos) << table;
  EXPECT_NE(table.find("L=2"), std::string::npos);
}

TEST(Report, EmitWritesFiles) {
  auto cfg = small_config();
  cfg.qubits = {2};
  cfg.layers = {1};
  cfg.runs = 1;
  const auto r = run_grid(cfg);
  const auto dir = fresh_dir("qforest_emit_test");
  const auto files = emit_report(r, {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Table}, dir);
  EXPECT_EQ(files.size(), 3U + 10U);
  EXPECT_TRUE(std::filesystem::exists(dir / "statlog_hqnn_cv10.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "statlog_hqnn_cv10_roc_q2_l1_run0_fold9.csv"));
  EXPECT_EQ(slurp(dir / "statlog_hqnn_cv10.txt"), render_table(r));
  std::filesystem::remove_all(dir);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--bogus"}), 2);
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--qubits", "9"}), 2);
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--qubits", "two"}), 2);
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--format", "xml"}), 2);
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--epochs", "0"}), 2);
  EXPECT_EQ(run_cli({"--dataset", "mnist"}), 2);
}

TEST(Cli, MissingFileIsIoError) {
  EXPECT_EQ(run_cli({"--dataset", "statlog", "--data", "/nonexistent/heart.dat", "-q"}), 3);
}

TEST(Cli, EndToEnd) {
  const auto dir = fresh_dir("qforest_cli_test");
  const int code = run_cli({"--dataset", "statlog", "--data", (kDataDir / "heart.dat").string(), "--model", "hqrf",
                            "--qubits", "2,4", "--layers", "1", "--protocol", "split70", "--runs", "2", "--epochs", "2",
                            "--format", "json,csv", "--out", dir.string(), "--threads", "2", "-q"});
  EXPECT_EQ(code, 0);
  const auto j = nlohmann::json::parse(slurp(dir / "statlog_hqrf_split70.json"));
  EXPECT_EQ(j.at("config").at("qubits"), (std::vector<int>{2, 4}));
  EXPECT_EQ(j.at("cells").size(), 2U);
  EXPECT_FALSE(std::filesystem::exists(dir / "statlog_hqrf_split70.txt"));
  const auto csv = slurp(dir / "statlog_hqrf_split70.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2);
  std::filesystem::remove_all(dir);
}

TEST(Cli, RunsDefaultByModel) {
  const auto dir = fresh_dir("qforest_cli_runs");
  ASSERT_EQ(run_cli({"--dataset", "statlog", "--data", (kDataDir / "heart.dat").string(), "--model", "hqrf",
                     "--qubits", "4", "--layers", "1", "--protocol", "split70", "--epochs", "1", "--format", "json",
                     "--out", dir.string(), "-q"}),
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "statlog_hqrf_split70.json")).at("config").at("runs"), 5);
  std::filesystem::remove_all(dir);
}

}  // namespace
