#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "qforest/error.hpp"
#include "qforest/runner.hpp"

namespace qforest::runner {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::vector<std::string>& items, const char* flag) {
  std::vector<int> out;
  for (const auto& tok : split_commas(items)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{} expects integers, got '{}'", flag, tok));
    }
  }
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Hybrid quantum neural network / quantum random forest experiments on heart-disease data"};
  app.set_version_flag("--version", "qforest 0.1.0");

  std::string dataset;
  std::string data_path;
  std::string model = "hqnn";
  std::vector<std::string> qubits{"2,3,4"};
  std::vector<std::string> layers{"1,2,3,4"};
  std::string protocol = "cv10";
  std::optional<int> runs;
  std::uint64_t seed = 0;
  hqnn::TrainConfig train;
  std::string out_dir = "results";
  std::vector<std::string> formats{"json", "csv", "table"};
  bool no_standardize = false;
  std::string imputation = "paper";
  std::string partition = "balanced";
  std::string entangler = "chain";
  bool fixed_folds = false;
  bool timing = false;
  bool quiet = false;
  unsigned threads = 1;

  app.add_option("--dataset", dataset, "cleveland or statlog")->required();
  app.add_option("--data", data_path, "Dataset file (default: the standard file under the data directory)");
  app.add_option("--model", model, "hqnn or hqrf")->capture_default_str();
  app.add_option("--qubits", qubits, "Qubit counts, comma separated, each in 2..4")->capture_default_str();
  app.add_option("--layers", layers, "Layer counts, comma separated, each in 1..4")->capture_default_str();
  app.add_option("--protocol", protocol, "cv10 (stratified 10-fold) or split70 (stratified 70/30)")
      ->capture_default_str();
  app.add_option("--runs", runs, "Independent runs per cell (default 10 for hqnn, 5 for hqrf)");
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  app.add_option("--batch", train.batch_size, "Mini-batch size")->capture_default_str();
  app.add_option("--lr", train.learning_rate, "Adam learning rate")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", formats, "Report formats: json, csv, table (comma separated)")->capture_default_str();
  app.add_flag("--no-standardize", no_standardize, "Skip per-fold z-scoring");
  app.add_option("--imputation", imputation, "paper or train-only")->capture_default_str();
  app.add_option("--partition", partition, "HQRF chunking: balanced or paper-5-5-3")->capture_default_str();
  app.add_option("--entangler", entangler, "CNOT topology: chain or ring")->capture_default_str();
  app.add_flag("--fixed-folds", fixed_folds, "Reuse the run-0 folds for every run");
  app.add_flag("--timing", timing, "Record wall-clock seconds in the reports");
  app.add_option("--threads", threads, "Worker threads")->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    ExperimentConfig config;
    config.dataset = dataset;
    config.data_path = data_path;
    config.model = model_from_string(model);
    config.qubits = parse_int_list(qubits, "--qubits");
    config.layers = parse_int_list(layers, "--layers");
    config.protocol = protocol_from_string(protocol);
    config.runs = runs.value_or(config.model == ModelKind::Hqnn ? 10 : 5);
    config.seed = seed;
    config.train = train;
    config.standardize = !no_standardize;
    config.imputation = imputation_from_string(imputation);
    config.partition = forest::chunk_policy_from_string(partition);
    config.entangler = hqnn::entangler_from_string(entangler);
    config.fixed_folds = fixed_folds;
    config.record_timing = timing;
    config.threads = threads;
    std::vector<ReportFormat> report_formats;
    for (const auto& f : split_commas(formats)) report_formats.push_back(format_from_string(f));
    config.validate();

    const std::size_t total = config.qubits.size() * config.layers.size() * static_cast<std::size_t>(config.runs) *
                              config.folds();
    std::size_t done = 0;
    ProgressFn progress;
    if (!quiet) {
      progress = [&](const TaskProgress& p) {
        ++done;
        if (p.record->error) {
          std::cerr << fmt::format("[{}/{}] qubits={} layers={} run={} fold={} FAILED: {}\n", done, total, p.qubits,
                                   p.layers, p.run, p.fold, *p.record->error);
        } else {
          std::cerr << fmt::format("[{}/{}] qubits={} layers={} run={} fold={} train AUC {:.4f} test AUC {:.4f}\n",
                                   done, total, p.qubits, p.layers, p.run, p.fold, p.record->train_auc,
                                   p.record->test_auc);
        }
      };
    }

    const GridReport report = run_grid(config, progress);
    const auto files = emit_report(report, report_formats, out_dir);
    std::cout << render_table(report);
    for (const auto& f : files) {
      if (!quiet) std::cerr << "wrote " << f.string() << '\n';
    }
    return report.any_failed() ? kExitFailure : kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IngestError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace qforest::runner
