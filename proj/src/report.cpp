#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qforest/error.hpp"
#include "qforest/runner.hpp"

namespace qforest::runner {

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json stats_json(const Stats& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
}

Stats stats_from(const json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("min").get<double>(), j.at("max").get<double>(),
          j.at("count").get<std::size_t>()};
}

json cm_json(const metrics::ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

metrics::ConfusionMatrix cm_from(const json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("tn").get<std::size_t>(), j.at("fp").get<std::size_t>(),
          j.at("fn").get<std::size_t>()};
}

json summary_json(const metrics::SummaryMetrics& m) {
  return {{"acc", opt_json(m.acc)},
          {"sens", opt_json(m.sens)},
          {"spec", opt_json(m.spec)},
          {"ppv", opt_json(m.ppv)},
          {"f1", opt_json(m.f1)}};
}

metrics::SummaryMetrics summary_from(const json& j) {
  return {opt_from(j.at("acc")), opt_from(j.at("sens")), opt_from(j.at("spec")), opt_from(j.at("ppv")),
          opt_from(j.at("f1"))};
}

json opt_string_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> opt_string_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

// `threads` is deliberately absent: it never changes results.
json config_json(const ExperimentConfig& c) {
  return {{"dataset", c.dataset},
          {"data_path", c.data_path.string()},
          {"model", to_string(c.model)},
          {"qubits", c.qubits},
          {"layers", c.layers},
          {"protocol", to_string(c.protocol)},
          {"runs", c.runs},
          {"seed", c.seed},
          {"epochs", c.train.epochs},
          {"batch", c.train.batch_size},
          {"lr", c.train.learning_rate},
          {"beta1", c.train.beta1},
          {"beta2", c.train.beta2},
          {"epsilon", c.train.epsilon},
          {"standardize", c.standardize},
          {"imputation", to_string(c.imputation)},
          {"partition", forest::to_string(c.partition)},
          {"entangler", hqnn::to_string(c.entangler)},
          {"fixed_folds", c.fixed_folds},
          {"record_timing", c.record_timing}};
}

ExperimentConfig config_from(const json& j) {
  ExperimentConfig c;
  c.dataset = j.at("dataset").get<std::string>();
  c.data_path = j.at("data_path").get<std::string>();
  c.model = model_from_string(j.at("model").get<std::string>());
  c.qubits = j.at("qubits").get<std::vector<int>>();
  c.layers = j.at("layers").get<std::vector<int>>();
  c.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  c.runs = j.at("runs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.train.epochs = j.at("epochs").get<int>();
  c.train.batch_size = j.at("batch").get<int>();
  c.train.learning_rate = j.at("lr").get<double>();
  c.train.beta1 = j.at("beta1").get<double>();
  c.train.beta2 = j.at("beta2").get<double>();
  c.train.epsilon = j.at("epsilon").get<double>();
  c.standardize = j.at("standardize").get<bool>();
  c.imputation = imputation_from_string(j.at("imputation").get<std::string>());
  c.partition = forest::chunk_policy_from_string(j.at("partition").get<std::string>());
  c.entangler = hqnn::entangler_from_string(j.at("entangler").get<std::string>());
  c.fixed_folds = j.at("fixed_folds").get<bool>();
  c.record_timing = j.at("record_timing").get<bool>();
  return c;
}

json task_json(const TaskRecord& t) {
  return {{"run", t.run},
          {"fold", t.fold},
          {"error", opt_string_json(t.error)},
          {"train_auc", t.train_auc},
          {"test_auc", t.test_auc},
          {"confusion", cm_json(t.confusion)},
          {"metrics", summary_json(t.summary)},
          {"seconds", t.seconds},
          {"test_scores", t.test_scores},
          {"test_labels", t.test_labels},
          {"partition", t.partition}};
}

TaskRecord task_from(const json& j) {
  TaskRecord t;
  t.run = j.at("run").get<int>();
  t.fold = j.at("fold").get<int>();
  t.error = opt_string_from(j.at("error"));
  t.train_auc = j.at("train_auc").get<double>();
  t.test_auc = j.at("test_auc").get<double>();
  t.confusion = cm_from(j.at("confusion"));
  t.summary = summary_from(j.at("metrics"));
  t.seconds = j.at("seconds").get<double>();
  t.test_scores = j.at("test_scores").get<std::vector<double>>();
  t.test_labels = j.at("test_labels").get<std::vector<int>>();
  t.partition = j.at("partition").get<std::vector<std::vector<std::size_t>>>();
  return t;
}

std::string pct(double v) { return fmt::format("{:.2f}", 100.0 * v); }

std::string csv_opt(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string{}; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

json to_json(const GridReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json tasks = json::array();
    for (const auto& t : c.tasks) tasks.push_back(task_json(t));
    cells.push_back({{"qubits", c.qubits},
                     {"layers", c.layers},
                     {"error", opt_string_json(c.error)},
                     {"train_auc", stats_json(c.train_auc)},
                     {"test_auc", stats_json(c.test_auc)},
                     {"confusion", cm_json(c.confusion)},
                     {"metrics", summary_json(c.summary)},
                     {"seconds", c.seconds},
                     {"tasks", tasks}});
  }
  return {{"format", "qforest-grid-report"},
          {"version", kReportSchemaVersion},
          {"config", config_json(report.config)},
          {"cells", cells}};
}

GridReport report_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "qforest-grid-report") throw StructuralError("not a grid report");
    const int version = j.at("version").get<int>();
    if (version != kReportSchemaVersion) throw StructuralError("unsupported report version " + std::to_string(version));
    GridReport r;
    r.config = config_from(j.at("config"));
    for (const auto& cj : j.at("cells")) {
      CellReport c;
      c.qubits = cj.at("qubits").get<int>();
      c.layers = cj.at("layers").get<int>();
      c.error = opt_string_from(cj.at("error"));
      c.train_auc = stats_from(cj.at("train_auc"));
      c.test_auc = stats_from(cj.at("test_auc"));
      c.confusion = cm_from(cj.at("confusion"));
      c.summary = summary_from(cj.at("metrics"));
      c.seconds = cj.at("seconds").get<double>();
      for (const auto& tj : cj.at("tasks")) c.tasks.push_back(task_from(tj));
      r.cells.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed grid report: ") + e.what());
  }
}

std::string render_csv(const GridReport& report) {
  const auto& cfg = report.config;
  std::string out = "dataset,model,qubits,layers,protocol,run,fold,train_auc,test_auc,acc,sens,spec,ppv,f1,seconds\n";
  for (const auto& c : report.cells) {
    for (const auto& t : c.tasks) {
      const bool ok = !t.error;
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", cfg.dataset, to_string(cfg.model), c.qubits,
                         c.layers, to_string(cfg.protocol), t.run, t.fold,
                         ok ? fmt::format("{:.17g}", t.train_auc) : "", ok ? fmt::format("{:.17g}", t.test_auc) : "",
                         csv_opt(t.summary.acc), csv_opt(t.summary.sens), csv_opt(t.summary.spec),
                         csv_opt(t.summary.ppv), csv_opt(t.summary.f1),
                         cfg.record_timing && ok ? fmt::format("{:.6f}", t.seconds) : "");
    }
  }
  return out;
}

std::string render_table(const GridReport& report) {
  const auto& cfg = report.config;
  const bool split = cfg.protocol == Protocol::Split70;
  std::string out = fmt::format("{} {} {}: {} AUC (%), mean over {} run(s){}\n", cfg.dataset, to_string(cfg.model),
                                to_string(cfg.protocol), split ? "train/test" : "test", cfg.runs,
                                split ? "" : " x 10 folds");
  const int width = split ? 14 : 8;
  out += fmt::format("{:<8}", "qubits");
  for (int l : cfg.layers) out += fmt::format("{:>{}}", fmt::format("L={}", l), width);
  out += '\n';
  for (int q : cfg.qubits) {
    out += fmt::format("{:<8}", q);
    for (int l : cfg.layers) {
      const auto it = std::find_if(report.cells.begin(), report.cells.end(),
                                   [&](const CellReport& c) { return c.qubits == q && c.layers == l; });
      std::string entry = "-";
      if (it != report.cells.end()) {
        if (it->error) entry = "failed";
        else if (split) entry = pct(it->train_auc.mean) + "/" + pct(it->test_auc.mean);
        else entry = pct(it->test_auc.mean);
      }
      out += fmt::format("{:>{}}", entry, width);
    }
    out += '\n';
  }
  if (const auto* best = report.best_cell()) {
    out += fmt::format("best: qubits={} layers={} test AUC {} +/- {}\n", best->qubits, best->layers,
                       pct(best->test_auc.mean), pct(best->test_auc.stddev));
  }
  for (const auto& c : report.cells) {
    if (c.error) out += fmt::format("failed: qubits={} layers={}: {}\n", c.qubits, c.layers, *c.error);
  }
  return out;
}

std::string report_stem(const ExperimentConfig& c) {
  return fmt::format("{}_{}_{}", c.dataset, to_string(c.model), to_string(c.protocol));
}

std::vector<std::filesystem::path> emit_report(const GridReport& report, const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const std::string stem = report_stem(report.config);
  std::vector<std::filesystem::path> written;
  for (ReportFormat f : formats) {
    std::filesystem::path path;
    std::string content;
    switch (f) {
      case ReportFormat::Json:
        path = out_dir / (stem + ".json");
        content = to_json(report).dump(1) + "\n";
        break;
      case ReportFormat::Csv:
        path = out_dir / (stem + ".csv");
        content = render_csv(report);
        break;
      case ReportFormat::Table:
        path = out_dir / (stem + ".txt");
        content = render_table(report);
        break;
    }
    write_file(path, content);
    written.push_back(path);
  }

  if (const auto* best = report.best_cell()) {
    for (const auto& t : best->tasks) {
      if (t.error) continue;
      std::ostringstream roc;
      metrics::write_roc_csv(roc, metrics::roc_auc(t.test_scores, t.test_labels));
      const auto path =
          out_dir / fmt::format("{}_roc_q{}_l{}_run{}_fold{}.csv", stem, best->qubits, best->layers, t.run, t.fold);
      write_file(path, roc.str());
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace qforest::runner
