// smelldetect command-line driver.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime or numeric error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smelldetect/config.hpp"
#include "smelldetect/experiment.hpp"
#include "smelldetect/feature_selection.hpp"
#include "smelldetect/metrics.hpp"
#include "smelldetect/model.hpp"
#include "smelldetect/preprocessing.hpp"
#include "smelldetect/reference.hpp"
#include "smelldetect/report.hpp"

namespace sd = smelldetect;

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> datasets;
  std::vector<std::string> smells;
  std::vector<std::string> models;
  std::string search;
  std::optional<long long> trials;
  std::optional<long long> folds;
  std::optional<long long> seed;
  std::optional<double> test_fraction;
  std::string mode;
  std::vector<std::string> features;
  std::string out;
  std::vector<std::string> formats;
  std::optional<long long> smote_k;
  std::optional<long long> threads;
  std::string label_column;
  std::string positive_label;
};

void add_pipeline_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "TOML experiment file");
  app->add_option("--dataset", f.datasets, "Dataset path, or SMELL=PATH; repeatable");
  app->add_option("--smell", f.smells, "Smell(s) to run, or 'all'")->delimiter(',');
  app->add_option("--models", f.models, "Model(s) to run, or 'all'")->delimiter(',');
  app->add_option("--search", f.search, "none, grid, random or bayes");
  app->add_option("--trials", f.trials, "Budget for random and bayes search");
  app->add_option("--folds", f.folds, "Cross-validation folds");
  app->add_option("--seed", f.seed, "Seed for every random stage");
  app->add_option("--test-fraction", f.test_fraction, "Held-out fraction");
  app->add_option("--mode", f.mode, "paper-faithful or sound");
  app->add_option("--features", f.features, "auto, all, or a comma list of column names")->delimiter(',');
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--format", f.formats, "markdown, csv, json")->delimiter(',');
  app->add_option("--smote-k", f.smote_k, "SMOTE neighbours");
  app->add_option("--threads", f.threads, "Worker threads for trials; 0 = all cores");
  app->add_option("--label-column", f.label_column, "Label attribute or column");
  app->add_option("--positive-label", f.positive_label, "Label value meaning smelly");
}

// Config file first, flags on top.
sd::ExperimentConfig build_config(const Flags& f) {
  sd::RawConfig raw;
  if (!f.config.empty()) raw = sd::load_config(f.config);
  if (!f.smells.empty()) raw.smells = f.smells;
  for (const auto& d : f.datasets) {
    const auto eq = d.find('=');
    if (eq != std::string::npos && sd::parse_smell(d.substr(0, eq))) {
      raw.datasets[d.substr(0, eq)] = d.substr(eq + 1);
    } else if (f.smells.size() == 1 && sd::detail::fold_name(f.smells[0]) != "all") {
      raw.datasets[f.smells[0]] = d;
    } else {
      throw sd::ConfigError("--dataset '" + d + "' needs the form SMELL=PATH unless exactly one --smell is given");
    }
  }
  if (!f.models.empty()) raw.models = f.models;
  if (!f.search.empty()) raw.search = f.search;
  if (f.trials) raw.trials = f.trials;
  if (f.folds) raw.folds = f.folds;
  if (f.seed) raw.seed = f.seed;
  if (f.test_fraction) raw.test_fraction = f.test_fraction;
  if (!f.mode.empty()) raw.mode = f.mode;
  if (!f.features.empty()) raw.features = f.features;
  if (!f.out.empty()) raw.out_dir = f.out;
  if (!f.formats.empty()) raw.formats = f.formats;
  if (f.smote_k) raw.smote_k = f.smote_k;
  if (f.threads) raw.threads = f.threads;
  if (!f.label_column.empty()) raw.label_column = f.label_column;
  if (!f.positive_label.empty()) raw.positive_label = f.positive_label;
  return sd::require_valid(raw);
}

void print_warnings(const sd::Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const Flags& f) {
  const auto cfg = build_config(f);
  const auto result = sd::run_experiment(cfg);
  for (const auto& s : result.smells) {
    print_warnings(s.warnings);
    std::cout << sd::to_string(s.smell) << ": raw " << s.raw.positives << "/" << s.raw.negatives << ", balanced "
              << s.balanced.positives << "/" << s.balanced.negatives << ", train " << s.train_rows << ", test "
              << s.test_rows << ", features " << s.features.size() << '\n';
  }
  std::cout << sd::render_report(result.rows, sd::ReportFormat::Markdown, sd::report_banner(cfg));
  std::cout << "wrote " << result.files.size() << " files to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_tune(Flags f) {
  if (f.search.empty()) f.search = "grid";
  const auto cfg = build_config(f);
  if (cfg.search == sd::SearchStrategy::None) throw sd::ConfigError("tune needs a search strategy");
  for (auto smell : cfg.smells) {
    const auto data = sd::prepare_smell(cfg, smell);
    print_warnings(data.summary.warnings);
    for (auto kind : cfg.models) {
      const auto result = sd::tune(cfg, kind, data.train);
      const auto stem = sd::pair_stem(smell, kind);
      const auto dir = cfg.out_dir / "ledgers";
      std::filesystem::create_directories(dir);
      std::ofstream(dir / (stem + ".csv"), std::ios::binary) << sd::ledger_csv(result, sd::default_grid(kind));
      std::ofstream(dir / (stem + ".json"), std::ios::binary) << sd::ledger_json(result).dump(1) << '\n';
      std::cout << stem << ": best " << sd::format_percent(100.0 * result.best_score) << "% over "
                << result.trials.size() << " trials: " << result.best_params.to_string() << '\n';
    }
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const Flags& f, bool tuned) {
  if (f.datasets.size() != 1) throw sd::ConfigError("eval needs exactly one --dataset");
  const auto model = sd::load_model(model_path);
  sd::Warnings warnings;
  const auto label = f.label_column.empty() ? std::nullopt : std::optional<std::string>(f.label_column);
  const auto positive = f.positive_label.empty() ? std::nullopt : std::optional<std::string>(f.positive_label);
  auto data = sd::impute_missing(sd::load_dataset(f.datasets.front(), label, positive, &warnings));
  print_warnings(warnings);
  data = data.select_columns(sd::columns_by_name(data, model.feature_names()));
  auto report = sd::metrics(sd::confusion(data.labels(), sd::predict(model, data.features())));
  report.model = model.kind();
  report.tuned = tuned;
  if (f.smells.size() == 1) {
    report.smell = sd::require_smell(f.smells.front());
    const auto format = f.formats.empty() ? std::string("markdown") : f.formats.front();
    std::cout << sd::render_report({sd::make_report_row(report)}, format);
    return 0;
  }
  const auto& m = report.matrix;
  std::cout << "tp " << m.tp << " fp " << m.fp << " fn " << m.fn << " tn " << m.tn << "\nAcc "
            << sd::format_percent(100 * report.accuracy) << " Prec " << sd::format_percent(100 * report.precision)
            << " Rec " << sd::format_percent(100 * report.recall) << " F1 " << sd::format_percent(100 * report.f1)
            << '\n';
  return 0;
}

int cmd_reference(const Flags& f, bool tuned) {
  if (f.smells.empty()) throw sd::ConfigError("reference needs --smell");
  std::vector<sd::SmellKind> smells;
  for (const auto& s : f.smells) {
    if (sd::detail::fold_name(s) == "all") smells.assign(sd::kAllSmells.begin(), sd::kAllSmells.end());
    else smells.push_back(sd::require_smell(s));
  }
  std::vector<sd::ModelKind> models;
  for (const auto& m : f.models) {
    if (sd::detail::fold_name(m) == "all") models.assign(sd::kAllModels.begin(), sd::kAllModels.end());
    else models.push_back(sd::require_model(m));
  }
  if (models.empty()) models.assign(sd::kAllModels.begin(), sd::kAllModels.end());
  for (auto s : smells) {
    for (auto m : models) {
      std::cout << sd::print_reference(sd::to_string(s), sd::to_string(m), tuned) << '\n';
      if (tuned) {
        if (auto best = sd::reference_best_config(s, m)) std::cout << "  best: " << best->to_string() << '\n';
      }
    }
  }
  return 0;
}

int cmd_inspect(const Flags& f) {
  if (f.datasets.size() != 1) throw sd::ConfigError("inspect needs exactly one --dataset");
  sd::Warnings warnings;
  const auto label = f.label_column.empty() ? std::nullopt : std::optional<std::string>(f.label_column);
  const auto positive = f.positive_label.empty() ? std::nullopt : std::optional<std::string>(f.positive_label);
  const auto raw = sd::load_dataset(f.datasets.front(), label, positive, &warnings);
  std::size_t missing = 0;
  for (double v : raw.features().data()) missing += std::isnan(v) ? 1 : 0;
  const auto counts = sd::class_counts(raw);
  std::cout << "rows " << raw.rows() << ", features " << raw.cols() << ", smelly " << counts.positives
            << ", not smelly " << counts.negatives << ", missing cells " << missing << '\n';
  const auto fs = sd::compute_feature_selection(sd::impute_missing(raw), &warnings);
  print_warnings(warnings);
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    const bool kept = std::find(fs.selected.begin(), fs.selected.end(), c) != fs.selected.end();
    std::cout << (kept ? "* " : "  ") << raw.schema().feature_names[c] << " r=" << fs.correlations[c]
              << (fs.degenerate[c] ? " (constant)" : "") << '\n';
  }
  std::cout << "threshold |r| > " << fs.threshold << ", kept " << fs.selected.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code smell detection experiments"};
  app.require_subcommand(1);
  Flags flags;
  bool tuned = false;
  std::string model_path;

  auto* run = app.add_subcommand("run", "Full pipeline: preprocess, tune, fit, evaluate, report");
  add_pipeline_flags(run, flags);
  auto* tune = app.add_subcommand("tune", "Write trial ledgers only");
  add_pipeline_flags(tune, flags);
  auto* eval = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval->add_option("--model", model_path, "Saved model JSON")->required();
  eval->add_option("--dataset", flags.datasets, "Dataset path")->required();
  eval->add_option("--smell", flags.smells, "Smell, to compare against the reference values");
  eval->add_option("--format", flags.formats, "markdown, csv, json");
  eval->add_flag("--tuned", tuned, "Compare against the tuned reference");
  eval->add_option("--label-column", flags.label_column, "Label attribute or column");
  eval->add_option("--positive-label", flags.positive_label, "Label value meaning smelly");
  auto* reference = app.add_subcommand("reference", "Print reference percentages");
  reference->add_option("--smell", flags.smells, "Smell(s), or 'all'")->delimiter(',');
  reference->add_option("--models", flags.models, "Model(s), or 'all'")->delimiter(',');
  reference->add_flag("--tuned", tuned, "Values after hyperparameter search");
  auto* inspect = app.add_subcommand("inspect", "Class counts, correlations and the selection threshold");
  inspect->add_option("--dataset", flags.datasets, "Dataset path")->required();
  inspect->add_option("--label-column", flags.label_column, "Label attribute or column");
  inspect->add_option("--positive-label", flags.positive_label, "Label value meaning smelly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(flags);
    if (tune->parsed()) return cmd_tune(flags);
    if (eval->parsed()) return cmd_eval(model_path, flags, tuned);
    if (reference->parsed()) return cmd_reference(flags, tuned);
    if (inspect->parsed()) return cmd_inspect(flags);
  } catch (const sd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const sd::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
