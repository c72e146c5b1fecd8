#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/config.hpp"
#include "smelldetect/cross_validation.hpp"
#include "smelldetect/dataset_io.hpp"
#include "smelldetect/feature_selection.hpp"
#include "smelldetect/metrics.hpp"
#include "smelldetect/model.hpp"
#include "smelldetect/preprocessing.hpp"
#include "smelldetect/reference.hpp"
#include "smelldetect/report.hpp"
#include "smelldetect/smote.hpp"
#include "smelldetect/tuning.hpp"

namespace smelldetect {

// Loads ARFF or CSV by extension.
inline LabeledDataset load_dataset(const std::filesystem::path& path, const std::optional<std::string>& label_column,
                                   const std::optional<std::string>& positive_label, Warnings* warnings = nullptr) {
  if (!std::filesystem::exists(path)) throw DataError("dataset file not found: " + path.string());
  auto ext = detail::lower(path.extension().string());
  if (ext == ".csv") {
    return load_csv(path, label_column.value_or("label"), positive_label.value_or("1"), warnings);
  }
  return load_arff(path, ArffOptions{label_column, positive_label}, warnings);
}

inline std::vector<std::size_t> columns_by_name(const LabeledDataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& name : names) {
    const auto& all = ds.schema().feature_names;
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw DataError("dataset has no feature named '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - all.begin()));
  }
  return cols;
}

// Origin ids of the rows each statistic was computed from.
struct Provenance {
  std::vector<std::int64_t> imputation_rows;
  std::vector<std::int64_t> smote_rows;
  std::vector<std::int64_t> selection_rows;
  std::vector<std::int64_t> test_rows;
};

struct SmellSummary {
  SmellKind smell = SmellKind::GodClass;
  std::string dataset;
  ClassCounts raw;
  ClassCounts balanced;  // SMOTE output (training split only in sound mode)
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  ClassCounts train_counts;
  ClassCounts test_counts;
  std::vector<std::string> features;
  std::optional<double> selection_threshold;
  bool selection_fallback = false;
  Warnings warnings;
};

struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
  SmellSummary summary;
  Provenance provenance;
};

namespace detail {

inline LabeledDataset choose_features(const ExperimentConfig& cfg, const LabeledDataset& fit_on,
                                      SmellSummary& summary, std::vector<std::size_t>& columns,
                                      std::vector<std::int64_t>& source_rows) {
  switch (cfg.feature_policy) {
    case FeaturePolicy::Auto: {
      auto fs = compute_feature_selection(fit_on, &summary.warnings);
      summary.selection_threshold = fs.threshold;
      summary.selection_fallback = fs.fallback;
      source_rows = fs.source_rows;
      columns = fs.selected;
      break;
    }
    case FeaturePolicy::All:
      columns.resize(fit_on.cols());
      std::iota(columns.begin(), columns.end(), std::size_t{0});
      break;
    case FeaturePolicy::Explicit:
      columns = columns_by_name(fit_on, cfg.feature_names);
      break;
  }
  auto out = fit_on.select_columns(columns);
  summary.features = out.schema().feature_names;
  return out;
}

}  // namespace detail

// Runs the preprocessing stages for one smell.
// Paper-faithful: impute, SMOTE, select features, then split.
// Sound: split first; every later statistic is fitted on the training rows only.
inline PreparedData prepare_smell(const ExperimentConfig& cfg, SmellKind smell, const LabeledDataset& loaded) {
  SmellSummary summary;
  summary.smell = smell;
  if (auto it = cfg.datasets.find(smell); it != cfg.datasets.end()) summary.dataset = it->second.string();
  LabeledDataset raw = loaded;
  raw.set_smell(smell);
  summary.raw = class_counts(raw);
  Provenance prov;
  const SmoteConfig smote{static_cast<std::size_t>(cfg.smote_k), cfg.seed};
  std::vector<std::size_t> columns;

  if (cfg.mode == PipelineMode::PaperFaithful) {
    const auto means = fit_column_means(raw);
    prov.imputation_rows = means.source_rows;
    auto imputed = apply_column_means(means, raw);
    prov.smote_rows = imputed.origin();
    auto balanced = smote_oversample(imputed, smote);
    summary.balanced = class_counts(balanced);
    auto reduced = detail::choose_features(cfg, balanced, summary, columns, prov.selection_rows);
    auto split = stratified_split(reduced, cfg.test_fraction, cfg.seed);
    prov.test_rows = split.test.origin();
    summary.train_rows = split.train.rows();
    summary.test_rows = split.test.rows();
    summary.train_counts = class_counts(split.train);
    summary.test_counts = class_counts(split.test);
    return {std::move(split.train), std::move(split.test), std::move(summary), std::move(prov)};
  }

  auto split = stratified_split(raw, cfg.test_fraction, cfg.seed);
  prov.test_rows = split.test.origin();
  // Test rows are only ever transformed with statistics fitted on training rows.
  const auto means = fit_column_means(split.train);
  prov.imputation_rows = means.source_rows;
  auto train = apply_column_means(means, split.train);
  auto test = apply_column_means(means, split.test);
  prov.smote_rows = train.origin();
  train = smote_oversample(train, smote);
  summary.balanced = class_counts(train);
  train = detail::choose_features(cfg, train, summary, columns, prov.selection_rows);
  test = test.select_columns(columns);
  summary.train_rows = train.rows();
  summary.test_rows = test.rows();
  summary.train_counts = class_counts(train);
  summary.test_counts = class_counts(test);
  return {std::move(train), std::move(test), std::move(summary), std::move(prov)};
}

inline PreparedData prepare_smell(const ExperimentConfig& cfg, SmellKind smell) {
  const auto it = cfg.datasets.find(smell);
  if (it == cfg.datasets.end()) throw ConfigError("no dataset path for smell " + std::string(to_string(smell)));
  Warnings warnings;
  auto loaded = load_dataset(it->second, cfg.label_column, cfg.positive_label, &warnings);
  auto prepared = prepare_smell(cfg, smell, loaded);
  prepared.summary.warnings.insert(prepared.summary.warnings.begin(), warnings.begin(), warnings.end());
  return prepared;
}

inline CvConfig cv_config(const ExperimentConfig& cfg) { return {cfg.folds, cfg.seed, cfg.threads}; }

inline TuningResult tune(const ExperimentConfig& cfg, ModelKind kind, const LabeledDataset& train) {
  const auto space = default_grid(kind);
  const auto cv = cv_config(cfg);
  switch (cfg.search) {
    case SearchStrategy::Grid: return grid_search(space, train, cv);
    case SearchStrategy::Random: return random_search(space, train, cv, cfg.trials, cfg.seed);
    case SearchStrategy::Bayes: return bayesian_search(space, train, cv, cfg.trials, cfg.seed);
    case SearchStrategy::None: break;
  }
  throw ConfigError("no search strategy selected");
}

struct PairOutcome {
  SmellKind smell = SmellKind::GodClass;
  ModelKind model = ModelKind::KNN;
  Hyperparameters params;
  MetricsReport metrics;
  std::optional<TuningResult> tuning;
  std::string model_json;
};

inline PairOutcome run_pair(const ExperimentConfig& cfg, SmellKind smell, ModelKind kind, const PreparedData& data) {
  PairOutcome out;
  out.smell = smell;
  out.model = kind;
  Hyperparameters params;
  if (cfg.search != SearchStrategy::None) {
    out.tuning = tune(cfg, kind, data.train);
    params = out.tuning->best_params;
  }
  const auto model = fit_model(kind, params, data.train, cfg.seed);
  out.params = model.params();
  const auto predicted = predict(model, data.test.features());
  out.metrics = metrics(confusion(data.test.labels(), predicted));
  out.metrics.smell = smell;
  out.metrics.model = kind;
  out.metrics.tuned = cfg.search != SearchStrategy::None;
  out.model_json = model.to_json().dump(1) + "\n";
  return out;
}

inline std::string report_banner(const ExperimentConfig& cfg) {
  return "smelldetect report: mode=" + std::string(to_string(cfg.mode)) +
         ", search=" + std::string(to_string(cfg.search)) + ", seed=" + std::to_string(cfg.seed);
}

inline std::string pair_stem(SmellKind smell, ModelKind model) {
  return std::string(to_string(smell)) + "_" + std::string(to_string(model));
}

inline nlohmann::json counts_json(const ClassCounts& c) {
  return {{"positives", c.positives}, {"negatives", c.negatives}};
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json datasets = nlohmann::json::object();
  for (const auto& [s, p] : cfg.datasets) datasets[std::string(to_string(s))] = p.string();
  nlohmann::json smells = nlohmann::json::array();
  for (auto s : cfg.smells) smells.push_back(std::string(to_string(s)));
  nlohmann::json models = nlohmann::json::array();
  for (auto m : cfg.models) models.push_back(std::string(to_string(m)));
  nlohmann::json formats = nlohmann::json::array();
  for (auto f : cfg.formats) formats.push_back(std::string(file_extension(f)));
  nlohmann::json features = cfg.feature_policy == FeaturePolicy::Auto  ? nlohmann::json("auto")
                            : cfg.feature_policy == FeaturePolicy::All ? nlohmann::json("all")
                                                                       : nlohmann::json(cfg.feature_names);
  return {{"datasets", datasets},
          {"smells", smells},
          {"models", models},
          {"search", std::string(to_string(cfg.search))},
          {"trials", cfg.trials},
          {"test_fraction", cfg.test_fraction},
          {"smote_k", cfg.smote_k},
          {"folds", cfg.folds},
          {"seed", cfg.seed},
          {"mode", std::string(to_string(cfg.mode))},
          {"features", features},
          {"formats", formats}};
}

struct ExperimentResult {
  std::vector<SmellSummary> smells;
  std::vector<PairOutcome> pairs;
  std::vector<ReportRow> rows;
  // Relative path under the output directory -> contents.
  std::map<std::string, std::string> files;
};

// Runs every (smell, model) pair and assembles all output documents. Files are
// written under cfg.out_dir when `write` is set.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write = true) {
  ExperimentResult result;
  for (auto smell : cfg.smells) {
    const auto data = prepare_smell(cfg, smell);
    for (auto kind : cfg.models) {
      auto pair = run_pair(cfg, smell, kind, data);
      const auto stem = pair_stem(smell, kind);
      result.files["models/" + stem + ".json"] = pair.model_json;
      if (pair.tuning) {
        result.files["ledgers/" + stem + ".csv"] = ledger_csv(*pair.tuning, default_grid(kind));
        result.files["ledgers/" + stem + ".json"] = ledger_json(*pair.tuning).dump(1) + "\n";
      }
      result.rows.push_back(make_report_row(pair.metrics));
      result.pairs.push_back(std::move(pair));
    }
    result.smells.push_back(data.summary);
  }
  const auto banner = report_banner(cfg);
  for (auto fmt : cfg.formats) {
    result.files["report." + std::string(file_extension(fmt))] = render_report(result.rows, fmt, banner);
  }

  nlohmann::json smells = nlohmann::json::array();
  for (const auto& s : result.smells) {
    smells.push_back({{"smell", std::string(to_string(s.smell))},
                      {"dataset", s.dataset},
                      {"raw", counts_json(s.raw)},
                      {"balanced", counts_json(s.balanced)},
                      {"train_rows", s.train_rows},
                      {"test_rows", s.test_rows},
                      {"train", counts_json(s.train_counts)},
                      {"test", counts_json(s.test_counts)},
                      {"features", s.features},
                      {"selection_threshold", s.selection_threshold ? nlohmann::json(*s.selection_threshold)
                                                                    : nlohmann::json(nullptr)},
                      {"selection_fallback", s.selection_fallback},
                      {"warnings", s.warnings}});
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : result.pairs) {
    pairs.push_back({{"smell", std::string(to_string(p.smell))},
                     {"model", std::string(to_string(p.model))},
                     {"params", params_json(p.params)},
                     {"cv_score", p.tuning ? nlohmann::json(p.tuning->best_score) : nlohmann::json(nullptr)},
                     {"trials", p.tuning ? p.tuning->trials.size() : 0}});
  }
  nlohmann::json listing = nlohmann::json::array();
  for (const auto& [name, _] : result.files) listing.push_back(name);
  listing.push_back("manifest.json");
  std::sort(listing.begin(), listing.end());
  const nlohmann::json seeds = {{"smote", cfg.seed}, {"split", cfg.seed}, {"cv", cfg.seed},
                                {"search", cfg.seed}, {"model", cfg.seed}};
  const nlohmann::json manifest = {{"config", config_json(cfg)}, {"seeds", seeds}, {"smells", smells},
                                   {"pairs", pairs}, {"files", listing}};
  result.files["manifest.json"] = manifest.dump(2) + "\n";

  if (write) {
    for (const auto& [name, text] : result.files) {
      const auto path = cfg.out_dir / name;
      std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary);
      if (!out) throw DataError("cannot write " + path.string());
      out << text;
    }
  }
  return result;
}

}  // namespace smelldetect
