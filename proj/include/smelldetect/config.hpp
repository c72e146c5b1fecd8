#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <toml.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/hyperparameters.hpp"
#include "smelldetect/reference.hpp"
#include "smelldetect/report.hpp"
#include "smelldetect/tuning.hpp"

namespace smelldetect {

enum class PipelineMode { PaperFaithful, Sound };

inline std::string_view to_string(PipelineMode m) {
  return m == PipelineMode::PaperFaithful ? "paper-faithful" : "sound";
}

inline std::optional<PipelineMode> parse_mode(std::string_view text) {
  const auto key = detail::fold_name(text);
  if (key == "paperfaithful" || key == "paper" || key == "faithful") return PipelineMode::PaperFaithful;
  if (key == "sound" || key == "leakfree") return PipelineMode::Sound;
  return std::nullopt;
}

enum class FeaturePolicy { Auto, All, Explicit };

// Fields as written by the user, before validation. Unset means "default".
struct RawConfig {
  std::map<std::string, std::string> datasets;  // smell name -> path
  std::optional<std::vector<std::string>> smells;
  std::optional<std::vector<std::string>> models;
  std::optional<std::string> search;
  std::optional<long long> trials;
  std::optional<double> test_fraction;
  std::optional<long long> smote_k;
  std::optional<long long> folds;
  std::optional<long long> seed;
  std::optional<std::string> mode;
  std::optional<std::vector<std::string>> features;  // ["auto"], ["all"] or column names
  std::optional<std::string> out_dir;
  std::optional<std::vector<std::string>> formats;
  std::optional<long long> threads;
  std::optional<std::string> label_column;
  std::optional<std::string> positive_label;
};

struct ExperimentConfig {
  std::map<SmellKind, std::filesystem::path> datasets;
  std::vector<SmellKind> smells;
  std::vector<ModelKind> models;
  SearchStrategy search = SearchStrategy::None;
  int trials = 30;
  double test_fraction = 0.30;
  int smote_k = 5;
  int folds = 5;
  std::uint64_t seed = 0;
  PipelineMode mode = PipelineMode::PaperFaithful;
  FeaturePolicy feature_policy = FeaturePolicy::Auto;
  std::vector<std::string> feature_names;
  std::filesystem::path out_dir = "out";
  std::vector<ReportFormat> formats = {ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json};
  unsigned threads = 0;
  std::optional<std::string> label_column;
  std::optional<std::string> positive_label;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
  std::string message() const {
    std::string out;
    for (const auto& e : errors) out += (out.empty() ? "" : "\n") + e;
    return out;
  }
};

// Fills defaults and collects every problem instead of stopping at the first.
inline ConfigResult validate_config(const RawConfig& raw) {
  ConfigResult result;
  auto& errors = result.errors;
  ExperimentConfig cfg;

  for (const auto& [name, path] : raw.datasets) {
    if (auto s = parse_smell(name)) {
      cfg.datasets[*s] = path;
    } else {
      errors.push_back("unknown smell '" + name + "' in datasets; valid smells: " + valid_smell_names());
    }
  }

  if (raw.smells) {
    if (raw.smells->empty()) errors.push_back("no smells selected");
    for (const auto& name : *raw.smells) {
      if (detail::fold_name(name) == "all") {
        cfg.smells.assign(kAllSmells.begin(), kAllSmells.end());
      } else if (auto s = parse_smell(name)) {
        if (std::find(cfg.smells.begin(), cfg.smells.end(), *s) == cfg.smells.end()) cfg.smells.push_back(*s);
      } else {
        errors.push_back("unknown smell '" + name + "'; valid smells: " + valid_smell_names());
      }
    }
  } else {
    for (const auto& [s, _] : cfg.datasets) cfg.smells.push_back(s);
    if (cfg.smells.empty()) errors.push_back("no smells selected and no datasets given");
  }
  std::sort(cfg.smells.begin(), cfg.smells.end(),
            [](SmellKind a, SmellKind b) { return smell_index(a) < smell_index(b); });
  for (auto s : cfg.smells) {
    if (!cfg.datasets.contains(s)) errors.push_back("no dataset path for smell " + std::string(to_string(s)));
  }

  if (raw.models) {
    if (raw.models->empty()) errors.push_back("no models selected");
    for (const auto& name : *raw.models) {
      if (detail::fold_name(name) == "all") {
        cfg.models.assign(kAllModels.begin(), kAllModels.end());
      } else if (auto m = parse_model(name)) {
        if (std::find(cfg.models.begin(), cfg.models.end(), *m) == cfg.models.end()) cfg.models.push_back(*m);
      } else {
        errors.push_back("unknown model '" + name + "'; valid models: " + valid_model_names());
      }
    }
  } else {
    cfg.models.assign(kAllModels.begin(), kAllModels.end());
  }
  std::sort(cfg.models.begin(), cfg.models.end(),
            [](ModelKind a, ModelKind b) { return model_index(a) < model_index(b); });

  if (raw.search) {
    if (auto s = parse_strategy(*raw.search)) cfg.search = *s;
    else errors.push_back("unknown search strategy '" + *raw.search + "'; valid: none, grid, random, bayes");
  }
  if (raw.trials) {
    if (*raw.trials < 1) errors.push_back("trials must be at least 1");
    else cfg.trials = static_cast<int>(*raw.trials);
  }
  if (cfg.search == SearchStrategy::Bayes && cfg.trials < 6) {
    errors.push_back("bayes search needs at least 6 trials");
  }
  if (raw.test_fraction) {
    if (!(*raw.test_fraction > 0.0 && *raw.test_fraction < 1.0)) {
      errors.push_back("test_fraction must lie in (0, 1), got " + detail::format_number(*raw.test_fraction));
    } else {
      cfg.test_fraction = *raw.test_fraction;
    }
  }
  if (raw.smote_k) {
    if (*raw.smote_k < 1) errors.push_back("smote_k must be at least 1");
    else cfg.smote_k = static_cast<int>(*raw.smote_k);
  }
  if (raw.folds) {
    if (*raw.folds < 2) errors.push_back("folds must be at least 2");
    else cfg.folds = static_cast<int>(*raw.folds);
  }
  if (raw.seed) {
    if (*raw.seed < 0) errors.push_back("seed must be non-negative");
    else cfg.seed = static_cast<std::uint64_t>(*raw.seed);
  }
  if (raw.mode) {
    if (auto m = parse_mode(*raw.mode)) cfg.mode = *m;
    else errors.push_back("unknown mode '" + *raw.mode + "'; valid: paper-faithful, sound");
  }
  if (raw.features) {
    const auto& f = *raw.features;
    if (f.empty()) {
      errors.push_back("features list is empty");
    } else if (f.size() == 1 && detail::fold_name(f[0]) == "auto") {
      cfg.feature_policy = FeaturePolicy::Auto;
    } else if (f.size() == 1 && detail::fold_name(f[0]) == "all") {
      cfg.feature_policy = FeaturePolicy::All;
    } else {
      cfg.feature_policy = FeaturePolicy::Explicit;
      cfg.feature_names = f;
    }
  }
  if (raw.out_dir) {
    if (raw.out_dir->empty()) errors.push_back("output directory is empty");
    else cfg.out_dir = *raw.out_dir;
  }
  if (raw.formats) {
    cfg.formats.clear();
    if (raw.formats->empty()) errors.push_back("no report formats selected");
    for (const auto& f : *raw.formats) {
      try {
        const auto fmt = parse_report_format(f);
        if (std::find(cfg.formats.begin(), cfg.formats.end(), fmt) == cfg.formats.end()) cfg.formats.push_back(fmt);
      } catch (const ConfigError& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (raw.threads) {
    if (*raw.threads < 0) errors.push_back("threads must be non-negative");
    else cfg.threads = static_cast<unsigned>(*raw.threads);
  }
  cfg.label_column = raw.label_column;
  cfg.positive_label = raw.positive_label;

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

inline ExperimentConfig require_valid(const RawConfig& raw) {
  auto r = validate_config(raw);
  if (!r.ok()) throw ConfigError(r.message());
  return *r.config;
}

namespace detail {

inline std::vector<std::string> toml_strings(const toml::node& node, const std::string& key,
                                             std::vector<std::string>& errors) {
  std::vector<std::string> out;
  if (auto s = node.value<std::string>()) {
    out.push_back(*s);
  } else if (const auto* arr = node.as_array()) {
    for (const auto& item : *arr) {
      if (auto s = item.value<std::string>()) out.push_back(*s);
      else errors.push_back("'" + key + "' entries must be strings");
    }
  } else {
    errors.push_back("'" + key + "' must be a string or an array of strings");
  }
  return out;
}

}  // namespace detail

// Reads a TOML experiment file. Relative dataset paths are resolved against
// the file's directory. Unknown keys are errors.
inline RawConfig parse_config_toml(std::string_view text, const std::filesystem::path& source) {
  toml::table doc;
  try {
    doc = toml::parse(text, source.string());
  } catch (const toml::parse_error& e) {
    const auto line = static_cast<std::size_t>(e.source().begin.line);
    throw ConfigError(source.string() + ":" + std::to_string(line) + ": " + std::string(e.description()));
  }
  RawConfig raw;
  std::vector<std::string> errors;
  const auto base = source.parent_path();

  auto get_int = [&](const toml::node& n, const std::string& key) -> std::optional<long long> {
    if (auto v = n.value_exact<int64_t>()) return *v;
    errors.push_back("'" + key + "' must be an integer");
    return std::nullopt;
  };
  auto get_string = [&](const toml::node& n, const std::string& key) -> std::optional<std::string> {
    if (auto v = n.value_exact<std::string>()) return *v;
    errors.push_back("'" + key + "' must be a string");
    return std::nullopt;
  };

  for (const auto& [k, node] : doc) {
    const std::string key(k.str());
    if (key == "datasets") {
      const auto* table = node.as_table();
      if (!table) {
        errors.push_back("'datasets' must be a table of smell = path");
        continue;
      }
      for (const auto& [smell, path] : *table) {
        if (auto p = path.value_exact<std::string>()) {
          std::filesystem::path fp(*p);
          if (fp.is_relative() && !base.empty()) fp = base / fp;
          raw.datasets[std::string(smell.str())] = fp.lexically_normal().string();
        } else {
          errors.push_back("dataset path for '" + std::string(smell.str()) + "' must be a string");
        }
      }
    } else if (key == "output") {
      const auto* table = node.as_table();
      if (!table) {
        errors.push_back("'output' must be a table");
        continue;
      }
      for (const auto& [ok, on] : *table) {
        const std::string okey(ok.str());
        if (okey == "dir") raw.out_dir = get_string(on, "output.dir");
        else if (okey == "formats") raw.formats = detail::toml_strings(on, "output.formats", errors);
        else errors.push_back("unknown key 'output." + okey + "'");
      }
    } else if (key == "smells") {
      raw.smells = detail::toml_strings(node, key, errors);
    } else if (key == "models") {
      raw.models = detail::toml_strings(node, key, errors);
    } else if (key == "features") {
      raw.features = detail::toml_strings(node, key, errors);
    } else if (key == "search") {
      raw.search = get_string(node, key);
    } else if (key == "mode") {
      raw.mode = get_string(node, key);
    } else if (key == "label_column") {
      raw.label_column = get_string(node, key);
    } else if (key == "positive_label") {
      raw.positive_label = get_string(node, key);
    } else if (key == "trials") {
      raw.trials = get_int(node, key);
    } else if (key == "smote_k") {
      raw.smote_k = get_int(node, key);
    } else if (key == "folds") {
      raw.folds = get_int(node, key);
    } else if (key == "seed") {
      raw.seed = get_int(node, key);
    } else if (key == "threads") {
      raw.threads = get_int(node, key);
    } else if (key == "test_fraction") {
      if (auto v = node.value<double>()) raw.test_fraction = *v;
      else errors.push_back("'test_fraction' must be a number");
    } else {
      errors.push_back("unknown key '" + key + "'");
    }
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + source.string() + ": " + e;
    throw ConfigError(msg);
  }
  return raw;
}

inline RawConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config_toml(text, path);
}

}  // namespace smelldetect
