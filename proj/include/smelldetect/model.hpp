#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/boosting.hpp"
#include "smelldetect/dataset.hpp"
#include "smelldetect/ensemble.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/hyperparameters.hpp"
#include "smelldetect/knn.hpp"
#include "smelldetect/naive_bayes.hpp"
#include "smelldetect/svm.hpp"

namespace smelldetect {

struct ModelSpec {
  ModelKind kind = ModelKind::DT;
  Hyperparameters params;
};

// Defaults used when a parameter is not given (scikit-learn / XGBoost style).
inline Hyperparameters default_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::KNN: return {{"n_neighbors", 5}, {"p", 2}, {"weights", "uniform"}};
    case ModelKind::NB: return {{"var_smoothing", 1e-9}};
    case ModelKind::XGB:
      return {{"colsample_bytree", 1.0}, {"learning_rate", 0.3}, {"max_depth", 6}, {"n_estimators", 100}};
    case ModelKind::AdaBoost: return {{"algorithm", "SAMME"}, {"learning_rate", 1.0}, {"n_estimators", 50}};
    case ModelKind::RF:
      return {{"bootstrap", true},         {"max_depth", ParamValue::none()}, {"max_features", "sqrt"},
              {"min_samples_leaf", 1},     {"min_samples_split", 2},          {"n_estimators", 100}};
    case ModelKind::GB: return {{"learning_rate", 0.1}, {"max_depth", 3}, {"n_estimators", 100}};
    case ModelKind::DT:
      return {{"max_depth", ParamValue::none()},
              {"max_features", ParamValue::none()},
              {"min_samples_leaf", 1},
              {"min_samples_split", 2}};
    case ModelKind::SVM: return {{"C", 1.0}, {"gamma", "scale"}, {"kernel", "rbf"}};
  }
  return {};
}

namespace detail {

inline void require(bool ok, ModelKind kind, const std::string& name, const ParamValue& v,
                    const std::string& domain) {
  if (!ok) {
    throw ConfigError(std::string(to_string(kind)) + ": " + name + "=" + v.to_string() + " outside " + domain);
  }
}

inline bool positive_int(const ParamValue& v) { return v.is_number() && v.is_integral_number() && v.as_double() >= 1; }
inline bool positive_real(const ParamValue& v) { return v.is_number() && v.as_double() > 0.0; }

inline void check_param(ModelKind kind, const std::string& name, const ParamValue& v) {
  if (name == "n_estimators" || name == "n_neighbors") {
    require(positive_int(v), kind, name, v, "positive integers");
  } else if (name == "learning_rate" || name == "var_smoothing" || name == "C") {
    require(positive_real(v), kind, name, v, "positive reals");
  } else if (name == "max_depth") {
    require(v.is_none() || positive_int(v), kind, name, v, "positive integers or None");
  } else if (name == "colsample_bytree") {
    require(v.is_number() && v.as_double() > 0.0 && v.as_double() <= 1.0, kind, name, v, "(0, 1]");
  } else if (name == "min_samples_split") {
    require(v.is_number() && v.is_integral_number() && v.as_double() >= 2, kind, name, v, "integers >= 2");
  } else if (name == "min_samples_leaf") {
    require(positive_int(v), kind, name, v, "integers >= 1");
  } else if (name == "bootstrap") {
    require(v.is_bool(), kind, name, v, "{True, False}");
  } else if (name == "max_features") {
    require(v.is_none() || (v.is_string() && (v.as_string() == "sqrt" || v.as_string() == "log2")), kind,
            name, v, "{None, sqrt, log2}");
  } else if (name == "algorithm") {
    require(v.is_string() && v.as_string() == "SAMME", kind, name, v, "{SAMME}");
  } else if (name == "p") {
    require(v.is_number() && (v.as_double() == 1.0 || v.as_double() == 2.0), kind, name, v, "{1, 2}");
  } else if (name == "weights") {
    require(v.is_string() && (v.as_string() == "uniform" || v.as_string() == "distance"), kind, name, v,
            "{uniform, distance}");
  } else if (name == "gamma") {
    require((v.is_string() && v.as_string() == "scale") || positive_real(v), kind, name, v,
            "{scale} or positive reals");
  } else if (name == "kernel") {
    require(v.is_string() && (v.as_string() == "linear" || v.as_string() == "rbf"), kind, name, v,
            "{linear, rbf}");
  }
}

inline std::optional<int> optional_depth(const ParamValue& v) {
  if (v.is_none()) return std::nullopt;
  return static_cast<int>(v.as_int());
}

}  // namespace detail

// Fills defaults and validates names and domains for the given kind.
inline Hyperparameters resolve_params(ModelKind kind, const Hyperparameters& given) {
  Hyperparameters out = default_params(kind);
  for (const auto& [name, value] : given) {
    if (!out.contains(name)) {
      std::string valid;
      for (const auto& [k, _] : out) valid += (valid.empty() ? "" : ", ") + k;
      throw ConfigError(std::string(to_string(kind)) + ": unknown hyperparameter '" + name + "' (valid: " +
                        valid + ")");
    }
    detail::check_param(kind, name, value);
    out.set(name, value);
  }
  return out;
}

inline KnnParams knn_params(const Hyperparameters& hp) {
  return {static_cast<int>(hp.at("n_neighbors").as_int()), static_cast<int>(hp.at("p").as_int()),
          hp.at("weights").as_string() == "distance"};
}

inline NaiveBayesParams nb_params(const Hyperparameters& hp) { return {hp.at("var_smoothing").as_double()}; }

inline CartParams cart_params(const Hyperparameters& hp) {
  const auto& mf = hp.at("max_features");
  return {detail::optional_depth(hp.at("max_depth")),
          mf.is_none() ? MaxFeatures::All : max_features_from_string(mf.as_string()),
          static_cast<int>(hp.at("min_samples_split").as_int()),
          static_cast<int>(hp.at("min_samples_leaf").as_int())};
}

inline ForestParams forest_params(const Hyperparameters& hp) {
  return {static_cast<int>(hp.at("n_estimators").as_int()), cart_params(hp), hp.at("bootstrap").as_bool()};
}

inline AdaBoostParams adaboost_params(const Hyperparameters& hp) {
  return {static_cast<int>(hp.at("n_estimators").as_int()), hp.at("learning_rate").as_double()};
}

inline GradientBoostingParams gb_params(const Hyperparameters& hp) {
  return {static_cast<int>(hp.at("n_estimators").as_int()), hp.at("learning_rate").as_double(),
          static_cast<int>(hp.at("max_depth").as_int())};
}

inline XgbParams xgb_params(const Hyperparameters& hp) {
  XgbParams p;
  p.n_estimators = static_cast<int>(hp.at("n_estimators").as_int());
  p.learning_rate = hp.at("learning_rate").as_double();
  p.max_depth = static_cast<int>(hp.at("max_depth").as_int());
  p.colsample_bytree = hp.at("colsample_bytree").as_double();
  return p;
}

inline SvmParams svm_params(const Hyperparameters& hp) {
  SvmParams p;
  p.C = hp.at("C").as_double();
  const auto& g = hp.at("gamma");
  if (g.is_number()) p.gamma = g.as_double();
  p.kernel = hp.at("kernel").as_string() == "linear" ? KernelKind::Linear : KernelKind::Rbf;
  return p;
}

// A fitted, immutable binary classifier.
class TrainedModel {
 public:
  using State = std::variant<KnnModel, GaussianNbModel, ScoreEnsembleModel, AdaBoostModel, RandomForestModel,
                             DecisionTreeModel, SvmModel>;

  TrainedModel(ModelKind kind, Hyperparameters params, std::size_t feature_count, std::uint64_t seed,
               std::vector<std::string> feature_names, State state)
      : kind_(kind),
        params_(std::move(params)),
        feature_count_(feature_count),
        seed_(seed),
        feature_names_(std::move(feature_names)),
        state_(std::move(state)) {}

  ModelKind kind() const { return kind_; }
  const Hyperparameters& params() const { return params_; }
  std::size_t feature_count() const { return feature_count_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const State& state() const { return state_; }

  int predict_one(std::span<const double> x) const {
    if (x.size() != feature_count_) {
      throw DataError("model expects " + std::to_string(feature_count_) + " features, got " +
                      std::to_string(x.size()));
    }
    return std::visit([&](const auto& m) { return m.predict(x); }, state_);
  }

  nlohmann::json to_json() const {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : params_) {
      if (v.is_none()) params[k] = nullptr;
      else if (v.is_bool()) params[k] = v.as_bool();
      else if (v.is_int()) params[k] = v.as_int();
      else if (v.is_double()) params[k] = v.as_double();
      else params[k] = v.as_string();
    }
    return {{"format", "smelldetect-model/1"},
            {"kind", std::string(to_string(kind_))},
            {"params", params},
            {"seed", seed_},
            {"feature_count", feature_count_},
            {"feature_names", feature_names_},
            {"state", std::visit([](const auto& m) { return m.to_json(); }, state_)}};
  }

  static TrainedModel from_json(const nlohmann::json& j) {
    auto kind = parse_model(j.at("kind").get<std::string>());
    if (!kind) throw DataError("unknown model kind in model file");
    Hyperparameters params;
    for (const auto& [k, v] : j.at("params").items()) {
      if (v.is_null()) params.set(k, ParamValue::none());
      else if (v.is_boolean()) params.set(k, v.get<bool>());
      else if (v.is_number_integer()) params.set(k, v.get<std::int64_t>());
      else if (v.is_number()) params.set(k, v.get<double>());
      else params.set(k, v.get<std::string>());
    }
    const auto& s = j.at("state");
    State state = [&]() -> State {
      switch (*kind) {
        case ModelKind::KNN: return KnnModel::from_json(s);
        case ModelKind::NB: return GaussianNbModel::from_json(s);
        case ModelKind::XGB:
        case ModelKind::GB: return ScoreEnsembleModel::from_json(s);
        case ModelKind::AdaBoost: return AdaBoostModel::from_json(s);
        case ModelKind::RF: return RandomForestModel::from_json(s);
        case ModelKind::DT: return DecisionTreeModel::from_json(s);
        case ModelKind::SVM: return SvmModel::from_json(s);
      }
      throw DataError("unknown model kind");
    }();
    return TrainedModel(*kind, std::move(params), j.at("feature_count").get<std::size_t>(),
                        j.at("seed").get<std::uint64_t>(), j.at("feature_names").get<std::vector<std::string>>(),
                        std::move(state));
  }

 private:
  ModelKind kind_;
  Hyperparameters params_;
  std::size_t feature_count_;
  std::uint64_t seed_;
  std::vector<std::string> feature_names_;
  State state_;
};

// Trains `kind` on `train`. Every fit is deterministic in (train, params, seed).
inline TrainedModel fit_model(ModelKind kind, const Hyperparameters& given, const LabeledDataset& train,
                              std::uint64_t seed = 0, BoostingTrace* trace = nullptr) {
  const auto hp = resolve_params(kind, given);
  auto state = [&]() -> TrainedModel::State {
    switch (kind) {
      case ModelKind::KNN: return fit_knn(train, knn_params(hp));
      case ModelKind::NB: return fit_gaussian_nb(train, nb_params(hp));
      case ModelKind::XGB: return fit_xgb(train, xgb_params(hp), seed, trace);
      case ModelKind::AdaBoost: return fit_adaboost(train, adaboost_params(hp), trace);
      case ModelKind::RF: return fit_random_forest(train, forest_params(hp), seed);
      case ModelKind::GB: return fit_gradient_boosting(train, gb_params(hp), trace);
      case ModelKind::DT: return fit_decision_tree(train, cart_params(hp), seed);
      case ModelKind::SVM: return fit_svm(train, svm_params(hp));
    }
    throw ConfigError("unknown model kind");
  }();
  return TrainedModel(kind, hp, train.cols(), seed, train.schema().feature_names, std::move(state));
}

inline TrainedModel fit_model(const ModelSpec& spec, const LabeledDataset& train, std::uint64_t seed = 0) {
  return fit_model(spec.kind, spec.params, train, seed);
}

// One label per row. An empty matrix yields an empty result.
inline std::vector<int> predict(const TrainedModel& model, const Matrix& rows) {
  std::vector<int> out;
  if (rows.rows() == 0) return out;
  if (rows.cols() != model.feature_count()) {
    throw DataError("model expects " + std::to_string(model.feature_count()) + " features, got " +
                    std::to_string(rows.cols()));
  }
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(model.predict_one(rows.row(r)));
  return out;
}

inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << model.to_json().dump(1) << '\n';
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return TrainedModel::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed model file: " + e.what());
  }
}

}  // namespace smelldetect
