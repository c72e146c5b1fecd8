#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/rng.hpp"
#include "smelldetect/tree.hpp"

namespace smelldetect {

inline std::string to_string(MaxFeatures m) {
  switch (m) {
    case MaxFeatures::All: return "None";
    case MaxFeatures::Sqrt: return "sqrt";
    case MaxFeatures::Log2: return "log2";
  }
  return "None";
}

inline MaxFeatures max_features_from_string(const std::string& s) {
  if (s == "sqrt") return MaxFeatures::Sqrt;
  if (s == "log2") return MaxFeatures::Log2;
  if (s == "None" || s == "none" || s.empty()) return MaxFeatures::All;
  throw ConfigError("max_features must be None, sqrt or log2, got '" + s + "'");
}

namespace detail {

inline nlohmann::json cart_params_json(const CartParams& p) {
  return {{"max_depth", p.max_depth ? nlohmann::json(*p.max_depth) : nlohmann::json(nullptr)},
          {"max_features", to_string(p.max_features)},
          {"min_samples_split", p.min_samples_split},
          {"min_samples_leaf", p.min_samples_leaf}};
}

inline void validate_cart_params(const CartParams& p) {
  if (p.max_depth && *p.max_depth < 1) throw ConfigError("max_depth must be positive or None");
  if (p.min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
  if (p.min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
}

}  // namespace detail

class DecisionTreeModel {
 public:
  DecisionTreeModel() = default;
  explicit DecisionTreeModel(Tree tree) : tree_(std::move(tree)) {}

  int predict(std::span<const double> x) const { return tree_.evaluate(x) > 0.5 ? 1 : 0; }
  const Tree& tree() const { return tree_; }

  nlohmann::json to_json() const { return {{"tree", tree_.to_json()}}; }
  static DecisionTreeModel from_json(const nlohmann::json& j) {
    return DecisionTreeModel(Tree::from_json(j.at("tree")));
  }

 private:
  Tree tree_;
};

inline DecisionTreeModel fit_decision_tree(const LabeledDataset& train, const CartParams& params,
                                           std::uint64_t seed) {
  detail::validate_cart_params(params);
  if (train.empty()) throw DataError("decision tree needs a non-empty training set");
  auto rng = make_rng(seed);
  return DecisionTreeModel(fit_cart(train.features(), train.labels(), params, rng));
}

struct ForestParams {
  int n_estimators = 100;
  CartParams tree{std::nullopt, MaxFeatures::Sqrt, 2, 1};
  bool bootstrap = true;
};

// Majority vote of CART trees; tree t uses generator seed + t, first for its
// bootstrap sample (when enabled) and then for per-node column sampling.
class RandomForestModel {
 public:
  RandomForestModel() = default;
  explicit RandomForestModel(std::vector<Tree> trees) : trees_(std::move(trees)) {}

  int predict(std::span<const double> x) const {
    std::size_t ones = 0;
    for (const auto& t : trees_) ones += t.evaluate(x) > 0.5 ? 1 : 0;
    return 2 * ones > trees_.size() ? 1 : 0;
  }
  const std::vector<Tree>& trees() const { return trees_; }

  nlohmann::json to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}};
  }
  static RandomForestModel from_json(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    return RandomForestModel(std::move(trees));
  }

 private:
  std::vector<Tree> trees_;
};

inline RandomForestModel fit_random_forest(const LabeledDataset& train, const ForestParams& params,
                                           std::uint64_t seed) {
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  detail::validate_cart_params(params.tree);
  if (train.empty()) throw DataError("random forest needs a non-empty training set");
  const std::size_t n = train.rows();
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_estimators));
  for (int t = 0; t < params.n_estimators; ++t) {
    auto rng = make_rng(seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> samples(n);
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<std::size_t>(uniform_index(rng, n));
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    trees.push_back(fit_cart(train.features(), train.labels(), {}, std::move(samples), params.tree, rng));
  }
  return RandomForestModel(std::move(trees));
}

struct AdaBoostParams {
  int n_estimators = 50;
  double learning_rate = 1.0;
};

// SAMME stage weight for K classes.
inline double samme_stage_weight(double error, double learning_rate, int classes = 2) {
  return learning_rate * (std::log((1.0 - error) / error) + std::log(classes - 1.0));
}

// Error used in place of a zero weighted error, capping the stage weight.
inline constexpr double kSammeErrorFloor = 1e-10;

struct BoostingTrace {
  std::vector<double> weight_sums;   // AdaBoost: sum of instance weights after each round
  std::vector<double> stage_errors;  // AdaBoost: weighted error of each accepted round
  std::vector<double> losses;        // GB/XGB: mean training log-loss, initial score first
};

class AdaBoostModel {
 public:
  struct Stage {
    Tree stump;
    double alpha = 0.0;
  };

  AdaBoostModel() = default;
  AdaBoostModel(std::vector<Stage> stages, int fallback) : stages_(std::move(stages)), fallback_(fallback) {}

  int predict(std::span<const double> x) const {
    if (stages_.empty()) return fallback_;
    double votes[2] = {0.0, 0.0};
    for (const auto& s : stages_) votes[s.stump.evaluate(x) > 0.5 ? 1 : 0] += s.alpha;
    return votes[1] > votes[0] ? 1 : 0;
  }
  const std::vector<Stage>& stages() const { return stages_; }

  nlohmann::json to_json() const {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : stages_) stages.push_back({{"alpha", s.alpha}, {"stump", s.stump.to_json()}});
    return {{"stages", stages}, {"fallback", fallback_}};
  }
  static AdaBoostModel from_json(const nlohmann::json& j) {
    std::vector<Stage> stages;
    for (const auto& s : j.at("stages")) {
      stages.push_back({Tree::from_json(s.at("stump")), s.at("alpha").get<double>()});
    }
    return AdaBoostModel(std::move(stages), j.at("fallback").get<int>());
  }

 private:
  std::vector<Stage> stages_;
  int fallback_ = 0;
};

// SAMME (K = 2) over weighted depth-1 Gini stumps. A round with zero error is
// kept with the capped stage weight and ends training; a round with error at
// or above 1 - 1/K is discarded and ends training.
inline AdaBoostModel fit_adaboost(const LabeledDataset& train, const AdaBoostParams& params,
                                  BoostingTrace* trace = nullptr) {
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  if (!(params.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  const auto counts = class_counts(train);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("AdaBoost needs both classes in the training set");
  }
  const auto& x = train.features();
  const auto& y = train.labels();
  const std::size_t n = train.rows();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const CartParams stump_params{1, MaxFeatures::All, 2, 1};
  auto rng = make_rng(0);
  std::vector<AdaBoostModel::Stage> stages;
  std::vector<int> pred(n);
  constexpr int kClasses = 2;
  for (int m = 0; m < params.n_estimators; ++m) {
    Tree stump = fit_cart(x, y, w, all, stump_params, rng);
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = stump.evaluate(x.row(i)) > 0.5 ? 1 : 0;
      total += w[i];
      if (pred[i] != y[i]) err += w[i];
    }
    err /= total;
    if (err <= 0.0) {
      stages.push_back({std::move(stump), samme_stage_weight(kSammeErrorFloor, params.learning_rate, kClasses)});
      if (trace) trace->stage_errors.push_back(err);
      break;
    }
    if (err >= 1.0 - 1.0 / kClasses) break;
    const double alpha = samme_stage_weight(err, params.learning_rate, kClasses);
    stages.push_back({std::move(stump), alpha});
    const double boost = std::exp(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] != y[i]) w[i] *= boost;
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;
    if (trace) {
      trace->stage_errors.push_back(err);
      double s = 0.0;
      for (double wi : w) s += wi;
      trace->weight_sums.push_back(s);
    }
  }
  const int fallback = counts.positives > counts.negatives ? 1 : 0;
  return AdaBoostModel(std::move(stages), fallback);
}

}  // namespace smelldetect
