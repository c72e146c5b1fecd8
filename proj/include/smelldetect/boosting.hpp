#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/ensemble.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/rng.hpp"
#include "smelldetect/tree.hpp"

namespace smelldetect {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean binomial deviance / 2, i.e. mean log-loss of scores against 0/1 labels.
inline double mean_log_loss(std::span<const double> scores, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = y[i] == 1 ? scores[i] : -scores[i];
    s += std::log1p(std::exp(-std::abs(z))) + std::max(-z, 0.0);
  }
  return s / static_cast<double>(scores.size());
}

inline double prior_log_odds(const LabeledDataset& train) {
  const auto counts = class_counts(train);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("boosting needs both classes in the training set (log-odds undefined)");
  }
  return std::log(static_cast<double>(counts.positives) / static_cast<double>(counts.negatives));
}

// Additive score model F(x) = F0 + learning_rate * sum_t tree_t(x); predicts 1 iff F(x) > 0.
class ScoreEnsembleModel {
 public:
  ScoreEnsembleModel() = default;
  ScoreEnsembleModel(double initial, double learning_rate, std::vector<Tree> trees)
      : initial_(initial), learning_rate_(learning_rate), trees_(std::move(trees)) {}

  double score(std::span<const double> x) const {
    double f = initial_;
    for (const auto& t : trees_) f += learning_rate_ * t.evaluate(x);
    return f;
  }
  int predict(std::span<const double> x) const { return score(x) > 0.0 ? 1 : 0; }

  double initial_score() const { return initial_; }
  const std::vector<Tree>& trees() const { return trees_; }

  nlohmann::json to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"initial_score", initial_}, {"learning_rate", learning_rate_}, {"trees", trees}};
  }
  static ScoreEnsembleModel from_json(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    return ScoreEnsembleModel(j.at("initial_score").get<double>(), j.at("learning_rate").get<double>(),
                              std::move(trees));
  }

 private:
  double initial_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<Tree> trees_;
};

struct GradientBoostingParams {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
};

// Binomial-deviance gradient boosting. Each round fits a least-squares tree to
// the residuals y - p, then sets every leaf to one Newton step
// sum(y - p) / sum(p (1 - p)) over the rows in that leaf.
inline ScoreEnsembleModel fit_gradient_boosting(const LabeledDataset& train,
                                                const GradientBoostingParams& params,
                                                BoostingTrace* trace = nullptr) {
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  if (!(params.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (params.max_depth < 1) throw ConfigError("max_depth must be positive");
  const double f0 = prior_log_odds(train);
  const auto& x = train.features();
  const auto sorted = presort_columns(x);
  const auto& y = train.labels();
  const std::size_t n = train.rows();
  std::vector<double> f(n, f0);
  std::vector<double> p(n);
  std::vector<double> grad(n);
  const std::vector<double> unit(n, 1.0);
  std::vector<std::size_t> columns(x.cols());
  std::iota(columns.begin(), columns.end(), std::size_t{0});
  const GradientTreeParams tree_params{params.max_depth, 0.0, 0.0};
  if (trace) trace->losses.push_back(mean_log_loss(f, y));

  std::vector<Tree> trees;
  for (int m = 0; m < params.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(f[i]);
      grad[i] = p[i] - y[i];
    }
    auto newton_leaf = [&](std::span<const std::size_t> rows) {
      double num = 0.0;
      double den = 0.0;
      for (auto i : rows) {
        num += y[i] - p[i];
        den += p[i] * (1.0 - p[i]);
      }
      return std::abs(den) < 1e-150 ? 0.0 : num / den;
    };
    Tree tree = fit_gradient_tree(x, grad, unit, columns, tree_params, newton_leaf, sorted);
    for (std::size_t i = 0; i < n; ++i) f[i] += params.learning_rate * tree.evaluate(x.row(i));
    trees.push_back(std::move(tree));
    if (trace) trace->losses.push_back(mean_log_loss(f, y));
  }
  return ScoreEnsembleModel(f0, params.learning_rate, std::move(trees));
}

struct XgbParams {
  int n_estimators = 100;
  double learning_rate = 0.3;
  int max_depth = 6;
  double colsample_bytree = 1.0;
  double lambda = 1.0;
  double gamma = 0.0;
};

inline std::size_t xgb_columns_per_tree(double colsample, std::size_t d) {
  const auto k = static_cast<std::size_t>(std::ceil(colsample * static_cast<double>(d) - 1e-9));
  return std::clamp<std::size_t>(k, 1, d);
}

// Second-order boosting on logistic loss with gradient g = p - y and hessian
// h = p (1 - p). Leaf weight -G / (H + lambda); each tree sees a seeded subset
// of ceil(colsample_bytree * d) columns.
inline ScoreEnsembleModel fit_xgb(const LabeledDataset& train, const XgbParams& params, std::uint64_t seed,
                                  BoostingTrace* trace = nullptr) {
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  if (!(params.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (params.max_depth < 1) throw ConfigError("max_depth must be positive");
  if (!(params.colsample_bytree > 0.0 && params.colsample_bytree <= 1.0)) {
    throw ConfigError("colsample_bytree must lie in (0, 1]");
  }
  const double f0 = prior_log_odds(train);
  const auto& x = train.features();
  const auto sorted = presort_columns(x);
  const auto& y = train.labels();
  const std::size_t n = train.rows();
  std::vector<double> f(n, f0);
  std::vector<double> g(n);
  std::vector<double> h(n);
  const GradientTreeParams tree_params{params.max_depth, params.lambda, params.gamma};
  const std::size_t per_tree = xgb_columns_per_tree(params.colsample_bytree, x.cols());
  auto rng = make_rng(seed);
  if (trace) trace->losses.push_back(mean_log_loss(f, y));

  std::vector<Tree> trees;
  for (int m = 0; m < params.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(f[i]);
      g[i] = p - y[i];
      h[i] = p * (1.0 - p);
    }
    const auto columns = detail::sample_columns(x.cols(), per_tree, rng);
    auto leaf = [&](std::span<const std::size_t> rows) {
      double gs = 0.0;
      double hs = 0.0;
      for (auto i : rows) {
        gs += g[i];
        hs += h[i];
      }
      return -gs / (hs + params.lambda);
    };
    Tree tree = fit_gradient_tree(x, g, h, columns, tree_params, leaf, sorted);
    for (std::size_t i = 0; i < n; ++i) f[i] += params.learning_rate * tree.evaluate(x.row(i));
    trees.push_back(std::move(tree));
    if (trace) trace->losses.push_back(mean_log_loss(f, y));
  }
  return ScoreEnsembleModel(f0, params.learning_rate, std::move(trees));
}

}  // namespace smelldetect
