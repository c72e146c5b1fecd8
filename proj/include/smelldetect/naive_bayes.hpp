#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

struct NaiveBayesParams {
  double var_smoothing = 1e-9;
};

class GaussianNbModel {
 public:
  GaussianNbModel() = default;
  GaussianNbModel(std::array<std::vector<double>, 2> means, std::array<std::vector<double>, 2> vars,
                  std::array<double, 2> log_prior)
      : means_(std::move(means)), vars_(std::move(vars)), log_prior_(log_prior) {}

  double joint_log_likelihood(std::span<const double> x, int c) const {
    double s = log_prior_[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = vars_[c][j];
      const double d = x[j] - means_[c][j];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + d * d / v);
    }
    return s;
  }

  int predict(std::span<const double> x) const {
    return joint_log_likelihood(x, 1) > joint_log_likelihood(x, 0) ? 1 : 0;
  }

  const std::array<std::vector<double>, 2>& means() const { return means_; }
  const std::array<std::vector<double>, 2>& variances() const { return vars_; }

  nlohmann::json to_json() const {
    return {{"means", {means_[0], means_[1]}},
            {"variances", {vars_[0], vars_[1]}},
            {"log_prior", {log_prior_[0], log_prior_[1]}}};
  }

  static GaussianNbModel from_json(const nlohmann::json& j) {
    const auto& m = j.at("means");
    const auto& v = j.at("variances");
    const auto& p = j.at("log_prior");
    return GaussianNbModel({m.at(0).get<std::vector<double>>(), m.at(1).get<std::vector<double>>()},
                           {v.at(0).get<std::vector<double>>(), v.at(1).get<std::vector<double>>()},
                           {p.at(0).get<double>(), p.at(1).get<double>()});
  }

 private:
  std::array<std::vector<double>, 2> means_;
  std::array<std::vector<double>, 2> vars_;
  std::array<double, 2> log_prior_{};
};

// Gaussian naive Bayes. Every per-class variance is increased by
// var_smoothing * (largest per-feature variance of the whole training set);
// if all features are constant that scale is taken as 1.
inline GaussianNbModel fit_gaussian_nb(const LabeledDataset& train, const NaiveBayesParams& params) {
  if (!(params.var_smoothing > 0.0)) throw ConfigError("var_smoothing must be positive");
  const auto counts = class_counts(train);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("naive Bayes needs both classes in the training set");
  }
  const std::size_t d = train.cols();
  const auto& x = train.features();
  const auto& y = train.labels();

  auto moments = [&](auto&& include, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(d, 0.0);
    var.assign(d, 0.0);
    double n = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (!include(r)) continue;
      n += 1.0;
      for (std::size_t j = 0; j < d; ++j) mean[j] += x(r, j);
    }
    for (auto& m : mean) m /= n;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (!include(r)) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double t = x(r, j) - mean[j];
        var[j] += t * t;
      }
    }
    for (auto& v : var) v /= n;
  };

  std::vector<double> all_mean;
  std::vector<double> all_var;
  moments([](std::size_t) { return true; }, all_mean, all_var);
  const double max_var = all_var.empty() ? 0.0 : *std::max_element(all_var.begin(), all_var.end());
  const double epsilon = params.var_smoothing * (max_var > 0.0 ? max_var : 1.0);

  std::array<std::vector<double>, 2> means;
  std::array<std::vector<double>, 2> vars;
  for (int c = 0; c < 2; ++c) {
    moments([&](std::size_t r) { return y[r] == c; }, means[c], vars[c]);
    for (auto& v : vars[c]) v += epsilon;
  }
  const double n = static_cast<double>(train.rows());
  return GaussianNbModel(std::move(means), std::move(vars),
                         {std::log(static_cast<double>(counts.negatives) / n),
                          std::log(static_cast<double>(counts.positives) / n)});
}

}  // namespace smelldetect
