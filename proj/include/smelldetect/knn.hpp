#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

struct KnnParams {
  int n_neighbors = 5;
  int p = 2;                      // Minkowski order, 1 or 2
  bool distance_weighted = false;  // weights=distance
};

inline double minkowski_distance(std::span<const double> a, std::span<const double> b, int p) {
  double s = 0.0;
  if (p == 1) {
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Lazy learner: keeps the training rows. Neighbours at equal distance are
// ranked by training row order; vote ties go to label 0. With distance
// weights, neighbours at distance zero outvote all others.
class KnnModel {
 public:
  KnnModel() = default;
  KnnModel(Matrix x, std::vector<int> y, KnnParams params)
      : x_(std::move(x)), y_(std::move(y)), params_(params) {}

  int predict(std::span<const double> query) const {
    std::vector<std::pair<double, std::size_t>> dist(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      dist[i] = {minkowski_distance(query, x_.row(i), params_.p), i};
    }
    const auto k = static_cast<std::size_t>(params_.n_neighbors);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double votes[2] = {0.0, 0.0};
    if (!params_.distance_weighted) {
      for (std::size_t j = 0; j < k; ++j) votes[y_[dist[j].second]] += 1.0;
    } else if (dist.front().first == 0.0) {
      for (std::size_t j = 0; j < k && dist[j].first == 0.0; ++j) votes[y_[dist[j].second]] += 1.0;
    } else {
      for (std::size_t j = 0; j < k; ++j) votes[y_[dist[j].second]] += 1.0 / dist[j].first;
    }
    return votes[1] > votes[0] ? 1 : 0;
  }

  const KnnParams& params() const { return params_; }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      rows.push_back(std::vector<double>(x_.row(i).begin(), x_.row(i).end()));
    }
    return {{"n_neighbors", params_.n_neighbors},
            {"p", params_.p},
            {"distance_weighted", params_.distance_weighted},
            {"rows", rows},
            {"labels", y_}};
  }

  static KnnModel from_json(const nlohmann::json& j) {
    KnnParams p{j.at("n_neighbors").get<int>(), j.at("p").get<int>(),
                j.at("distance_weighted").get<bool>()};
    return KnnModel(Matrix::from_rows(j.at("rows").get<std::vector<std::vector<double>>>()),
                    j.at("labels").get<std::vector<int>>(), p);
  }

 private:
  Matrix x_;
  std::vector<int> y_;
  KnnParams params_;
};

inline KnnModel fit_knn(const LabeledDataset& train, const KnnParams& params) {
  if (params.n_neighbors < 1) throw ConfigError("n_neighbors must be positive");
  if (params.p != 1 && params.p != 2) throw ConfigError("p must be 1 or 2");
  if (static_cast<std::size_t>(params.n_neighbors) > train.rows()) {
    throw ConfigError("n_neighbors (" + std::to_string(params.n_neighbors) +
                      ") exceeds the training rows (" + std::to_string(train.rows()) + ")");
  }
  return KnnModel(train.features(), train.labels(), params);
}

}  // namespace smelldetect
