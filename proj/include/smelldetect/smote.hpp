#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/rng.hpp"

namespace smelldetect {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

// Raises the minority class to the majority count with SMOTE interpolation.
//
// Base instances are visited cyclically in row order; for each one a neighbour
// is drawn uniformly among its k nearest minority neighbours (Euclidean, ties
// to the lower row) and the synthetic row is x + u * (neighbour - x) with
// u ~ U[0, 1). k is clamped to minority_count - 1; a single minority instance
// is duplicated. Original rows come first and are unchanged.
inline LabeledDataset smote_oversample(const LabeledDataset& dataset, const SmoteConfig& config) {
  if (config.k_neighbors < 1) throw ConfigError("SMOTE k_neighbors must be at least 1");
  if (dataset.has_missing()) throw DataError("SMOTE requires a dataset without missing values");
  const auto counts = class_counts(dataset);
  if (counts.positives == counts.negatives) return dataset;
  if (counts.minority() == 0) throw DataError("SMOTE: minority class is empty");

  const int minority_label = counts.positives < counts.negatives ? 1 : 0;
  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    if (dataset.labels()[i] == minority_label) minority.push_back(i);
  }
  const std::size_t m = minority.size();
  const std::size_t k = std::min(config.k_neighbors, m - 1);
  const auto& x = dataset.features();

  std::vector<std::vector<std::size_t>> neighbours(m);
  if (k > 0) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t a = 0; a < m; ++a) {
      dist.clear();
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        dist.emplace_back(detail::squared_distance(x.row(minority[a]), x.row(minority[b])), b);
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      for (std::size_t j = 0; j < k; ++j) neighbours[a].push_back(dist[j].second);
    }
  }

  Matrix out = x;
  std::vector<int> labels = dataset.labels();
  std::vector<std::int64_t> origin = dataset.origin();
  auto rng = make_rng(config.seed);
  const std::size_t deficit = counts.majority() - m;
  std::vector<double> synthetic(dataset.cols());
  for (std::size_t s = 0; s < deficit; ++s) {
    const std::size_t a = s % m;
    const auto base = x.row(minority[a]);
    if (k == 0) {
      std::copy(base.begin(), base.end(), synthetic.begin());
    } else {
      const auto pick = neighbours[a][uniform_index(rng, k)];
      const auto other = x.row(minority[pick]);
      const double u = uniform01(rng);
      for (std::size_t c = 0; c < synthetic.size(); ++c) {
        synthetic[c] = base[c] + u * (other[c] - base[c]);
      }
    }
    out.append_row(synthetic);
    labels.push_back(minority_label);
    origin.push_back(kSyntheticRow);
  }
  return LabeledDataset(dataset.schema(), std::move(out), std::move(labels), dataset.smell(),
                        std::move(origin));
}

}  // namespace smelldetect
