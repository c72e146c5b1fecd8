#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/rng.hpp"

namespace smelldetect {

// Column means over non-missing cells, plus the origin ids of the rows they
// were computed from.
struct ColumnMeans {
  std::vector<double> means;
  std::vector<std::int64_t> source_rows;
};

inline ColumnMeans fit_column_means(const LabeledDataset& dataset) {
  const auto& x = dataset.features();
  ColumnMeans stats;
  stats.means.resize(dataset.cols());
  stats.source_rows = dataset.origin();
  for (std::size_t c = 0; c < dataset.cols(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
      if (!std::isnan(x(r, c))) {
        sum += x(r, c);
        ++n;
      }
    }
    if (n == 0) {
      throw DataError("column '" + dataset.schema().feature_names[c] + "' has no observed values");
    }
    stats.means[c] = sum / static_cast<double>(n);
  }
  return stats;
}

inline LabeledDataset apply_column_means(const ColumnMeans& stats, const LabeledDataset& dataset) {
  if (stats.means.size() != dataset.cols()) throw DataError("imputation statistics do not match columns");
  Matrix x = dataset.features();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (std::isnan(x(r, c))) x(r, c) = stats.means[c];
    }
  }
  return LabeledDataset(dataset.schema(), std::move(x), dataset.labels(), dataset.smell(),
                        dataset.origin());
}

// Replaces each missing cell with its column's mean over the observed cells.
inline LabeledDataset impute_missing(const LabeledDataset& dataset) {
  if (!dataset.has_missing()) return dataset;
  return apply_column_means(fit_column_means(dataset), dataset);
}

struct SplitPair {
  LabeledDataset train;
  LabeledDataset test;
  std::uint64_t seed = 0;
};

// Per-class test sizes: round-half-up per class, reconciled so the total is
// ceil(n * fraction). The extra (or surplus) instance goes to (or comes from)
// the class with the larger fractional part (larger test count when removing),
// ties to label 0.
inline std::array<std::size_t, 2> stratified_test_sizes(const ClassCounts& counts, double fraction) {
  const std::array<std::size_t, 2> n = {counts.negatives, counts.positives};
  const double total = static_cast<double>(n[0] + n[1]);
  const auto target = static_cast<std::size_t>(std::ceil(total * fraction - 1e-9));
  std::array<std::size_t, 2> t{};
  std::array<double, 2> frac{};
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(n[c]) * fraction;
    t[c] = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
    frac[c] = exact - std::floor(exact);
  }
  while (t[0] + t[1] < target) {
    int c = 0;
    if (frac[1] > frac[0] || (frac[1] == frac[0] && n[1] > n[0])) c = 1;
    if (t[c] >= n[c]) c = 1 - c;
    ++t[c];
    frac[c] = -1.0;
  }
  while (t[0] + t[1] > target) {
    int c = t[1] > t[0] ? 1 : 0;
    --t[c];
  }
  return t;
}

// Seeded stratified hold-out split. Rows keep their relative order on each side.
inline SplitPair stratified_split(const LabeledDataset& dataset, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  const auto counts = class_counts(dataset);
  if (counts.positives < 2 || counts.negatives < 2) {
    throw DataError("stratified split needs at least two instances of each class");
  }
  const auto sizes = stratified_test_sizes(counts, test_fraction);
  const std::array<std::size_t, 2> n = {counts.negatives, counts.positives};
  for (int c = 0; c < 2; ++c) {
    if (sizes[c] == 0) {
      throw DataError("class " + std::to_string(c) + " would receive no test instances");
    }
    if (sizes[c] >= n[c]) {
      throw DataError("class " + std::to_string(c) + " would receive no training instances");
    }
  }

  auto rng = make_rng(seed);
  std::vector<bool> in_test(dataset.rows(), false);
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
      if (dataset.labels()[i] == c) members.push_back(i);
    }
    shuffle(std::span<std::size_t>(members), rng);
    for (std::size_t k = 0; k < sizes[c]; ++k) in_test[members[k]] = true;
  }
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < dataset.rows(); ++i) (in_test[i] ? test_idx : train_idx).push_back(i);
  return SplitPair{dataset.subset(train_idx), dataset.subset(test_idx), seed};
}

}  // namespace smelldetect
