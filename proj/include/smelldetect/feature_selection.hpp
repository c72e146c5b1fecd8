#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

struct Correlation {
  double value = 0.0;
  // Either series had zero variance; value is reported as 0.
  bool degenerate = false;
};

inline Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("pearson_correlation: length mismatch");
  if (xs.size() < 2) throw DataError("pearson_correlation: need at least two observations");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

inline double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  return pearson(xs, ys).value;
}

struct FeatureSelection {
  std::vector<double> correlations;  // signed, one per input feature
  std::vector<bool> degenerate;
  double threshold = 0.0;            // mean of |correlations|
  std::vector<std::size_t> selected; // ascending
  std::vector<std::string> selected_names;
  bool fallback = false;             // strict rule kept nothing; best single feature kept
  std::vector<std::int64_t> source_rows;
};

// Keeps features whose |r| with the 0/1 label is strictly above the mean |r|.
inline FeatureSelection compute_feature_selection(const LabeledDataset& dataset,
                                                  Warnings* warnings = nullptr) {
  if (dataset.cols() < 2) throw DataError("feature selection needs at least two features");
  const auto counts = class_counts(dataset);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("feature selection needs both classes present");
  }
  std::vector<double> y(dataset.labels().begin(), dataset.labels().end());
  FeatureSelection fs;
  fs.source_rows = dataset.origin();
  std::size_t usable = 0;
  double sum_abs = 0.0;
  for (std::size_t c = 0; c < dataset.cols(); ++c) {
    const auto col = dataset.features().column(c);
    const auto r = pearson(col, y);
    fs.correlations.push_back(r.value);
    fs.degenerate.push_back(r.degenerate);
    usable += r.degenerate ? 0 : 1;
    sum_abs += std::abs(r.value);
  }
  if (usable == 0) throw DataError("every feature has zero variance");
  fs.threshold = sum_abs / static_cast<double>(dataset.cols());
  for (std::size_t c = 0; c < dataset.cols(); ++c) {
    if (std::abs(fs.correlations[c]) > fs.threshold) fs.selected.push_back(c);
  }
  if (fs.selected.empty()) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < dataset.cols(); ++c) {
      if (std::abs(fs.correlations[c]) > std::abs(fs.correlations[best])) best = c;
    }
    fs.selected.push_back(best);
    fs.fallback = true;
    if (warnings) {
      warnings->push_back("no feature correlates above the mean; keeping '" +
                          dataset.schema().feature_names[best] + "'");
    }
  }
  for (auto c : fs.selected) fs.selected_names.push_back(dataset.schema().feature_names[c]);
  return fs;
}

inline LabeledDataset apply_feature_selection(const FeatureSelection& selection,
                                              const LabeledDataset& dataset) {
  if (selection.correlations.size() != dataset.cols()) {
    throw DataError("feature selection does not match the dataset's columns");
  }
  return dataset.select_columns(selection.selected);
}

inline std::pair<FeatureSelection, LabeledDataset> select_features(const LabeledDataset& dataset,
                                                                   Warnings* warnings = nullptr) {
  auto fs = compute_feature_selection(dataset, warnings);
  auto reduced = apply_feature_selection(fs, dataset);
  return {std::move(fs), std::move(reduced)};
}

}  // namespace smelldetect
