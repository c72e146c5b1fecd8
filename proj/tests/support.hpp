#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/dataset_io.hpp"
#include "smelldetect/metrics.hpp"

namespace sdtest {

using smelldetect::LabeledDataset;
using smelldetect::Matrix;

inline LabeledDataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  smelldetect::DatasetSchema schema;
  const std::size_t d = rows.empty() ? 1 : rows.front().size();
  for (std::size_t c = 0; c < d; ++c) schema.feature_names.push_back("f" + std::to_string(c));
  Matrix x = rows.empty() ? Matrix(0, d) : Matrix::from_rows(rows);
  return LabeledDataset(std::move(schema), std::move(x), labels);
}

// Both classes guaranteed when n >= 2.
inline LabeledDataset random_dataset(std::mt19937_64& gen, std::size_t n, std::size_t d, bool integer_grid = false) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> cell(0, 4);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      rows[i][c] = integer_grid ? cell(gen) : u(gen);
      s += rows[i][c] * (c % 2 == 0 ? 1.0 : -0.5);
    }
    labels[i] = s + std::normal_distribution<double>(0.0, 1.0)(gen) > 0.0 ? 1 : 0;
  }
  labels[0] = 0;
  labels[n - 1] = 1;
  return make_dataset(rows, labels);
}

// Rows for a class-imbalanced set with the given counts; the first `signal`
// columns are shifted for positives.
inline LabeledDataset counts_dataset(std::size_t positives, std::size_t negatives, std::size_t d,
                                     std::uint64_t seed, std::size_t signal = 4) {
  std::mt19937_64 gen(seed);
  std::lognormal_distribution<double> base(1.0, 0.8);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  const std::size_t n = positives + negatives;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 3 == 0 && positives > 0 ? 1 : 0;
    labels.push_back(y);
  }
  // Fix the exact tallies.
  std::size_t pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  for (std::size_t i = 0; i < n && pos < positives; ++i) {
    if (labels[i] == 0) {
      labels[i] = 1;
      ++pos;
    }
  }
  for (std::size_t i = n; i-- > 0 && pos > positives;) {
    if (labels[i] == 1) {
      labels[i] = 0;
      --pos;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (std::size_t c = 0; c < d; ++c) {
      r[c] = std::round(base(gen) * 1000.0) / 1000.0;
      if (c < signal && labels[i] == 1) r[c] += 3.0 + static_cast<double>(c);
    }
    rows.push_back(std::move(r));
  }
  return make_dataset(rows, labels);
}

inline std::string to_arff(const LabeledDataset& ds) {
  std::string out = "@relation synthetic\n";
  for (const auto& name : ds.schema().feature_names) out += "@attribute " + name + " numeric\n";
  out += "@attribute is_smelly {true,false}\n@data\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      const double v = ds.features()(r, c);
      out += std::isnan(v) ? std::string("?") : smelldetect::detail::format_number(v);
      out += ",";
    }
    out += ds.labels()[r] == 1 ? "true\n" : "false\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("smelldetect-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// --- oracles -------------------------------------------------------------

struct Stump {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

inline double gini(double a, double b) {
  const double t = a + b;
  if (t == 0.0) return 0.0;
  return 1.0 - (a / t) * (a / t) - (b / t) * (b / t);
}

// Every (feature, midpoint) pair, scored by counting each side from scratch.
inline Stump brute_force_stump(const LabeledDataset& ds, double tolerance = 1e-12) {
  Stump best;
  const auto& x = ds.features();
  const auto& y = ds.labels();
  double p0 = 0.0;
  double p1 = 0.0;
  for (int v : y) (v == 1 ? p1 : p0) += 1.0;
  const double parent = gini(p0, p1);
  for (std::size_t f = 0; f < ds.cols(); ++f) {
    auto values = x.column(f);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = values[k] + (values[k + 1] - values[k]) / 2.0;
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (x(i, f) <= t) (y[i] == 1 ? l1 : l0) += 1.0;
        else (y[i] == 1 ? r1 : r0) += 1.0;
      }
      const double n = l0 + l1 + r0 + r1;
      const double gain = parent - (l0 + l1) / n * gini(l0, l1) - (r0 + r1) / n * gini(r0, r1);
      if (gain > best.gain + tolerance) best = {static_cast<int>(f), t, gain};
    }
  }
  return best;
}

// Full distance table, stable sort, then vote.
inline int brute_force_knn(const LabeledDataset& train, const std::vector<double>& q, int k, int p, bool weighted) {
  std::vector<std::pair<double, std::size_t>> table;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c) {
      const double d = std::abs(train.features()(i, c) - q[c]);
      s += p == 1 ? d : d * d;
    }
    table.emplace_back(p == 1 ? s : std::sqrt(s), i);
  }
  std::stable_sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double v0 = 0.0;
  double v1 = 0.0;
  const bool exact = weighted && table.front().first == 0.0;
  for (int j = 0; j < k; ++j) {
    const auto& [dist, i] = table[static_cast<std::size_t>(j)];
    double w = 1.0;
    if (exact) w = dist == 0.0 ? 1.0 : 0.0;
    else if (weighted) w = 1.0 / dist;
    (train.labels()[i] == 1 ? v1 : v0) += w;
  }
  return v1 > v0 ? 1 : 0;
}

// Two-pass textbook formula in long double.
inline double closed_form_pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<long double>(xs.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

struct HandMetrics {
  double accuracy, precision, recall, f1;
};

inline HandMetrics hand_metrics(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  const double n = static_cast<double>(tp + fp + fn + tn);
  const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  return {static_cast<double>(tp + tn) / n, p, r, f};
}

}  // namespace sdtest
