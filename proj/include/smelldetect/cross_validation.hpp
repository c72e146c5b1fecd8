#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/hyperparameters.hpp"
#include "smelldetect/model.hpp"
#include "smelldetect/rng.hpp"

namespace smelldetect {

struct CvConfig {
  int folds = 5;
  std::uint64_t seed = 0;
  // Worker threads for independent trials; 0 = hardware concurrency.
  unsigned threads = 1;
};

struct CvScore {
  double mean = 0.0;
  std::vector<double> folds;
};

// Canonical row order: by label, then lexicographically by feature values.
// Fold assignment built on it depends only on content and seed, never on the
// order rows arrive in.
inline std::vector<std::size_t> canonical_row_order(const LabeledDataset& data) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& x = data.features();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (data.labels()[a] != data.labels()[b]) return data.labels()[a] < data.labels()[b];
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

// Fold index per row. Each class (0, then 1) is shuffled in canonical order
// and dealt round-robin, the dealing counter carrying over between classes.
inline std::vector<int> stratified_folds(const LabeledDataset& data, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > data.rows()) {
    throw DataError("cannot build " + std::to_string(folds) + " folds from " + std::to_string(data.rows()) +
                    " rows");
  }
  const auto order = canonical_row_order(data);
  auto rng = make_rng(seed);
  std::vector<int> fold_of(data.rows(), -1);
  std::size_t dealt = 0;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> members;
    for (auto i : order) {
      if (data.labels()[i] == c) members.push_back(i);
    }
    shuffle(std::span<std::size_t>(members), rng);
    for (auto i : members) fold_of[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
  }
  std::vector<std::array<std::size_t, 2>> held_counts(static_cast<std::size_t>(folds), {0, 0});
  const auto totals = class_counts(data);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(folds), 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    sizes[static_cast<std::size_t>(fold_of[i])]++;
    held_counts[static_cast<std::size_t>(fold_of[i])][static_cast<std::size_t>(data.labels()[i])]++;
  }
  for (int f = 0; f < folds; ++f) {
    const auto& held = held_counts[static_cast<std::size_t>(f)];
    if (sizes[static_cast<std::size_t>(f)] == 0) throw DataError("a cross-validation fold is empty");
    if (held[0] == totals.negatives || held[1] == totals.positives) {
      throw DataError("a cross-validation training split lacks one class");
    }
  }
  return fold_of;
}

using Evaluator = std::function<CvScore(const Hyperparameters&)>;

// Stratified k-fold accuracy of (kind, params) on `train`. Fold training sets
// are assembled in canonical row order, and every fit uses cv.seed.
inline CvScore cross_validate(ModelKind kind, const Hyperparameters& params, const LabeledDataset& train,
                              const CvConfig& cv) {
  const auto fold_of = stratified_folds(train, cv.folds, cv.seed);
  const auto order = canonical_row_order(train);
  CvScore score;
  for (int f = 0; f < cv.folds; ++f) {
    std::vector<std::size_t> fit_rows;
    std::vector<std::size_t> held_rows;
    for (auto i : order) (fold_of[i] == f ? held_rows : fit_rows).push_back(i);
    const auto model = fit_model(kind, params, train.subset(fit_rows), cv.seed);
    std::size_t correct = 0;
    for (auto i : held_rows) correct += model.predict_one(train.features().row(i)) == train.labels()[i] ? 1 : 0;
    score.folds.push_back(static_cast<double>(correct) / static_cast<double>(held_rows.size()));
  }
  score.mean = std::accumulate(score.folds.begin(), score.folds.end(), 0.0) / static_cast<double>(cv.folds);
  return score;
}

inline Evaluator cv_evaluator(ModelKind kind, const LabeledDataset& train, const CvConfig& cv) {
  return [kind, &train, cv](const Hyperparameters& hp) { return cross_validate(kind, hp, train, cv); };
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers finish.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace smelldetect
