#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/hyperparameters.hpp"

namespace smelldetect {

// Positive class is 1 (smelly).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("label vectors differ in length: " + std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw DataError("cannot build a confusion matrix from zero labels");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1;
    const bool p = y_pred[i] == 1;
    if (t && p) ++m.tp;
    else if (!t && p) ++m.fp;
    else if (t) ++m.fn;
    else ++m.tn;
  }
  return m;
}

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
  ConfusionMatrix matrix;
  std::optional<SmellKind> smell;
  std::optional<ModelKind> model;
  bool tuned = false;
};

// 0/0 ratios are reported as 0 and flagged.
inline MetricsReport metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw DataError("confusion matrix is empty");
  MetricsReport r;
  r.matrix = m;
  const auto ratio = [](std::size_t num, std::size_t den, bool& degenerate) {
    degenerate = den == 0;
    return degenerate ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  r.precision = ratio(m.tp, m.tp + m.fp, r.precision_degenerate);
  r.recall = ratio(m.tp, m.tp + m.fn, r.recall_degenerate);
  const double sum = r.precision + r.recall;
  r.f1_degenerate = sum == 0.0;
  r.f1 = r.f1_degenerate ? 0.0 : 2.0 * r.precision * r.recall / sum;
  return r;
}

}  // namespace smelldetect
