#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "smelldetect/error.hpp"

namespace smelldetect {

// Collects non-fatal diagnostics from loaders and pipeline stages.
using Warnings = std::vector<std::string>;

// Dense row-major matrix of doubles. Missing cells are NaN until imputation.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    if (rows.empty()) return m;
    m.cols_ = rows.front().size();
    for (const auto& r : rows) m.append_row(r);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) {
      throw DataError("row has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Sets the column count of an empty matrix so rows can be appended.
  void reset_columns(std::size_t cols) {
    rows_ = 0;
    cols_ = cols;
    data_.clear();
  }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    // Bitwise so that NaN-marked missing cells compare equal.
    return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), [](double x, double y) {
      return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
    });
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class SmellKind { GodClass, DataClass, FeatureEnvy, LongMethod, LongParameterList, SwitchStatements };

inline constexpr std::array<SmellKind, 6> kAllSmells = {
    SmellKind::GodClass,   SmellKind::DataClass,         SmellKind::FeatureEnvy,
    SmellKind::LongMethod, SmellKind::LongParameterList, SmellKind::SwitchStatements};

inline std::string_view to_string(SmellKind kind) {
  switch (kind) {
    case SmellKind::GodClass: return "GodClass";
    case SmellKind::DataClass: return "DataClass";
    case SmellKind::FeatureEnvy: return "FeatureEnvy";
    case SmellKind::LongMethod: return "LongMethod";
    case SmellKind::LongParameterList: return "LongParameterList";
    case SmellKind::SwitchStatements: return "SwitchStatements";
  }
  return "?";
}

namespace detail {
inline std::string fold_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace detail

// Accepts "GodClass", "god-class", "God Class", "switch_statement" and so on.
inline std::optional<SmellKind> parse_smell(std::string_view text) {
  auto key = detail::fold_name(text);
  if (key == "switchstatement") key = "switchstatements";
  if (key == "longparamlist") key = "longparameterlist";
  for (auto kind : kAllSmells) {
    if (detail::fold_name(to_string(kind)) == key) return kind;
  }
  return std::nullopt;
}

struct DatasetSchema {
  std::vector<std::string> feature_names;
  std::string label_name = "label";
  std::string positive_label = "true";

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
      if (name.empty()) throw DataError("empty feature name");
      if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
    }
    if (seen.contains(label_name)) {
      throw DataError("label column '" + label_name + "' is also a feature");
    }
  }

  friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;
};

// Marks rows that SMOTE synthesised rather than loaded.
inline constexpr std::int64_t kSyntheticRow = -1;

// Feature matrix + binary labels (1 = smelly). `origin` carries, per row, the
// index of the row in the originally loaded file (or kSyntheticRow), so that
// every derived statistic can name the rows it was computed from.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  LabeledDataset(DatasetSchema schema, Matrix features, std::vector<int> labels,
                 std::optional<SmellKind> smell = std::nullopt,
                 std::vector<std::int64_t> origin = {})
      : schema_(std::move(schema)),
        features_(std::move(features)),
        labels_(std::move(labels)),
        smell_(smell),
        origin_(std::move(origin)) {
    if (features_.rows() != labels_.size()) {
      throw DataError("feature rows (" + std::to_string(features_.rows()) +
                      ") do not match label count (" + std::to_string(labels_.size()) + ")");
    }
    if (!features_.empty() && features_.cols() != schema_.feature_names.size()) {
      throw DataError("feature columns do not match schema");
    }
    for (int y : labels_) {
      if (y != 0 && y != 1) throw LabelError("labels must be 0 or 1");
    }
    if (origin_.empty()) {
      origin_.resize(labels_.size());
      for (std::size_t i = 0; i < origin_.size(); ++i) origin_[i] = static_cast<std::int64_t>(i);
    } else if (origin_.size() != labels_.size()) {
      throw DataError("origin index count does not match rows");
    }
    schema_.validate();
  }

  const DatasetSchema& schema() const noexcept { return schema_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::int64_t>& origin() const noexcept { return origin_; }
  std::optional<SmellKind> smell() const noexcept { return smell_; }

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return schema_.feature_names.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  void set_smell(std::optional<SmellKind> smell) { smell_ = smell; }

  bool has_missing() const {
    return std::ranges::any_of(features_.data(), [](double v) { return std::isnan(v); });
  }
  bool all_finite() const {
    return std::ranges::all_of(features_.data(), [](double v) { return std::isfinite(v); });
  }

  // Rows in the given order; indices may repeat.
  LabeledDataset subset(std::span<const std::size_t> indices) const {
    Matrix m;
    m.reset_columns(cols());
    std::vector<int> y;
    std::vector<std::int64_t> o;
    y.reserve(indices.size());
    o.reserve(indices.size());
    for (auto i : indices) {
      m.append_row(features_.row(i));
      y.push_back(labels_[i]);
      o.push_back(origin_[i]);
    }
    return LabeledDataset(schema_, std::move(m), std::move(y), smell_, std::move(o));
  }

  LabeledDataset select_columns(std::span<const std::size_t> columns) const {
    DatasetSchema s = schema_;
    s.feature_names.clear();
    for (auto c : columns) s.feature_names.push_back(schema_.feature_names.at(c));
    Matrix m;
    m.reset_columns(columns.size());
    std::vector<double> buf(columns.size());
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t k = 0; k < columns.size(); ++k) buf[k] = features_(r, columns[k]);
      m.append_row(buf);
    }
    return LabeledDataset(std::move(s), std::move(m), labels_, smell_, origin_);
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  DatasetSchema schema_;
  Matrix features_;
  std::vector<int> labels_;
  std::optional<SmellKind> smell_;
  std::vector<std::int64_t> origin_;
};

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;

  std::size_t minority() const { return std::min(positives, negatives); }
  std::size_t majority() const { return std::max(positives, negatives); }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

inline ClassCounts class_counts(const LabeledDataset& dataset) {
  ClassCounts c;
  for (int y : dataset.labels()) (y == 1 ? c.positives : c.negatives)++;
  return c;
}

}  // namespace smelldetect
