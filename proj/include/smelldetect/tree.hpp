#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/rng.hpp"

namespace smelldetect {

// Split qualities closer than this are treated as ties and resolved toward
// the lower feature index, then the lower threshold.
inline constexpr double kSplitTieTolerance = 1e-12;

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

// Binary decision tree over dense rows; x[feature] <= threshold goes left.
class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double evaluate(std::span<const double> x) const {
    int n = 0;
    while (nodes_[n].feature >= 0) {
      const auto& node = nodes_[n];
      n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[n].value;
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  bool is_leaf_only() const { return nodes_.size() == 1; }

  std::size_t depth() const { return depth_from(0); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::ranges::count_if(nodes_, [](const TreeNode& n) { return n.feature < 0; }));
  }

  nlohmann::json to_json() const { return node_json(0); }

  static Tree from_json(const nlohmann::json& j) {
    Tree t;
    t.read_node(j);
    return t;
  }

  friend bool operator==(const Tree& a, const Tree& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      const auto& x = a.nodes_[i];
      const auto& y = b.nodes_[i];
      if (x.feature != y.feature || x.left != y.left || x.right != y.right ||
          x.threshold != y.threshold || x.value != y.value) {
        return false;
      }
    }
    return true;
  }

 private:
  std::size_t depth_from(int n) const {
    const auto& node = nodes_[n];
    if (node.feature < 0) return 0;
    return 1 + std::max(depth_from(node.left), depth_from(node.right));
  }

  nlohmann::json node_json(int n) const {
    const auto& node = nodes_[n];
    if (node.feature < 0) return {{"value", node.value}};
    return {{"feature", node.feature},
            {"threshold", node.threshold},
            {"left", node_json(node.left)},
            {"right", node_json(node.right)}};
  }

  int read_node(const nlohmann::json& j) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (j.contains("value")) {
      nodes_[id].value = j.at("value").get<double>();
      return id;
    }
    nodes_[id].feature = j.at("feature").get<int>();
    nodes_[id].threshold = j.at("threshold").get<double>();
    const int l = read_node(j.at("left"));
    const int r = read_node(j.at("right"));
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<TreeNode> nodes_;
};

// Threshold strictly between two consecutive distinct sorted values a < b,
// with a <= t < b so that `x <= t` reproduces the partition.
inline double split_midpoint(double a, double b) {
  double mid = std::midpoint(a, b);
  if (mid >= b) mid = a;
  return mid;
}

inline double gini_impurity(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w;
  const double p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

enum class MaxFeatures { All, Sqrt, Log2 };

inline std::size_t features_per_node(MaxFeatures mode, std::size_t d) {
  switch (mode) {
    case MaxFeatures::All: return d;
    case MaxFeatures::Sqrt:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
    case MaxFeatures::Log2:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(static_cast<double>(d))));
  }
  return d;
}

struct CartParams {
  std::optional<int> max_depth;  // nullopt = grow until pure
  MaxFeatures max_features = MaxFeatures::All;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

namespace detail {

// Draws `count` distinct columns out of d, returned ascending.
inline std::vector<std::size_t> sample_columns(std::size_t d, std::size_t count, Rng& rng) {
  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  if (count >= d) return cols;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, d - i));
    std::swap(cols[i], cols[j]);
  }
  cols.resize(count);
  std::sort(cols.begin(), cols.end());
  return cols;
}

class CartBuilder {
 public:
  CartBuilder(const Matrix& x, std::span<const int> y, std::span<const double> w,
              const CartParams& params, Rng& rng)
      : x_(x), y_(y), w_(w), params_(params), rng_(rng) {}

  Tree build(std::vector<std::size_t> samples) {
    nodes_.clear();
    grow(samples, 0);
    return Tree(std::move(nodes_));
  }

 private:
  double weight(std::size_t i) const { return w_.empty() ? 1.0 : w_[i]; }

  int grow(std::vector<std::size_t>& samples, int depth) {
    double w0 = 0.0;
    double w1 = 0.0;
    for (auto i : samples) (y_[i] == 1 ? w1 : w0) += weight(i);
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].value = w1 > w0 ? 1.0 : 0.0;

    const auto n = static_cast<int>(samples.size());
    const bool pure = w0 == 0.0 || w1 == 0.0;
    if (pure || n < params_.min_samples_split || n < 2 * params_.min_samples_leaf ||
        (params_.max_depth && depth >= *params_.max_depth)) {
      return id;
    }
    const auto cols = sample_columns(x_.cols(), features_per_node(params_.max_features, x_.cols()), rng_);
    const auto split = best_split(samples, cols, w0, w1);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : samples) {
      (x_(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  SplitChoice best_split(const std::vector<std::size_t>& samples, const std::vector<std::size_t>& cols,
                         double w0, double w1) {
    SplitChoice best;
    const double total = w0 + w1;
    const double parent = gini_impurity(w0, w1);
    const std::size_t n = samples.size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    for (auto f : cols) {
      order_.clear();
      for (auto i : samples) order_.emplace_back(x_(i, f), i);
      std::sort(order_.begin(), order_.end());
      double l0 = 0.0;
      double l1 = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto i = order_[k].second;
        (y_[i] == 1 ? l1 : l0) += weight(i);
        if (!(order_[k].first < order_[k + 1].first)) continue;
        if (k + 1 < min_leaf || n - k - 1 < min_leaf) continue;
        const double wl = l0 + l1;
        const double wr = total - wl;
        const double gain = parent - (wl / total) * gini_impurity(l0, l1) -
                            (wr / total) * gini_impurity(w0 - l0, w1 - l1);
        if (gain > best.gain + kSplitTieTolerance) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.threshold = split_midpoint(order_[k].first, order_[k + 1].first);
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::span<const double> w_;
  const CartParams& params_;
  Rng& rng_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::size_t>> order_;
};

}  // namespace detail

// CART classification tree on Gini impurity decrease. `weights` may be empty
// (unit weights); `samples` lists the training rows and may repeat rows.
// Leaves predict the weighted majority class, ties to 0.
inline Tree fit_cart(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                     std::vector<std::size_t> samples, const CartParams& params, Rng& rng) {
  if (samples.empty()) throw DataError("cannot grow a tree on zero samples");
  detail::CartBuilder builder(x, y, weights, params, rng);
  return builder.build(std::move(samples));
}

inline Tree fit_cart(const Matrix& x, std::span<const int> y, const CartParams& params, Rng& rng) {
  std::vector<std::size_t> samples(x.rows());
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  return fit_cart(x, y, {}, std::move(samples), params, rng);
}

struct GradientTreeParams {
  int max_depth = 3;
  double lambda = 0.0;  // L2 term in the split score G^2 / (H + lambda)
  double gamma = 0.0;   // minimum loss reduction to split
};

// Row indices of every column sorted by (value, row).
using PresortedColumns = std::vector<std::vector<std::uint32_t>>;

inline PresortedColumns presort_columns(const Matrix& x) {
  PresortedColumns out(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = out[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), std::uint32_t{0});
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x(a, f) < x(b, f) || (x(a, f) == x(b, f) && a < b);
    });
  }
  return out;
}

// Regression tree for second-order boosting. Splits maximise
// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)] - gamma over the allowed
// columns; a split is made only when that gain is positive. Leaf values come
// from `leaf_value` applied to the rows reaching the leaf.
inline Tree fit_gradient_tree(const Matrix& x, std::span<const double> grad,
                              std::span<const double> hess, std::span<const std::size_t> columns,
                              const GradientTreeParams& params,
                              const std::function<double(std::span<const std::size_t>)>& leaf_value,
                              const PresortedColumns& presorted) {
  std::vector<TreeNode> nodes;
  auto score = [&](double g, double h) { return g * g / (h + params.lambda); };
  std::vector<char> goes_left(x.rows(), 0);
  using Lists = std::vector<std::vector<std::uint32_t>>;  // one sorted row list per allowed column

  std::function<int(Lists&, int)> grow = [&](Lists& lists, int depth) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const auto& rows = lists.front();
    double g = 0.0;
    double h = 0.0;
    for (auto i : rows) {
      g += grad[i];
      h += hess[i];
    }
    SplitChoice best;
    std::size_t best_list = 0;
    if (depth < params.max_depth && rows.size() >= 2) {
      const double parent = score(g, h);
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto f = columns[c];
        const auto& order = lists[c];
        double gl = 0.0;
        double hl = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          gl += grad[order[k]];
          hl += hess[order[k]];
          const double a = x(order[k], f);
          const double b = x(order[k + 1], f);
          if (!(a < b)) continue;
          const double gain = 0.5 * (score(gl, hl) + score(g - gl, h - hl) - parent) - params.gamma;
          if (gain > best.gain + kSplitTieTolerance) {
            best.gain = gain;
            best.feature = static_cast<int>(f);
            best.threshold = split_midpoint(a, b);
            best_list = c;
          }
        }
      }
    }
    if (best.feature < 0 || !(best.gain > kSplitTieTolerance)) {
      std::vector<std::size_t> members(rows.begin(), rows.end());
      std::sort(members.begin(), members.end());
      nodes[id].value = leaf_value(members);
      return id;
    }
    const auto bf = static_cast<std::size_t>(best.feature);
    for (auto i : lists[best_list]) goes_left[i] = x(i, bf) <= best.threshold ? 1 : 0;
    Lists left(lists.size());
    Lists right(lists.size());
    for (std::size_t c = 0; c < lists.size(); ++c) {
      for (auto i : lists[c]) (goes_left[i] ? left[c] : right[c]).push_back(i);
    }
    Lists().swap(lists);
    nodes[id].feature = best.feature;
    nodes[id].threshold = best.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  };

  if (columns.empty()) throw DataError("gradient tree needs at least one column");
  Lists lists;
  for (auto f : columns) lists.push_back(presorted.at(f));
  grow(lists, 0);
  return Tree(std::move(nodes));
}

inline Tree fit_gradient_tree(const Matrix& x, std::span<const double> grad,
                              std::span<const double> hess, std::span<const std::size_t> columns,
                              const GradientTreeParams& params,
                              const std::function<double(std::span<const std::size_t>)>& leaf_value) {
  return fit_gradient_tree(x, grad, hess, columns, params, leaf_value, presort_columns(x));
}

}  // namespace smelldetect
