#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "smelldetect/error.hpp"
#include "smelldetect/search_space.hpp"

namespace smelldetect {

// Maps a configuration to [0, 1]^m: numeric values min-max normalised over
// their domain (in log space for log domains), everything else one-hot.
class ParamEncoder {
 public:
  explicit ParamEncoder(const SearchSpace& space) : space_(space) {}

  std::vector<double> encode(const Hyperparameters& hp) const {
    std::vector<double> out;
    for (const auto& [name, domain] : space_.domains()) {
      const auto& v = hp.at(name);
      if (const auto* range = std::get_if<NumericRange>(&domain)) {
        out.push_back(normalise(v.as_double(), range->lo, range->hi, range->scale));
        continue;
      }
      const auto& list = std::get<ValueList>(domain);
      if (numeric_list(list)) {
        double lo = list.values.front().as_double();
        double hi = lo;
        for (const auto& c : list.values) {
          lo = std::min(lo, c.as_double());
          hi = std::max(hi, c.as_double());
        }
        out.push_back(normalise(v.as_double(), lo, hi, list.scale));
        continue;
      }
      for (const auto& c : list.values) out.push_back(c == v ? 1.0 : 0.0);
    }
    return out;
  }

 private:
  static bool numeric_list(const ValueList& list) {
    return std::ranges::all_of(list.values, [&](const ParamValue& v) {
      return v.is_number() && (list.scale == Scale::Linear || v.as_double() > 0.0);
    });
  }

  static double normalise(double v, double lo, double hi, Scale scale) {
    if (scale == Scale::Log) {
      v = std::log(v);
      lo = std::log(lo);
      hi = std::log(hi);
    }
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
  }

  const SearchSpace& space_;
};

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Expected improvement over `best` for a maximisation problem.
inline double expected_improvement(double mean, double sd, double best) {
  const double gain = mean - best;
  if (sd <= 1e-12) return std::max(gain, 0.0);
  const double z = gain / sd;
  return gain * normal_cdf(z) + sd * normal_pdf(z);
}

// Zero-mean GP regression with a unit-variance squared-exponential kernel on
// standardised targets.
class GaussianProcess {
 public:
  static constexpr double kJitter = 1e-6;

  GaussianProcess(std::vector<std::vector<double>> inputs, const std::vector<double>& targets)
      : inputs_(std::move(inputs)) {
    if (inputs_.empty() || inputs_.size() != targets.size()) {
      throw NumericError("Gaussian process needs one target per input");
    }
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    double mean = 0.0;
    for (double t : targets) mean += t;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double t : targets) var += (t - mean) * (t - mean);
    var /= static_cast<double>(n);
    y_mean_ = mean;
    y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
    length_scale_ = median_pairwise_distance(inputs_);

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        k(i, j) = k(j, i) = kernel(inputs_[static_cast<std::size_t>(i)], inputs_[static_cast<std::size_t>(j)]);
      }
      k(i, i) += kJitter;
    }
    chol_.compute(k);
    if (chol_.info() != Eigen::Success) throw NumericError("GP kernel matrix is not positive definite");
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = (targets[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
    alpha_ = chol_.solve(y);
  }

  double length_scale() const { return length_scale_; }

  // Posterior mean and standard deviation in the original target units.
  std::pair<double, double> predict(const std::vector<double>& x) const {
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(inputs_[static_cast<std::size_t>(i)], x);
    const double mean = ks.dot(alpha_);
    const Eigen::VectorXd v = chol_.matrixL().solve(ks);
    const double var = std::max(1.0 - v.squaredNorm(), 0.0);
    return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
  }

  // Median of the positive pairwise Euclidean distances; 1 when there are none.
  static double median_pairwise_distance(const std::vector<std::vector<double>>& pts) {
    std::vector<double> d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
        if (s > 0.0) d.push_back(std::sqrt(s));
      }
    }
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size() / 2;
    return d.size() % 2 == 1 ? d[m] : 0.5 * (d[m - 1] + d[m]);
  }

 private:
  double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-0.5 * s / (length_scale_ * length_scale_));
  }

  std::vector<std::vector<double>> inputs_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double length_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

}  // namespace smelldetect
