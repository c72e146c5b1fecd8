#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

enum class KernelKind { Linear, Rbf };

struct SvmParams {
  double C = 1.0;
  std::optional<double> gamma;  // nullopt = "scale"
  KernelKind kernel = KernelKind::Rbf;
  double tolerance = 1e-3;
  int max_passes = 1000;        // iteration cap = max_passes * n pair updates
};

// gamma = 1 / (d * mean per-feature population variance); 1 when that is zero.
inline double svm_scale_gamma(const Matrix& x) {
  const std::size_t d = x.cols();
  const std::size_t n = x.rows();
  if (d == 0 || n == 0) return 1.0;
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    total += var / static_cast<double>(n);
  }
  const double mean_var = total / static_cast<double>(d);
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(d) * mean_var) : 1.0;
}

inline double svm_kernel(KernelKind kind, double gamma, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  if (kind == KernelKind::Linear) {
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

// Decision f(x) = sum_i alpha_i y_i K(x_i, x) + b over the support vectors.
class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(KernelKind kernel, double gamma, Matrix support, std::vector<double> alphas,
           std::vector<int> signs, double bias, bool converged, long iterations)
      : kernel_(kernel),
        gamma_(gamma),
        support_(std::move(support)),
        alphas_(std::move(alphas)),
        signs_(std::move(signs)),
        bias_(bias),
        converged_(converged),
        iterations_(iterations) {}

  double decision(std::span<const double> x) const {
    double f = bias_;
    for (std::size_t i = 0; i < support_.rows(); ++i) {
      f += alphas_[i] * signs_[i] * svm_kernel(kernel_, gamma_, support_.row(i), x);
    }
    return f;
  }
  int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : 0; }

  double gamma() const { return gamma_; }
  double bias() const { return bias_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<int>& signs() const { return signs_; }
  const Matrix& support_vectors() const { return support_; }
  bool converged() const { return converged_; }
  long iterations() const { return iterations_; }

  nlohmann::json to_json() const {
    nlohmann::json sv = nlohmann::json::array();
    for (std::size_t i = 0; i < support_.rows(); ++i) {
      sv.push_back(std::vector<double>(support_.row(i).begin(), support_.row(i).end()));
    }
    return {{"kernel", kernel_ == KernelKind::Linear ? "linear" : "rbf"},
            {"gamma", gamma_},
            {"support_vectors", sv},
            {"alphas", alphas_},
            {"signs", signs_},
            {"b", bias_},
            {"converged", converged_},
            {"iterations", iterations_}};
  }
  static SvmModel from_json(const nlohmann::json& j) {
    return SvmModel(j.at("kernel").get<std::string>() == "linear" ? KernelKind::Linear : KernelKind::Rbf,
                    j.at("gamma").get<double>(),
                    Matrix::from_rows(j.at("support_vectors").get<std::vector<std::vector<double>>>()),
                    j.at("alphas").get<std::vector<double>>(), j.at("signs").get<std::vector<int>>(),
                    j.at("b").get<double>(), j.at("converged").get<bool>(), j.at("iterations").get<long>());
  }

 private:
  KernelKind kernel_ = KernelKind::Rbf;
  double gamma_ = 1.0;
  Matrix support_;
  std::vector<double> alphas_;
  std::vector<int> signs_;
  double bias_ = 0.0;
  bool converged_ = true;
  long iterations_ = 0;
};

// Soft-margin C-SVM trained by sequential minimal optimisation on the dual
//   min 1/2 a'Qa - e'a,  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K(x_i, x_j)
// with maximal-violating-pair working-set selection. Stops when the KKT gap
// m(a) - M(a) falls below the tolerance or after max_passes * n updates.
inline SvmModel fit_svm(const LabeledDataset& train, const SvmParams& params) {
  if (!(params.C > 0.0)) throw ConfigError("C must be positive");
  if (params.gamma && !(*params.gamma > 0.0)) throw ConfigError("gamma must be positive or scale");
  const auto counts = class_counts(train);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("SVM needs both classes in the training set");
  }
  const auto& x = train.features();
  const std::size_t n = train.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.labels()[i] == 1 ? 1.0 : -1.0;
  const double gamma = params.gamma.value_or(svm_scale_gamma(x));

  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = y[i] * y[j] * svm_kernel(params.kernel, gamma, x.row(i), x.row(j));
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }
  auto Q = [&](std::size_t i, std::size_t j) { return q[i * n + j]; };

  const double C = params.C;
  constexpr double kTau = 1e-12;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  const long max_iter = static_cast<long>(params.max_passes) * static_cast<long>(std::max<std::size_t>(n, 1));
  long iter = 0;
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < params.tolerance) {
      converged = true;
      break;
    }
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_ai;
    const double dj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // Offset from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

  Matrix support;
  support.reset_columns(x.cols());
  std::vector<double> sv_alpha;
  std::vector<int> sv_sign;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      support.append_row(x.row(t));
      sv_alpha.push_back(alpha[t]);
      sv_sign.push_back(y[t] > 0 ? 1 : -1);
    }
  }
  return SvmModel(params.kernel, gamma, std::move(support), std::move(sv_alpha), std::move(sv_sign), -rho,
                  converged, iter);
}

}  // namespace smelldetect
