#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smelldetect/error.hpp"
#include "smelldetect/hyperparameters.hpp"
#include "smelldetect/rng.hpp"

namespace smelldetect {

enum class Scale { Linear, Log };

// Explicit candidates, enumerable. `scale` only affects how numeric lists are
// encoded for the Bayesian surrogate.
struct ValueList {
  std::vector<ParamValue> values;
  Scale scale = Scale::Linear;
};

// Closed interval [lo, hi]; integral ranges sample whole numbers.
struct NumericRange {
  double lo = 0.0;
  double hi = 1.0;
  Scale scale = Scale::Linear;
  bool integral = false;
};

using Domain = std::variant<ValueList, NumericRange>;

class SearchSpace {
 public:
  SearchSpace() = default;
  SearchSpace(ModelKind kind, std::vector<std::pair<std::string, Domain>> domains)
      : kind_(kind), domains_(std::move(domains)) {
    validate();
  }

  ModelKind kind() const { return kind_; }
  const std::vector<std::pair<std::string, Domain>>& domains() const { return domains_; }

  void validate() const {
    if (domains_.empty()) throw ConfigError("search space has no parameters");
    for (const auto& [name, d] : domains_) {
      if (const auto* list = std::get_if<ValueList>(&d)) {
        if (list->values.empty()) throw ConfigError("domain of '" + name + "' is empty");
      } else {
        const auto& r = std::get<NumericRange>(d);
        if (!(r.lo <= r.hi)) throw ConfigError("range of '" + name + "' has lo > hi");
        if (r.scale == Scale::Log && !(r.lo > 0.0)) {
          throw ConfigError("log-scale range of '" + name + "' must be strictly positive");
        }
      }
    }
  }

  bool enumerable() const {
    for (const auto& [_, d] : domains_) {
      if (!std::holds_alternative<ValueList>(d)) return false;
    }
    return true;
  }

  std::size_t cardinality() const {
    if (!enumerable()) throw ConfigError("search space has a continuous domain");
    std::size_t n = 1;
    for (const auto& [_, d] : domains_) n *= std::get<ValueList>(d).values.size();
    return n;
  }

  // Cartesian product in declared order; the last declared parameter varies fastest.
  std::vector<Hyperparameters> enumerate() const {
    if (!enumerable()) throw ConfigError("grid search needs every domain to be a value list");
    std::vector<Hyperparameters> out;
    const std::size_t total = cardinality();
    out.reserve(total);
    std::vector<std::size_t> idx(domains_.size(), 0);
    for (std::size_t t = 0; t < total; ++t) {
      Hyperparameters hp;
      for (std::size_t k = 0; k < domains_.size(); ++k) {
        hp.set(domains_[k].first, std::get<ValueList>(domains_[k].second).values[idx[k]]);
      }
      out.push_back(std::move(hp));
      for (std::size_t k = domains_.size(); k-- > 0;) {
        if (++idx[k] < std::get<ValueList>(domains_[k].second).values.size()) break;
        idx[k] = 0;
      }
    }
    return out;
  }

  // One independent draw per domain, in declared order: uniform over lists,
  // uniform over linear ranges, log-uniform over log ranges.
  Hyperparameters sample(Rng& rng) const {
    Hyperparameters hp;
    for (const auto& [name, d] : domains_) {
      if (const auto* list = std::get_if<ValueList>(&d)) {
        hp.set(name, list->values[uniform_index(rng, list->values.size())]);
        continue;
      }
      const auto& r = std::get<NumericRange>(d);
      if (r.integral) {
        const auto lo = static_cast<std::int64_t>(std::ceil(r.lo));
        const auto hi = static_cast<std::int64_t>(std::floor(r.hi));
        if (r.scale == Scale::Log) {
          const double u = uniform_real(rng, std::log(static_cast<double>(lo)), std::log(hi + 1.0));
          hp.set(name, std::min<std::int64_t>(hi, static_cast<std::int64_t>(std::floor(std::exp(u)))));
        } else {
          hp.set(name, lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1))));
        }
        continue;
      }
      if (r.scale == Scale::Log) {
        hp.set(name, std::exp(uniform_real(rng, std::log(r.lo), std::log(r.hi))));
      } else {
        hp.set(name, uniform_real(rng, r.lo, r.hi));
      }
    }
    return hp;
  }

  bool contains(const Hyperparameters& hp) const {
    if (hp.size() != domains_.size()) return false;
    for (const auto& [name, d] : domains_) {
      if (!hp.contains(name)) return false;
      const auto& v = hp.at(name);
      if (const auto* list = std::get_if<ValueList>(&d)) {
        bool found = false;
        for (const auto& candidate : list->values) found = found || candidate == v;
        if (!found) return false;
      } else {
        const auto& r = std::get<NumericRange>(d);
        if (!v.is_number() || v.as_double() < r.lo || v.as_double() > r.hi) return false;
        if (r.integral && !v.is_integral_number()) return false;
      }
    }
    return true;
  }

 private:
  ModelKind kind_ = ModelKind::DT;
  std::vector<std::pair<std::string, Domain>> domains_;
};

namespace detail {
inline ValueList values(std::initializer_list<ParamValue> v, Scale scale = Scale::Linear) {
  return ValueList{std::vector<ParamValue>(v), scale};
}
}  // namespace detail

// Built-in grids; each contains every best configuration the reference study
// reported for that model.
inline SearchSpace default_grid(ModelKind kind) {
  using detail::values;
  const auto none = ParamValue::none();
  switch (kind) {
    case ModelKind::XGB:
      return {kind,
              {{"colsample_bytree", values({0.3, 0.5, 0.7, 1.0})},
               {"learning_rate", values({0.01, 0.1, 0.3}, Scale::Log)},
               {"max_depth", values({3, 5, 7})},
               {"n_estimators", values({50, 100, 200})}}};
    case ModelKind::AdaBoost:
      return {kind,
              {{"algorithm", values({"SAMME"})},
               {"learning_rate", values({0.01, 0.1, 1.0}, Scale::Log)},
               {"n_estimators", values({50, 100, 200})}}};
    case ModelKind::RF:
      return {kind,
              {{"bootstrap", values({true, false})},
               {"max_depth", values({none, 2, 5, 10})},
               {"min_samples_leaf", values({1, 2})},
               {"min_samples_split", values({2, 5, 10})},
               {"n_estimators", values({50, 100, 200})}}};
    case ModelKind::GB:
      return {kind,
              {{"learning_rate", values({0.01, 0.1, 0.5, 1.0}, Scale::Log)},
               {"max_depth", values({3, 5})},
               {"n_estimators", values({50, 100, 200})}}};
    case ModelKind::DT:
      return {kind,
              {{"max_depth", values({none, 5})},
               {"max_features", values({none, "sqrt", "log2"})},
               {"min_samples_leaf", values({1, 2})},
               {"min_samples_split", values({2, 5})}}};
    case ModelKind::KNN:
      return {kind,
              {{"n_neighbors", values({3, 5, 7, 9})},
               {"p", values({1, 2})},
               {"weights", values({"uniform", "distance"})}}};
    case ModelKind::NB:
      return {kind, {{"var_smoothing", values({1e-9, 1e-7, 1e-5}, Scale::Log)}}};
    case ModelKind::SVM:
      return {kind,
              {{"C", values({0.1, 1.0, 10.0}, Scale::Log)},
               {"gamma", values({"scale"})},
               {"kernel", values({"linear", "rbf"})}}};
  }
  throw ConfigError("unknown model kind");
}

}  // namespace smelldetect
