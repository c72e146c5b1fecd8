#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

enum class ModelKind { KNN, NB, XGB, AdaBoost, RF, GB, DT, SVM };

// Report order.
inline constexpr std::array<ModelKind, 8> kAllModels = {
    ModelKind::KNN, ModelKind::NB, ModelKind::XGB, ModelKind::AdaBoost,
    ModelKind::RF,  ModelKind::GB, ModelKind::DT,  ModelKind::SVM};

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::KNN: return "KNN";
    case ModelKind::NB: return "NB";
    case ModelKind::XGB: return "XGB";
    case ModelKind::AdaBoost: return "AdaBoost";
    case ModelKind::RF: return "RF";
    case ModelKind::GB: return "GB";
    case ModelKind::DT: return "DT";
    case ModelKind::SVM: return "SVM";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model(std::string_view text) {
  auto key = detail::fold_name(text);
  if (key == "ab" || key == "ada") key = "adaboost";
  if (key == "svc") key = "svm";
  if (key == "xgboost") key = "xgb";
  for (auto kind : kAllModels) {
    if (detail::fold_name(to_string(kind)) == key) return kind;
  }
  return std::nullopt;
}

inline std::string valid_model_names() {
  std::string out;
  for (auto kind : kAllModels) {
    if (!out.empty()) out += ", ";
    out += to_string(kind);
  }
  return out;
}

// A single hyperparameter value. monostate is Python's None.
class ParamValue {
 public:
  using Storage = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

  ParamValue() = default;
  ParamValue(std::monostate) {}
  ParamValue(bool v) : v_(v) {}
  ParamValue(int v) : v_(static_cast<std::int64_t>(v)) {}
  ParamValue(std::int64_t v) : v_(v) {}
  ParamValue(double v) : v_(v) {}
  ParamValue(const char* v) : v_(std::string(v)) {}
  ParamValue(std::string v) : v_(std::move(v)) {}

  static ParamValue none() { return {}; }

  bool is_none() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_double() const { return std::holds_alternative<double>(v_); }
  bool is_number() const { return is_int() || is_double(); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }

  bool as_bool() const { return std::get<bool>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  double as_double() const {
    return is_int() ? static_cast<double>(std::get<std::int64_t>(v_)) : std::get<double>(v_);
  }
  std::int64_t as_int() const {
    if (is_int()) return std::get<std::int64_t>(v_);
    return static_cast<std::int64_t>(std::llround(std::get<double>(v_)));
  }
  bool is_integral_number() const {
    return is_int() || (is_double() && std::get<double>(v_) == std::floor(std::get<double>(v_)));
  }

  const Storage& storage() const { return v_; }

  // Python-flavoured rendering: None, True/False, 1.0, 1e-09, linear.
  std::string to_string() const {
    if (is_none()) return "None";
    if (is_bool()) return as_bool() ? "True" : "False";
    if (is_int()) return std::to_string(std::get<std::int64_t>(v_));
    if (is_string()) return as_string();
    const double d = std::get<double>(v_);
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }

  // Parses Table-style literals: None, True/False, integers, reals, bare words.
  static ParamValue parse(std::string_view text) {
    auto s = detail::trim(text);
    if (s == "None" || s == "none" || s == "null") return none();
    auto low = detail::lower(s);
    if (low == "true") return true;
    if (low == "false") return false;
    std::int64_t i = 0;
    auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ei == std::errc{} && pi == s.data() + s.size()) return i;
    double d = 0.0;
    auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ed == std::errc{} && pd == s.data() + s.size()) return d;
    return s;
  }

  // Numbers compare by value across int/double, so C=10 equals C=10.0.
  friend bool operator==(const ParamValue& a, const ParamValue& b) {
    if (a.is_number() && b.is_number()) return a.as_double() == b.as_double();
    return a.v_ == b.v_;
  }

 private:
  Storage v_;
};

// Named hyperparameters, iterated in name order (the order reports print).
class Hyperparameters {
 public:
  Hyperparameters() = default;
  Hyperparameters(std::initializer_list<std::pair<const std::string, ParamValue>> init)
      : values_(init) {}

  void set(const std::string& name, ParamValue value) { values_[name] = std::move(value); }
  bool contains(const std::string& name) const { return values_.contains(name); }
  const ParamValue& at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("missing hyperparameter '" + name + "'");
    return it->second;
  }
  std::size_t size() const { return values_.size(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  // "a=1, b=None" in name order.
  std::string to_string() const {
    std::string out;
    for (const auto& [k, v] : values_) {
      if (!out.empty()) out += ", ";
      out += k + "=" + v.to_string();
    }
    return out;
  }

  static Hyperparameters parse(std::string_view text) {
    Hyperparameters hp;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      auto item = detail::trim(text.substr(pos, comma - pos));
      pos = comma + 1;
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("expected name=value, got '" + item + "'");
      hp.set(detail::trim(std::string_view(item).substr(0, eq)),
             ParamValue::parse(std::string_view(item).substr(eq + 1)));
    }
    return hp;
  }

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;

 private:
  std::map<std::string, ParamValue> values_;
};

}  // namespace smelldetect
