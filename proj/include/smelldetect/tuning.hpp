#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/cross_validation.hpp"
#include "smelldetect/dataset_io.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/gaussian_process.hpp"
#include "smelldetect/rng.hpp"
#include "smelldetect/search_space.hpp"

namespace smelldetect {

enum class SearchStrategy { None, Grid, Random, Bayes };

inline std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::None: return "none";
    case SearchStrategy::Grid: return "grid";
    case SearchStrategy::Random: return "random";
    case SearchStrategy::Bayes: return "bayes";
  }
  return "none";
}

inline std::optional<SearchStrategy> parse_strategy(std::string_view text) {
  const auto key = detail::fold_name(text);
  if (key == "none") return SearchStrategy::None;
  if (key == "grid") return SearchStrategy::Grid;
  if (key == "random") return SearchStrategy::Random;
  if (key == "bayes" || key == "bayesian") return SearchStrategy::Bayes;
  return std::nullopt;
}

struct Trial {
  Hyperparameters params;
  double mean = 0.0;
  std::vector<double> folds;
};

struct TuningResult {
  ModelKind kind = ModelKind::DT;
  SearchStrategy strategy = SearchStrategy::Grid;
  Hyperparameters best_params;
  double best_score = 0.0;
  std::vector<Trial> trials;
};

namespace detail {

// Best = highest mean; the earliest trial wins ties.
inline void finalise(TuningResult& result) {
  if (result.trials.empty()) throw NumericError("search evaluated no configurations");
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trials.size(); ++i) {
    if (result.trials[i].mean > result.trials[best].mean) best = i;
  }
  result.best_params = result.trials[best].params;
  result.best_score = result.trials[best].mean;
}

inline std::vector<Trial> evaluate_all(const std::vector<Hyperparameters>& configs, const Evaluator& objective,
                                       unsigned threads) {
  // Identical configurations are evaluated once; the objective is deterministic.
  std::map<std::string, std::size_t> first_index;
  std::vector<std::size_t> source(configs.size());
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto [it, inserted] = first_index.emplace(configs[i].to_string(), unique.size());
    if (inserted) unique.push_back(i);
    source[i] = it->second;
  }
  std::vector<CvScore> scores(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t k) { scores[k] = objective(configs[unique[k]]); });
  std::vector<Trial> trials;
  trials.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& s = scores[source[i]];
    trials.push_back({configs[i], s.mean, s.folds});
  }
  return trials;
}

}  // namespace detail

// Exhaustive search over the Cartesian product of value lists.
inline TuningResult grid_search(const SearchSpace& space, const Evaluator& objective, unsigned threads = 1) {
  if (!space.enumerable()) throw ConfigError("grid search needs every domain to be a value list");
  TuningResult result{space.kind(), SearchStrategy::Grid, {}, 0.0, {}};
  result.trials = detail::evaluate_all(space.enumerate(), objective, threads);
  detail::finalise(result);
  return result;
}

inline TuningResult grid_search(const SearchSpace& space, const LabeledDataset& train, const CvConfig& cv) {
  return grid_search(space, cv_evaluator(space.kind(), train, cv), cv.threads);
}

// n_trials independent draws with replacement.
inline TuningResult random_search(const SearchSpace& space, const Evaluator& objective, int n_trials,
                                  std::uint64_t seed, unsigned threads = 1) {
  if (n_trials < 1) throw ConfigError("random search needs at least one trial");
  auto rng = make_rng(seed);
  std::vector<Hyperparameters> configs;
  for (int t = 0; t < n_trials; ++t) configs.push_back(space.sample(rng));
  TuningResult result{space.kind(), SearchStrategy::Random, {}, 0.0, {}};
  result.trials = detail::evaluate_all(configs, objective, threads);
  detail::finalise(result);
  return result;
}

inline TuningResult random_search(const SearchSpace& space, const LabeledDataset& train, const CvConfig& cv,
                                  int n_trials, std::uint64_t seed) {
  return random_search(space, cv_evaluator(space.kind(), train, cv), n_trials, seed, cv.threads);
}

struct BayesOptions {
  int initial_design = 5;
  int candidates = 512;
};

// GP-based sequential model-based optimisation with expected improvement.
// Starts from `initial_design` distinct random configurations, then at every
// step scores `candidates` fresh random configurations under the surrogate and
// evaluates the best one. Configurations are never evaluated twice; a finite
// space stops early once every configuration has been tried.
inline TuningResult bayesian_search(const SearchSpace& space, const Evaluator& objective, int n_trials,
                                    std::uint64_t seed, unsigned threads = 1, const BayesOptions& options = {}) {
  if (n_trials <= options.initial_design) {
    throw ConfigError("Bayesian search needs more than " + std::to_string(options.initial_design) +
                      " trials (the initial design)");
  }
  const bool finite = space.enumerable();
  const std::size_t card = finite ? space.cardinality() : 0;
  auto rng = make_rng(seed);
  std::map<std::string, bool> seen;
  auto fresh = [&](const Hyperparameters& hp) { return !seen.contains(hp.to_string()); };

  std::vector<Hyperparameters> initial;
  if (finite && card <= static_cast<std::size_t>(options.initial_design)) {
    initial = space.enumerate();
  } else {
    for (int attempt = 0; attempt < 1000 && static_cast<int>(initial.size()) < options.initial_design; ++attempt) {
      auto hp = space.sample(rng);
      if (!fresh(hp)) continue;
      seen[hp.to_string()] = true;
      initial.push_back(std::move(hp));
    }
  }
  for (const auto& hp : initial) seen[hp.to_string()] = true;

  TuningResult result{space.kind(), SearchStrategy::Bayes, {}, 0.0, {}};
  result.trials = detail::evaluate_all(initial, objective, threads);

  const ParamEncoder encoder(space);
  while (static_cast<int>(result.trials.size()) < n_trials) {
    if (finite && seen.size() >= card) break;
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    double best = result.trials.front().mean;
    for (const auto& t : result.trials) {
      xs.push_back(encoder.encode(t.params));
      ys.push_back(t.mean);
      best = std::max(best, t.mean);
    }
    const GaussianProcess gp(std::move(xs), ys);

    std::vector<Hyperparameters> pool;
    for (int c = 0; c < options.candidates; ++c) {
      auto hp = space.sample(rng);
      if (fresh(hp)) pool.push_back(std::move(hp));
    }
    if (pool.empty() && finite) {
      for (auto& hp : space.enumerate()) {
        if (fresh(hp)) pool.push_back(std::move(hp));
      }
    }
    if (pool.empty()) break;

    std::size_t pick = 0;
    double pick_ei = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      const auto [mean, sd] = gp.predict(encoder.encode(pool[c]));
      const double ei = expected_improvement(mean, sd, best);
      if (ei > pick_ei) {
        pick_ei = ei;
        pick = c;
      }
    }
    seen[pool[pick].to_string()] = true;
    const auto score = objective(pool[pick]);
    result.trials.push_back({pool[pick], score.mean, score.folds});
  }
  detail::finalise(result);
  return result;
}

inline TuningResult bayesian_search(const SearchSpace& space, const LabeledDataset& train, const CvConfig& cv,
                                    int n_trials, std::uint64_t seed) {
  return bayesian_search(space, cv_evaluator(space.kind(), train, cv), n_trials, seed, cv.threads);
}

// One row per trial: index, every parameter in space order, per-fold scores, mean.
inline std::string ledger_csv(const TuningResult& result, const SearchSpace& space) {
  std::string out = "trial";
  for (const auto& [name, _] : space.domains()) out += "," + detail::csv_escape(name);
  const std::size_t folds = result.trials.empty() ? 0 : result.trials.front().folds.size();
  for (std::size_t f = 0; f < folds; ++f) out += ",fold_" + std::to_string(f + 1);
  out += ",mean\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    out += std::to_string(i);
    for (const auto& [name, _] : space.domains()) out += "," + detail::csv_escape(t.params.at(name).to_string());
    for (double s : t.folds) out += "," + detail::format_number(s);
    out += "," + detail::format_number(t.mean) + "\n";
  }
  return out;
}

inline nlohmann::json params_json(const Hyperparameters& hp) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : hp) {
    if (v.is_none()) j[k] = nullptr;
    else if (v.is_bool()) j[k] = v.as_bool();
    else if (v.is_int()) j[k] = v.as_int();
    else if (v.is_double()) j[k] = v.as_double();
    else j[k] = v.as_string();
  }
  return j;
}

inline nlohmann::json ledger_json(const TuningResult& result) {
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    trials.push_back({{"trial", i}, {"params", params_json(t.params)}, {"folds", t.folds}, {"mean", t.mean}});
  }
  return {{"model", std::string(to_string(result.kind))},
          {"strategy", std::string(to_string(result.strategy))},
          {"best_params", params_json(result.best_params)},
          {"best_score", result.best_score},
          {"trials", trials}};
}

}  // namespace smelldetect
