// Acceptance checks. One line per criterion: PASS, FAIL or SKIP.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "smelldetect/experiment.hpp"
#include "support.hpp"

using namespace smelldetect;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }

std::string num(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Lognormal metrics with a modest positive shift on a third of the columns, so
// classes overlap and trees grow to realistic depth.
LabeledDataset stand_in(std::size_t pos, std::size_t neg, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::lognormal_distribution<double> base(1.0, 0.7);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    const int y = i < pos ? 1 : 0;
    std::vector<double> r(d);
    for (std::size_t c = 0; c < d; ++c) {
      r[c] = std::round(base(gen) * 100.0) / 100.0;
      if (y == 1 && c % 3 == 0) r[c] *= 1.6;
    }
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  // Interleave classes so row order carries no signal.
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<std::vector<double>> shuffled_rows;
  std::vector<int> shuffled_labels;
  for (auto i : order) {
    shuffled_rows.push_back(rows[i]);
    shuffled_labels.push_back(labels[i]);
  }
  return sdtest::make_dataset(shuffled_rows, shuffled_labels);
}

struct StandIn {
  SmellKind smell;
  std::size_t pos, neg, features;
};

constexpr StandIn kStandIns[] = {
    {SmellKind::GodClass, 140, 280, 60},         {SmellKind::DataClass, 140, 280, 60},
    {SmellKind::FeatureEnvy, 140, 280, 80},      {SmellKind::LongMethod, 140, 280, 80},
    {SmellKind::LongParameterList, 138, 282, 80}, {SmellKind::SwitchStatements, 129, 291, 80},
};

RawConfig stand_in_config(const fs::path& dir, const std::vector<SmellKind>& smells) {
  RawConfig raw;
  std::vector<std::string> names;
  for (const auto& s : kStandIns) {
    if (std::find(smells.begin(), smells.end(), s.smell) == smells.end()) continue;
    const auto path = dir / (std::string(to_string(s.smell)) + ".arff");
    if (!fs::exists(path)) {
      sdtest::write_text(path, sdtest::to_arff(stand_in(s.pos, s.neg, s.features, 100 + smell_index(s.smell))));
    }
    raw.datasets[std::string(to_string(s.smell))] = path.string();
    names.emplace_back(to_string(s.smell));
  }
  raw.smells = names;
  raw.seed = 1;
  raw.out_dir = (dir / "out").string();
  return raw;
}

Outcome pipeline_counts() {
  const auto dir = sdtest::scratch_dir("acc-counts");
  auto raw = stand_in_config(dir, {SmellKind::GodClass, SmellKind::LongParameterList, SmellKind::SwitchStatements});
  raw.models = std::vector<std::string>{"DT"};
  const auto result = run_experiment(require_valid(raw), false);
  const std::size_t expected[3][3] = {{280, 392, 168}, {282, 394, 170}, {291, 407, 175}};
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = result.smells[i];
    detail += (i ? ", " : "") + std::string(to_string(s.smell)) + " " + std::to_string(s.balanced.positives) + "/" +
              std::to_string(s.balanced.negatives) + " -> " + std::to_string(s.train_rows) + "/" +
              std::to_string(s.test_rows);
    ok = ok && s.balanced.positives == expected[i][0] && s.balanced.negatives == expected[i][0] &&
         s.train_rows == expected[i][1] && s.test_rows == expected[i][2];
  }
  return ok ? pass(detail) : fail(detail);
}

Outcome table_one() {
  std::size_t found = 0;
  std::string missing;
  for (const auto& row : reference_data::kBestConfigs) {
    if (default_grid(row.model).contains(Hyperparameters::parse(row.params))) ++found;
    else missing += " " + std::string(to_string(row.smell)) + "/" + std::string(to_string(row.model));
  }
  const std::string d = std::to_string(found) + "/" + std::to_string(reference_data::kBestConfigs.size()) +
                        " published configurations inside the default grids" + missing;
  return found == reference_data::kBestConfigs.size() ? pass(d) : fail(d);
}

// Real datasets are looked up by file stem, e.g. god-class.arff or GodClass.csv.
std::map<SmellKind, fs::path> find_real_datasets(const fs::path& dir) {
  std::map<SmellKind, fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (ext != ".arff" && ext != ".csv") continue;
    if (auto s = parse_smell(e.path().stem().string())) out[*s] = e.path();
  }
  return out;
}

Outcome headline_metrics() {
  const char* env = std::getenv("SMELLDETECT_DATA_DIR");
  if (!env) return {Verdict::Skip, "set SMELLDETECT_DATA_DIR to a directory holding the six smell datasets"};
  const auto found = find_real_datasets(env);
  if (found.size() < 6) {
    return {Verdict::Skip, std::to_string(found.size()) + " of 6 smell datasets found under " + std::string(env)};
  }
  RawConfig raw;
  for (const auto& [s, p] : found) raw.datasets[std::string(to_string(s))] = p.string();
  raw.models = std::vector<std::string>{"all"};
  raw.search = "grid";
  raw.seed = 0;
  raw.out_dir = (sdtest::scratch_dir("acc-headline") / "out").string();
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(require_valid(raw));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool ok = secs <= 600.0;
  std::string d;
  for (const auto& p : result.pairs) {
    const double acc = 100.0 * p.metrics.accuracy;
    double floor = -1.0;
    if (p.smell == SmellKind::GodClass && p.model == ModelKind::GB) floor = 95.0;
    if (p.smell == SmellKind::LongMethod) floor = 95.0;
    if (p.smell == SmellKind::LongParameterList && p.model == ModelKind::GB) floor = 88.0;
    if (floor < 0) continue;
    ok = ok && acc >= floor;
    d += std::string(to_string(p.smell)) + "/" + std::string(to_string(p.model)) + " " + num(acc) + "% (>= " +
         num(floor, 0) + "), ";
  }
  d += "sweep " + num(secs, 1) + " s";
  return ok ? pass(d) : fail(d);
}

Outcome sweep_runtime() {
  const auto dir = sdtest::scratch_dir("acc-sweep");
  std::vector<SmellKind> all(kAllSmells.begin(), kAllSmells.end());
  auto raw = stand_in_config(dir, all);
  raw.models = std::vector<std::string>{"all"};
  raw.search = "grid";
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(require_valid(raw));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t trials = 0;
  for (const auto& p : result.pairs) trials += p.tuning ? p.tuning->trials.size() : 0;
  const std::string d = "8x6 grid sweep on synthetic stand-ins of the published sizes: " + num(secs, 1) + " s, " +
                        std::to_string(trials) + " configurations (limit 600 s)";
  return secs <= 600.0 && result.pairs.size() == 48 ? pass(d) : fail(d);
}

Outcome oracle_suite() {
  std::mt19937_64 gen(2024);
  std::vector<std::string> failures;

  std::size_t stumps = 0;
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::size_t d = 1; d <= 4; ++d) {
      for (int rep = 0; rep < 40; ++rep) {
        const auto ds = sdtest::random_dataset(gen, n, d, rep % 2 == 0);
        const auto oracle = sdtest::brute_force_stump(ds);
        const auto m = fit_decision_tree(ds, CartParams{1, MaxFeatures::All, 2, 1}, 0);
        const auto& root = m.tree().root();
        const bool same = root.feature == oracle.feature &&
                          (oracle.feature < 0 || std::abs(root.threshold - oracle.threshold) <= 1e-12);
        if (!same) failures.push_back("stump n=" + std::to_string(n));
        ++stumps;
      }
    }
  }

  std::uniform_int_distribution<int> kk(1, 5);
  for (int t = 0; t < 200; ++t) {
    const auto train = sdtest::random_dataset(gen, 5, 2, t % 2 == 0);
    const KnnParams p{kk(gen), t % 3 == 0 ? 1 : 2, t % 4 == 0};
    const auto m = fit_knn(train, p);
    const auto q = sdtest::random_dataset(gen, 3, 2, t % 2 == 0);
    for (std::size_t r = 0; r < q.rows(); ++r) {
      const auto row = q.features().row(r);
      if (m.predict(row) != sdtest::brute_force_knn(train, {row.begin(), row.end()}, p.n_neighbors, p.p,
                                                    p.distance_weighted)) {
        failures.push_back("knn case " + std::to_string(t));
      }
    }
  }

  for (auto kind : {ModelKind::KNN, ModelKind::DT, ModelKind::NB}) {
    const auto ds = sdtest::random_dataset(gen, 50, 3);
    const CvConfig cv{5, 7, 1};
    const auto space = default_grid(kind);
    const auto r = grid_search(space, ds, cv);
    double best = -1.0;
    std::string best_params;
    for (const auto& hp : space.enumerate()) {
      const double s = cross_validate(kind, hp, ds, cv).mean;
      if (s > best) {
        best = s;
        best_params = hp.to_string();
      }
    }
    if (r.best_score != best || r.best_params.to_string() != best_params) {
      failures.push_back("grid " + std::string(to_string(kind)));
    }
  }

  double worst = 0.0;
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = nd(gen);
      y[i] = (t % 5) * 0.3 * x[i] + nd(gen);
    }
    worst = std::max(worst, std::abs(pearson_correlation(x, y) - sdtest::closed_form_pearson(x, y)));
  }
  if (worst > 1e-12) failures.push_back("pearson error " + std::to_string(worst));

  std::uniform_int_distribution<std::size_t> cell(0, 50);
  for (int t = 0; t < 20; ++t) {
    const ConfusionMatrix cm{cell(gen), cell(gen), cell(gen), cell(gen) + 1};
    const auto r = metrics(cm);
    const auto h = sdtest::hand_metrics(cm.tp, cm.fp, cm.fn, cm.tn);
    if (r.accuracy != h.accuracy || r.precision != h.precision || r.recall != h.recall || r.f1 != h.f1) {
      failures.push_back("metrics case " + std::to_string(t));
    }
  }

  std::string d = std::to_string(stumps) + " stumps, 200 knn problems, 3 grids, 500 correlations (max error " +
                  num(worst * 1e15, 3) + "e-15), 20 confusion matrices";
  if (!failures.empty()) return fail(d + "; first failure: " + failures.front());
  return pass(d);
}

Outcome numerical_invariants() {
  std::mt19937_64 gen(77);
  std::size_t loss_checks = 0;
  std::size_t svm_runs = 0;
  double worst_balance = 0.0;
  std::vector<std::string> failures;
  for (int t = 0; t < 50; ++t) {
    const auto ds = sdtest::random_dataset(gen, 20 + static_cast<std::size_t>(t % 20), 2 + t % 3);
    BoostingTrace gb;
    fit_gradient_boosting(ds, {30, 0.5, 3}, &gb);
    BoostingTrace xgb;
    fit_xgb(ds, {30, 0.3, 4, 0.7, 1.0, 0.0}, static_cast<std::uint64_t>(t), &xgb);
    for (const auto* trace : {&gb, &xgb}) {
      for (std::size_t i = 1; i < trace->losses.size(); ++i) {
        ++loss_checks;
        if (trace->losses[i] > trace->losses[i - 1] + 1e-12) failures.push_back("loss rose, case " + std::to_string(t));
      }
    }
    for (auto kernel : {KernelKind::Linear, KernelKind::Rbf}) {
      SvmParams p;
      p.kernel = kernel;
      p.C = 0.1 * (1 + t % 7);
      const auto m = fit_svm(ds, p);
      double balance = 0.0;
      for (std::size_t i = 0; i < m.alphas().size(); ++i) {
        if (m.alphas()[i] < 0.0 || m.alphas()[i] > p.C) failures.push_back("alpha out of box");
        balance += m.alphas()[i] * m.signs()[i];
      }
      worst_balance = std::max(worst_balance, std::abs(balance));
      ++svm_runs;
    }
  }
  if (worst_balance > 1e-6) failures.push_back("sum alpha*y " + std::to_string(worst_balance));

  std::size_t synthetic = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ds = sdtest::counts_dataset(8 + seed % 20, 60, 3, seed);
    const auto out = smote_oversample(ds, {5, seed});
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      double lo = 1e300, hi = -1e300;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        if (ds.labels()[r] == 1) {
          lo = std::min(lo, ds.features()(r, c));
          hi = std::max(hi, ds.features()(r, c));
        }
      }
      for (std::size_t r = ds.rows(); r < out.rows(); ++r) {
        if (out.features()(r, c) < lo || out.features()(r, c) > hi) failures.push_back("smote outside box");
      }
    }
    synthetic += out.rows() - ds.rows();
  }

  std::size_t rounds = 0;
  for (int t = 0; t < 20; ++t) {
    const auto ds = sdtest::random_dataset(gen, 40, 2);
    BoostingTrace trace;
    fit_adaboost(ds, {50, 1.0}, &trace);
    for (double s : trace.weight_sums) {
      ++rounds;
      if (std::abs(s - 1.0) > 1e-9) failures.push_back("adaboost weight sum " + std::to_string(s));
    }
  }

  const std::string d = std::to_string(loss_checks) + " boosting rounds, " + std::to_string(svm_runs) +
                        " SVM fits (max |sum alpha*y| " + num(worst_balance * 1e9, 3) + "e-9), " +
                        std::to_string(synthetic) + " synthetic rows over 100 SMOTE runs, " + std::to_string(rounds) +
                        " AdaBoost rounds";
  return failures.empty() ? pass(d) : fail(d + "; first failure: " + failures.front());
}

Outcome bayes_benchmark() {
  const SearchSpace space(ModelKind::DT, {{"x", NumericRange{0.0, 1.0}}});
  auto objective = [](const Hyperparameters& hp) {
    const double x = hp.at("x").as_double();
    return CvScore{-(x - 0.3) * (x - 0.3), {}};
  };
  double grid_best = 0.0;
  double grid_value = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const double x = i / 999.0;
    if (objective({{"x", x}}).mean > grid_value) {
      grid_value = objective({{"x", x}}).mean;
      grid_best = x;
    }
  }
  int hits = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = bayesian_search(space, objective, 25, seed);
    const double err = std::abs(r.best_params.at("x").as_double() - grid_best);
    worst = std::max(worst, err);
    hits += err <= 0.05 ? 1 : 0;
  }
  const std::string d = std::to_string(hits) + "/20 seeds within 0.05 of the dense-grid optimum " + num(grid_best, 4) +
                        " (worst distance " + num(worst, 4) + ")";
  return hits >= 18 ? pass(d) : fail(d);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SMELLDETECT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  const auto dir = sdtest::scratch_dir("acc-determinism");
  const auto raw = stand_in_config(dir, {SmellKind::GodClass, SmellKind::SwitchStatements});
  std::string data;
  std::string smells;
  for (const auto& [smell, path] : raw.datasets) {
    data += " --dataset " + smell + "=" + path;
    smells += " --smell " + smell;
  }
  std::size_t files = 0;
  for (std::string mode : {"paper-faithful", "sound"}) {
    for (std::string search : {"none", "random", "bayes"}) {
      const std::string common = "run" + smells + " --models all" + data + " --seed 5 --trials 6 --search " + search +
                                 " --mode " + mode + " --threads 1 --out ";
      const auto a = dir / (mode + "-" + search + "-a");
      const auto b = dir / (mode + "-" + search + "-b");
      if (run_cli(common + a.string()) != 0 || run_cli(common + b.string()) != 0) {
        return fail("run exited non-zero for mode=" + mode + " search=" + search);
      }
      const auto ca = tree_contents(a);
      if (ca != tree_contents(b)) return fail("outputs differ for mode=" + mode + " search=" + search);
      files += ca.size();
    }
  }
  return pass("6 repeated CLI runs (2 modes x 3 strategies, 2 smells x 8 models), " + std::to_string(files) +
              " files byte-identical");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"pipeline-count reproduction", pipeline_counts},
      {"table-1 containment", table_one},
      {"headline-metric reproduction", headline_metrics},
      {"full-sweep runtime", sweep_runtime},
      {"oracle equivalence suite", oracle_suite},
      {"numerical invariants", numerical_invariants},
      {"bayesian-optimizer benchmark", bayes_benchmark},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    failed += o.verdict == Verdict::Fail ? 1 : 0;
    std::cout << tag << "  " << name << ": " << o.detail << " [" << num(secs, 1) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
