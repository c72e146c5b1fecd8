#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "smelldetect/model.hpp"
#include "support.hpp"

using namespace smelldetect;

namespace {

LabeledDataset transformed(const LabeledDataset& ds, std::size_t column) {
  Matrix x = ds.features();
  for (std::size_t r = 0; r < x.rows(); ++r) x(r, column) = std::exp(x(r, column)) + 5.0;
  return LabeledDataset(ds.schema(), std::move(x), ds.labels());
}

Hyperparameters small_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::XGB: return {{"n_estimators", 10}, {"max_depth", 3}, {"colsample_bytree", 0.6}};
    case ModelKind::RF: return {{"n_estimators", 7}, {"max_features", "sqrt"}};
    case ModelKind::GB: return {{"n_estimators", 10}};
    case ModelKind::AdaBoost: return {{"n_estimators", 10}};
    default: return {};
  }
}

}  // namespace

TEST(Cart, GiniValues) {
  EXPECT_DOUBLE_EQ(gini_impurity(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(3, 0), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity(0, 0), 0.0);
}

TEST(Cart, SeparableStump) {
  const auto ds = sdtest::make_dataset({{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
  const auto m = fit_decision_tree(ds, CartParams{}, 0);
  EXPECT_EQ(m.tree().root().feature, 0);
  EXPECT_DOUBLE_EQ(m.tree().root().threshold, 2.5);
  EXPECT_EQ(m.tree().leaf_count(), 2u);
  for (std::size_t r = 0; r < ds.rows(); ++r) EXPECT_EQ(m.predict(ds.features().row(r)), ds.labels()[r]);
}

TEST(Cart, RootMatchesBruteForceStump) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<std::size_t> rows(4, 12), cols(1, 4);
  for (int t = 0; t < 400; ++t) {
    const auto ds = sdtest::random_dataset(gen, rows(gen), cols(gen), t % 2 == 0);
    const auto oracle = sdtest::brute_force_stump(ds);
    const auto m = fit_decision_tree(ds, CartParams{1, MaxFeatures::All, 2, 1}, 0);
    ASSERT_EQ(m.tree().root().feature, oracle.feature) << "case " << t;
    if (oracle.feature >= 0) {
      EXPECT_NEAR(m.tree().root().threshold, oracle.threshold, 1e-12);
    }
  }
}

TEST(Cart, PureTreeFitsTrainingData) {
  std::mt19937_64 gen(4);
  const auto ds = sdtest::random_dataset(gen, 80, 3);
  const auto m = fit_decision_tree(ds, CartParams{}, 0);
  for (std::size_t r = 0; r < ds.rows(); ++r) EXPECT_EQ(m.predict(ds.features().row(r)), ds.labels()[r]);
}

TEST(Knn, MatchesBruteForce) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> kk(1, 5);
  for (int t = 0; t < 200; ++t) {
    const auto train = sdtest::random_dataset(gen, 5 + static_cast<std::size_t>(t % 10), 2, t % 3 == 0);
    const KnnParams params{kk(gen), t % 2 == 0 ? 1 : 2, t % 4 < 2};
    const auto m = fit_knn(train, params);
    const auto queries = sdtest::random_dataset(gen, 5, 2, t % 3 == 0);
    for (std::size_t q = 0; q < queries.rows(); ++q) {
      const auto row = queries.features().row(q);
      const std::vector<double> qv(row.begin(), row.end());
      EXPECT_EQ(m.predict(row), sdtest::brute_force_knn(train, qv, params.n_neighbors, params.p, params.distance_weighted))
          << "case " << t;
    }
  }
}

TEST(Knn, SmallExamples) {
  const auto ds = sdtest::make_dataset({{0}, {1}, {10}}, {0, 0, 1});
  EXPECT_EQ(fit_knn(ds, {1, 2, false}).predict(std::vector<double>{9}), 1);
  EXPECT_EQ(fit_knn(ds, {3, 2, false}).predict(std::vector<double>{10}), 0);
  EXPECT_EQ(fit_knn(ds, {3, 2, true}).predict(std::vector<double>{10}), 1);
  EXPECT_DOUBLE_EQ(minkowski_distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}, 2), 5.0);
  EXPECT_DOUBLE_EQ(minkowski_distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}, 1), 7.0);
  EXPECT_THROW(fit_knn(ds, {4, 2, false}), ConfigError);
  EXPECT_THROW(fit_knn(ds, {1, 3, false}), ConfigError);
}

TEST(NaiveBayes, HandComputedDensities) {
  const auto ds = sdtest::make_dataset({{0}, {2}, {4}, {6}}, {0, 0, 1, 1});
  const auto m = fit_gaussian_nb(ds, {1e-9});
  const double eps = 1e-9 * 5.0;
  EXPECT_DOUBLE_EQ(m.means()[0][0], 1.0);
  EXPECT_DOUBLE_EQ(m.means()[1][0], 5.0);
  EXPECT_DOUBLE_EQ(m.variances()[0][0], 1.0 + eps);
  for (double q : {-1.0, 2.5, 3.7}) {
    for (int c = 0; c < 2; ++c) {
      const double mu = c == 0 ? 1.0 : 5.0;
      const double v = 1.0 + eps;
      const double hand = std::log(0.5) - 0.5 * std::log(2.0 * std::numbers::pi * v) - (q - mu) * (q - mu) / (2.0 * v);
      EXPECT_NEAR(m.joint_log_likelihood(std::vector<double>{q}, c), hand, 1e-12);
    }
  }
  EXPECT_EQ(m.predict(std::vector<double>{3.0}), 0);
  EXPECT_EQ(m.predict(std::vector<double>{3.0001}), 1);
}

TEST(NaiveBayes, ConstantFeaturesUsePrior) {
  const auto ds = sdtest::make_dataset({{1, 7}, {1, 7}, {1, 7}}, {1, 1, 0});
  const auto m = fit_gaussian_nb(ds, {1e-9});
  EXPECT_EQ(m.predict(std::vector<double>{1, 7}), 1);
  EXPECT_TRUE(std::isfinite(m.joint_log_likelihood(std::vector<double>{2, 7}, 0)));
  EXPECT_THROW(fit_gaussian_nb(sdtest::make_dataset({{1}, {2}}, {1, 1}), {1e-9}), DataError);
  EXPECT_THROW(fit_gaussian_nb(ds, {0.0}), ConfigError);
}

TEST(RandomForest, SingleFullTreeEqualsDecisionTree) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 20; ++t) {
    const auto ds = sdtest::random_dataset(gen, 40, 3);
    ForestParams fp{1, CartParams{std::nullopt, MaxFeatures::All, 2, 1}, false};
    const auto rf = fit_random_forest(ds, fp, 3);
    const auto dt = fit_decision_tree(ds, fp.tree, 3);
    EXPECT_EQ(rf.trees().front().to_json(), dt.tree().to_json());
  }
}

TEST(RandomForest, MajorityVote) {
  auto leaf = [](double v) { return Tree({TreeNode{-1, 0.0, -1, -1, v}}); };
  const std::vector<double> x{0.0};
  EXPECT_EQ(RandomForestModel({leaf(1), leaf(0), leaf(1)}).predict(x), 1);
  EXPECT_EQ(RandomForestModel({leaf(1), leaf(0), leaf(0)}).predict(x), 0);
  EXPECT_EQ(RandomForestModel({leaf(1), leaf(0)}).predict(x), 0);
}

TEST(AdaBoost, StageWeightAndNormalisation) {
  EXPECT_NEAR(samme_stage_weight(0.25, 1.0), std::log(3.0), 1e-15);
  const auto ds = sdtest::make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 1, 0});
  BoostingTrace trace;
  const auto m = fit_adaboost(ds, {1, 1.0}, &trace);
  ASSERT_EQ(m.stages().size(), 1u);
  EXPECT_NEAR(trace.stage_errors[0], 0.25, 1e-15);
  EXPECT_NEAR(m.stages()[0].alpha, std::log(3.0), 1e-12);

  std::mt19937_64 gen(12);
  const auto big = sdtest::random_dataset(gen, 60, 3);
  BoostingTrace t2;
  fit_adaboost(big, {30, 0.5}, &t2);
  ASSERT_FALSE(t2.weight_sums.empty());
  for (double s : t2.weight_sums) EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(GradientBoosting, InitialScoreAndMonotoneLoss) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>((i * 7) % 10)});
    y.push_back(i < 7 ? 1 : 0);
  }
  const auto ds = sdtest::make_dataset(rows, y);
  BoostingTrace trace;
  const auto m = fit_gradient_boosting(ds, {20, 0.1, 2}, &trace);
  EXPECT_NEAR(m.initial_score(), std::log(7.0 / 3.0), 1e-15);
  ASSERT_EQ(trace.losses.size(), 21u);
  for (std::size_t i = 1; i < trace.losses.size(); ++i) EXPECT_LE(trace.losses[i], trace.losses[i - 1] + 1e-12);

  const auto tiny = fit_gradient_boosting(ds, {5, 1e-12, 3});
  for (std::size_t r = 0; r < ds.rows(); ++r) EXPECT_EQ(tiny.predict(ds.features().row(r)), 1);
}

TEST(Xgb, LeafWeightsAndRegularisation) {
  const auto ds = sdtest::make_dataset({{0}, {1}}, {0, 1});
  const auto m = fit_xgb(ds, {1, 0.3, 1, 1.0, 1.0, 0.0}, 0);
  ASSERT_EQ(m.trees().size(), 1u);
  const auto& tree = m.trees().front();
  EXPECT_NEAR(tree.evaluate(std::vector<double>{0}), -0.4, 1e-15);
  EXPECT_NEAR(tree.evaluate(std::vector<double>{1}), 0.4, 1e-15);

  const auto heavy = fit_xgb(ds, {3, 0.3, 1, 1.0, 1e9, 0.0}, 0);
  for (const auto& t : heavy.trees()) {
    for (const auto& node : t.nodes()) {
      if (node.feature < 0) {
        EXPECT_LT(std::abs(node.value), 1e-8);
      }
    }
  }
  EXPECT_THROW(fit_xgb(ds, {1, 0.3, 1, 0.0, 1.0, 0.0}, 0), ConfigError);
  EXPECT_EQ(xgb_columns_per_tree(0.5, 5), 3u);
  EXPECT_EQ(xgb_columns_per_tree(0.01, 5), 1u);
}

TEST(Xgb, LossNonIncreasing) {
  std::mt19937_64 gen(2);
  const auto ds = sdtest::random_dataset(gen, 60, 4);
  BoostingTrace trace;
  fit_xgb(ds, {15, 0.3, 3, 1.0, 1.0, 0.0}, 0, &trace);
  for (std::size_t i = 1; i < trace.losses.size(); ++i) EXPECT_LE(trace.losses[i], trace.losses[i - 1] + 1e-12);
}

TEST(Svm, SeparableLinear) {
  const auto ds = sdtest::make_dataset({{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3, 4}}, {0, 0, 0, 1, 1, 1});
  SvmParams p;
  p.kernel = KernelKind::Linear;
  p.C = 10.0;
  const auto m = fit_svm(ds, p);
  EXPECT_TRUE(m.converged());
  for (std::size_t r = 0; r < ds.rows(); ++r) EXPECT_EQ(m.predict(ds.features().row(r)), ds.labels()[r]);
}

TEST(Svm, ScaleGamma) {
  EXPECT_DOUBLE_EQ(svm_scale_gamma(Matrix::from_rows({{0, 0}, {4, 4}})), 0.125);
  EXPECT_DOUBLE_EQ(svm_scale_gamma(Matrix::from_rows({{2, 2}, {2, 2}})), 1.0);
}

TEST(Svm, DualFeasibility) {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 10; ++t) {
    const auto ds = sdtest::random_dataset(gen, 50, 3);
    SvmParams p;
    p.C = 0.5 + t;
    const auto m = fit_svm(ds, p);
    double balance = 0.0;
    for (std::size_t i = 0; i < m.alphas().size(); ++i) {
      EXPECT_GE(m.alphas()[i], 0.0);
      EXPECT_LE(m.alphas()[i], p.C + 1e-12);
      balance += m.alphas()[i] * m.signs()[i];
    }
    EXPECT_NEAR(balance, 0.0, 1e-8);
  }
}

TEST(Models, PredictShapes) {
  std::mt19937_64 gen(1);
  const auto ds = sdtest::random_dataset(gen, 30, 3);
  for (auto kind : kAllModels) {
    const auto m = fit_model(kind, small_params(kind), ds, 0);
    EXPECT_TRUE(predict(m, Matrix(0, 3)).empty());
    EXPECT_THROW(predict(m, Matrix(2, 4)), DataError);
    EXPECT_THROW(m.predict_one(std::vector<double>{1, 2}), DataError);
    EXPECT_EQ(predict(m, ds.features()).size(), ds.rows());
  }
}

TEST(Models, DeterministicAndRoundTrip) {
  std::mt19937_64 gen(9);
  const auto ds = sdtest::random_dataset(gen, 60, 4);
  const auto dir = sdtest::scratch_dir("models");
  for (auto kind : kAllModels) {
    const auto a = fit_model(kind, small_params(kind), ds, 17);
    const auto b = fit_model(kind, small_params(kind), ds, 17);
    EXPECT_EQ(a.to_json(), b.to_json()) << to_string(kind);
    const auto path = dir / (std::string(to_string(kind)) + ".json");
    save_model(a, path);
    const auto back = load_model(path);
    EXPECT_EQ(back.to_json(), a.to_json()) << to_string(kind);
    EXPECT_EQ(predict(back, ds.features()), predict(a, ds.features())) << to_string(kind);
  }
}

TEST(Models, TreeModelsIgnoreMonotoneRescaling) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 30; ++t) {
    const auto ds = sdtest::random_dataset(gen, 50, 3);
    const auto tx = transformed(ds, static_cast<std::size_t>(t) % 3);
    for (auto kind : {ModelKind::DT, ModelKind::RF, ModelKind::AdaBoost, ModelKind::GB, ModelKind::XGB}) {
      // Out-of-bag rows may sit between a midpoint and its neighbour, so the
      // forest is checked on its own full sample.
      auto hp = small_params(kind);
      if (kind == ModelKind::RF) hp.set("bootstrap", false);
      const auto a = fit_model(kind, hp, ds, 4);
      const auto b = fit_model(kind, hp, tx, 4);
      EXPECT_EQ(predict(a, ds.features()), predict(b, tx.features())) << to_string(kind);
    }
  }
}

TEST(Models, UnknownParameterRejected) {
  const auto ds = sdtest::make_dataset({{0}, {1}}, {0, 1});
  EXPECT_THROW(fit_model(ModelKind::DT, {{"depth", 3}}, ds), ConfigError);
  EXPECT_THROW(fit_model(ModelKind::KNN, {{"n_neighbors", 0}}, ds), ConfigError);
}
