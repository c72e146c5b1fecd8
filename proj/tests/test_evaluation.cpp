#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "smelldetect/report.hpp"
#include "support.hpp"

using namespace smelldetect;

namespace {

MetricsReport labelled(const ConfusionMatrix& cm, SmellKind smell, ModelKind model, bool tuned) {
  auto r = metrics(cm);
  r.smell = smell;
  r.model = model;
  r.tuned = tuned;
  return r;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion(std::vector<int>{1, 1, 0}, std::vector<int>{1, 1, 0}), (ConfusionMatrix{2, 0, 0, 1}));
  EXPECT_EQ(confusion(std::vector<int>{1, 0}, std::vector<int>{0, 1}), (ConfusionMatrix{0, 1, 1, 0}));
  const std::vector<int> y{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<int> p{1, 1, 1, 0, 0, 1, 0, 0, 0, 0};
  EXPECT_EQ(confusion(y, p), (ConfusionMatrix{3, 1, 2, 4}));
  EXPECT_THROW(confusion(y, std::vector<int>{1}), DataError);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), DataError);
}

TEST(Metrics, HandValues) {
  const auto r = metrics({3, 1, 2, 4});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.6);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-15);
  const auto perfect = metrics({5, 0, 0, 5});
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
}

TEST(Metrics, DegenerateRatios) {
  const auto r = metrics({0, 0, 3, 7});
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_TRUE(r.precision_degenerate);
  EXPECT_FALSE(r.recall_degenerate);
  EXPECT_TRUE(r.f1_degenerate);
  EXPECT_THROW(metrics({0, 0, 0, 0}), DataError);
}

TEST(Metrics, RandomMatricesMatchHand) {
  std::mt19937_64 gen(44);
  std::uniform_int_distribution<std::size_t> cell(0, 30);
  for (int t = 0; t < 20; ++t) {
    ConfusionMatrix cm{cell(gen), cell(gen), cell(gen), cell(gen) + 1};
    const auto r = metrics(cm);
    const auto h = sdtest::hand_metrics(cm.tp, cm.fp, cm.fn, cm.tn);
    EXPECT_EQ(r.accuracy, h.accuracy);
    EXPECT_EQ(r.precision, h.precision);
    EXPECT_EQ(r.recall, h.recall);
    EXPECT_EQ(r.f1, h.f1);
    if (!r.precision_degenerate && !r.recall_degenerate && !r.f1_degenerate) {
      EXPECT_LE(r.f1, std::max(r.precision, r.recall) + 1e-15);
      EXPECT_GE(r.f1, std::min(r.precision, r.recall) - 1e-15);
    }
    const auto swapped = metrics({cm.tn, cm.fn, cm.fp, cm.tp});
    EXPECT_EQ(swapped.accuracy, r.accuracy);
  }
  const auto asym = metrics({3, 1, 2, 4});
  const auto flip = metrics({4, 2, 1, 3});
  EXPECT_NE(asym.precision, flip.precision);
  EXPECT_NE(asym.recall, flip.recall);
}

TEST(Metrics, SelfPredictionIsPerfect) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> y(15);
    for (auto& v : y) v = static_cast<int>(gen() % 2);
    y[0] = 1;
    const auto r = metrics(confusion(y, y));
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
  }
}

TEST(Reference, PublishedValues) {
  EXPECT_EQ(reference_metrics(SmellKind::GodClass, ModelKind::GB, true), (MetricRow{99, 99, 100, 99}));
  const auto nb = reference_metrics(SmellKind::DataClass, ModelKind::NB, true);
  EXPECT_EQ(nb[1], 67.0);
  EXPECT_EQ(nb[2], 99.0);
  EXPECT_EQ(reference_metrics(SmellKind::LongMethod, ModelKind::KNN, false)[0], 99.0);
  EXPECT_EQ(reference_metrics(SmellKind::SwitchStatements, ModelKind::DT, true)[3], 97.0);
  for (std::size_t s = 0; s < 6; ++s) {
    EXPECT_EQ(reference_data::kProposedGb[s], reference_data::kTuned[model_index(ModelKind::GB)][s]);
  }
  EXPECT_EQ(print_reference("LongMethod", "KNN", false), "LongMethod KNN untuned: Acc 99.00 Prec 99.00 Rec 100.00 F1 99.00");
  EXPECT_THROW(print_reference("GodKlass", "GB", true), ConfigError);
  EXPECT_THROW(print_reference("GodClass", "MLP", true), ConfigError);
}

TEST(Reference, ComparisonDeltas) {
  const auto r = labelled({99, 1, 0, 100}, SmellKind::GodClass, ModelKind::GB, true);
  const auto c = compare_to_reference(r);
  EXPECT_NEAR(c.delta[0], 99.5 - 99.0, 1e-12);
  EXPECT_NEAR(c.delta[2], 0.0, 1e-12);
  auto exact = c;
  exact.observed = exact.reference;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(exact.observed[k] - exact.reference[k], 0.0);
  MetricsReport bare = metrics({1, 0, 0, 1});
  EXPECT_THROW(compare_to_reference(bare), ConfigError);
}

TEST(Report, CsvSingleRow) {
  const auto row = make_report_row(labelled({3, 1, 2, 4}, SmellKind::FeatureEnvy, ModelKind::RF, false));
  const auto csv = render_report({row}, ReportFormat::Csv);
  EXPECT_EQ(line_count(csv), 2u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "smell,model,tuned,tp,fp,fn,tn,acc_obs,acc_ref,acc_delta,prec_obs,prec_ref,prec_delta,"
            "rec_obs,rec_ref,rec_delta,f1_obs,f1_ref,f1_delta");
  EXPECT_NE(csv.find("FeatureEnvy,RF,false,3,1,2,4,70.00,96.00,-26.00,75.00,94.00,-19.00"), std::string::npos);
  EXPECT_THROW(render_report({}, ReportFormat::Csv), ConfigError);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
  EXPECT_THROW(render_report({row}, "pdf"), ConfigError);
}

TEST(Report, FullMarkdownOrderAndDeterminism) {
  std::vector<ReportRow> rows;
  for (auto it = kAllModels.rbegin(); it != kAllModels.rend(); ++it) {
    for (auto s : kAllSmells) rows.push_back(make_report_row(labelled({10, 2, 1, 12}, s, *it, true)));
  }
  const auto md = render_report(rows, ReportFormat::Markdown, "banner");
  EXPECT_EQ(md, render_report(rows, ReportFormat::Markdown, "banner"));
  std::vector<std::string> data;
  std::istringstream in(md);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("| ", 0) == 0 && line.rfind("| smell", 0) != 0) data.push_back(line);
  }
  ASSERT_EQ(data.size(), 48u);
  EXPECT_EQ(data.front().rfind("| GodClass | KNN |", 0), 0u);
  EXPECT_EQ(data[1].rfind("| GodClass | NB |", 0), 0u);
  EXPECT_EQ(data.back().rfind("| SwitchStatements | SVM |", 0), 0u);
  EXPECT_EQ(md.rfind("# banner\n", 0), 0u);
}

TEST(Report, ReferenceValuesRoundTrip) {
  std::vector<ReportRow> rows;
  for (auto m : kAllModels) {
    for (auto s : kAllSmells) rows.push_back(make_report_row(labelled({1, 0, 0, 1}, s, m, false)));
  }
  const auto doc = nlohmann::json::parse(render_report(rows, ReportFormat::Json, "b"));
  ASSERT_EQ(doc.at("rows").size(), 48u);
  for (const auto& row : doc.at("rows")) {
    const auto ref = reference_metrics(require_smell(row.at("smell").get<std::string>()),
                                       require_model(row.at("model").get<std::string>()), false);
    EXPECT_EQ(row.at("acc").at("ref").get<std::string>(), format_percent(ref[0]));
    EXPECT_EQ(row.at("f1").at("ref").get<std::string>(), format_percent(ref[3]));
  }
}
