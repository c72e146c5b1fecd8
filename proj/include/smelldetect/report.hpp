#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "smelldetect/dataset_io.hpp"
#include "smelldetect/error.hpp"
#include "smelldetect/metrics.hpp"
#include "smelldetect/reference.hpp"

namespace smelldetect {

enum class ReportFormat { Markdown, Csv, Json };

inline ReportFormat parse_report_format(std::string_view text) {
  const auto key = detail::lower(detail::trim(text));
  if (key == "markdown" || key == "md") return ReportFormat::Markdown;
  if (key == "csv") return ReportFormat::Csv;
  if (key == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(text) + "'; valid formats: markdown, csv, json");
}

inline std::string_view file_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Markdown: return "md";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
  }
  return "txt";
}

struct ReportRow {
  MetricsReport metrics;
  Comparison comparison;
};

inline ReportRow make_report_row(const MetricsReport& m) { return {m, compare_to_reference(m)}; }

namespace detail {

inline constexpr std::array<std::string_view, 4> kMetricNames = {"acc", "prec", "rec", "f1"};

inline std::vector<ReportRow> ordered(std::vector<ReportRow> rows) {
  if (rows.empty()) throw ConfigError("report has no rows");
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    const auto& x = a.comparison;
    const auto& y = b.comparison;
    return std::tuple(smell_index(x.smell), model_index(x.model), x.tuned) <
           std::tuple(smell_index(y.smell), model_index(y.model), y.tuned);
  });
  return rows;
}

inline std::string signed_percent(double v) {
  const auto s = format_percent(v);
  return v >= 0.0 && s.front() != '-' ? "+" + s : s;
}

}  // namespace detail

// `banner` is emitted as a heading (markdown) or metadata field (json); csv carries no banner.
inline std::string render_report(std::vector<ReportRow> rows, ReportFormat format, std::string_view banner = {}) {
  rows = detail::ordered(std::move(rows));
  std::string out;
  switch (format) {
    case ReportFormat::Markdown: {
      if (!banner.empty()) out += "# " + std::string(banner) + "\n\n";
      out += "| smell | model | tuned | tp | fp | fn | tn |";
      for (auto m : detail::kMetricNames) {
        out += " " + std::string(m) + " obs | " + std::string(m) + " ref | " + std::string(m) + " delta |";
      }
      out += "\n|---|---|---|---|---|---|---|";
      for (std::size_t k = 0; k < 4; ++k) out += "---|---|---|";
      out += "\n";
      for (const auto& r : rows) {
        const auto& c = r.comparison;
        const auto& m = r.metrics.matrix;
        out += "| " + std::string(to_string(c.smell)) + " | " + std::string(to_string(c.model)) + " | " +
               (c.tuned ? "yes" : "no") + " | " + std::to_string(m.tp) + " | " + std::to_string(m.fp) + " | " +
               std::to_string(m.fn) + " | " + std::to_string(m.tn) + " |";
        for (std::size_t k = 0; k < 4; ++k) {
          out += " " + format_percent(c.observed[k]) + " | " + format_percent(c.reference[k]) + " | " +
                 detail::signed_percent(c.delta[k]) + " |";
        }
        out += "\n";
      }
      break;
    }
    case ReportFormat::Csv: {
      out += "smell,model,tuned,tp,fp,fn,tn";
      for (auto m : detail::kMetricNames) {
        out += "," + std::string(m) + "_obs," + std::string(m) + "_ref," + std::string(m) + "_delta";
      }
      out += "\n";
      for (const auto& r : rows) {
        const auto& c = r.comparison;
        const auto& m = r.metrics.matrix;
        out += std::string(to_string(c.smell)) + "," + std::string(to_string(c.model)) + "," +
               (c.tuned ? "true" : "false") + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
               std::to_string(m.fn) + "," + std::to_string(m.tn);
        for (std::size_t k = 0; k < 4; ++k) {
          out += "," + format_percent(c.observed[k]) + "," + format_percent(c.reference[k]) + "," +
                 format_percent(c.delta[k]);
        }
        out += "\n";
      }
      break;
    }
    case ReportFormat::Json: {
      nlohmann::json doc;
      doc["banner"] = std::string(banner);
      auto& list = doc["rows"] = nlohmann::json::array();
      for (const auto& r : rows) {
        const auto& c = r.comparison;
        const auto& m = r.metrics.matrix;
        nlohmann::json row = {{"smell", std::string(to_string(c.smell))},
                              {"model", std::string(to_string(c.model))},
                              {"tuned", c.tuned},
                              {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}}},
                              {"degenerate",
                               {{"precision", r.metrics.precision_degenerate},
                                {"recall", r.metrics.recall_degenerate},
                                {"f1", r.metrics.f1_degenerate}}}};
        for (std::size_t k = 0; k < 4; ++k) {
          // Two-decimal strings keep the documents byte-stable.
          row[std::string(detail::kMetricNames[k])] = {{"obs", format_percent(c.observed[k])},
                                                        {"ref", format_percent(c.reference[k])},
                                                        {"delta", format_percent(c.delta[k])}};
        }
        list.push_back(std::move(row));
      }
      out = doc.dump(2) + "\n";
      break;
    }
  }
  return out;
}

inline std::string render_report(const std::vector<ReportRow>& rows, std::string_view format,
                                 std::string_view banner = {}) {
  return render_report(rows, parse_report_format(format), banner);
}

}  // namespace smelldetect
