#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smelldetect/dataset.hpp"
#include "smelldetect/error.hpp"

namespace smelldetect {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::optional<double> parse_number(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string unquote(std::string_view raw) {
  auto s = trim(raw);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Splits an ARFF data line or nominal list on commas outside quotes.
inline std::vector<std::string> split_arff_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote) quote = 0;
      cur.push_back(c);
    } else if (c == '\'' || c == '"') {
      quote = c;
      cur.push_back(c);
    } else if (c == ',') {
      out.push_back(unquote(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(unquote(cur));
  return out;
}

inline bool is_default_positive(std::string_view label) {
  auto v = lower(trim(label));
  return v == "true" || v == "1" || v == "yes" || v == "smelly";
}

inline bool label_matches(std::string_view value, std::string_view positive) {
  return lower(trim(value)) == lower(trim(positive));
}

// RFC 4180 records: quoted fields may hold commas, doubled quotes and newlines.
struct CsvRecord {
  std::vector<std::string> fields;
  std::vector<bool> quoted;
  std::size_t line = 0;
};

inline std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source) {
  std::vector<CsvRecord> records;
  CsvRecord rec;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t line = 1;
  rec.line = 1;
  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    rec.quoted.push_back(was_quoted);
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = rec.fields.size() == 1 && !rec.quoted[0] && trim(rec.fields[0]).empty();
    if (!blank) records.push_back(std::move(rec));
    rec = CsvRecord{};
    rec.line = line;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      // tolerated before '\n'
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(source, line, "unterminated quoted field");
  if (!field.empty() || !rec.fields.empty()) end_record();
  return records;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

struct ArffOptions {
  // Attribute used as the class label; the last attribute when unset.
  std::optional<std::string> label_attribute;
  // Label value meaning "smelly"; when unset, true/1/yes/smelly are positive.
  std::optional<std::string> positive_label;
};

// Parses the dense ARFF subset: '%' comments, @relation, numeric attributes,
// one nominal class attribute and comma-separated @data rows with '?' for
// missing values. Missing feature cells come back as NaN.
inline LabeledDataset parse_arff(std::string_view text, const std::string& source = "<arff>",
                                 const ArffOptions& options = {}, Warnings* warnings = nullptr) {
  struct Attribute {
    std::string name;
    bool numeric = false;
    std::vector<std::string> nominal;
    std::size_t line = 0;
  };
  std::vector<Attribute> attributes;
  bool in_data = false;
  std::size_t label_index = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  auto prepare_label = [&](std::size_t line_no) {
    if (attributes.empty()) throw ParseError(source, line_no, "@data before any @attribute");
    label_index = attributes.size() - 1;
    if (options.label_attribute) {
      bool found = false;
      for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == *options.label_attribute) {
          label_index = i;
          found = true;
        }
      }
      if (!found) {
        throw LabelError(source + ": label attribute '" + *options.label_attribute + "' not declared");
      }
    }
    if (attributes.size() < 2) throw ParseError(source, line_no, "need at least one feature and a label");
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (i != label_index && !attributes[i].numeric) {
        throw ParseError(source, attributes[i].line,
                         "feature attribute '" + attributes[i].name + "' is not numeric");
      }
    }
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError(source, line_no, "expected a header declaration");
      auto space = line.find_first_of(" \t");
      auto keyword = detail::lower(line.substr(0, space));
      auto rest = space == std::string::npos ? std::string{} : detail::trim(line.substr(space));
      if (keyword == "@relation") continue;
      if (keyword == "@data") {
        prepare_label(line_no);
        in_data = true;
        continue;
      }
      if (keyword != "@attribute") throw ParseError(source, line_no, "unknown declaration " + keyword);
      if (rest.empty()) throw ParseError(source, line_no, "@attribute without a name");
      Attribute attr;
      attr.line = line_no;
      std::string type;
      if (rest.front() == '\'' || rest.front() == '"') {
        auto close = rest.find(rest.front(), 1);
        if (close == std::string::npos) throw ParseError(source, line_no, "unterminated attribute name");
        attr.name = rest.substr(1, close - 1);
        type = detail::trim(std::string_view(rest).substr(close + 1));
      } else {
        auto sp = rest.find_first_of(" \t{");
        if (sp == std::string::npos) throw ParseError(source, line_no, "@attribute without a type");
        attr.name = rest.substr(0, sp);
        type = detail::trim(std::string_view(rest).substr(sp));
      }
      if (type.empty()) throw ParseError(source, line_no, "@attribute without a type");
      if (type.front() == '{') {
        if (type.back() != '}') throw ParseError(source, line_no, "unterminated nominal list");
        attr.nominal = detail::split_arff_fields(std::string_view(type).substr(1, type.size() - 2));
      } else {
        auto t = detail::lower(type);
        if (t == "numeric" || t == "real" || t == "integer") {
          attr.numeric = true;
        } else {
          throw ParseError(source, line_no, "unsupported attribute type '" + type + "'");
        }
      }
      attributes.push_back(std::move(attr));
      continue;
    }

    if (line.front() == '{') throw ParseError(source, line_no, "sparse ARFF rows are not supported");
    auto fields = detail::split_arff_fields(line);
    if (fields.size() != attributes.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(attributes.size()) + " values, found " +
                           std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(attributes.size() - 1);
    int label = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& cell = fields[i];
      if (i == label_index) {
        const auto& attr = attributes[i];
        if (cell == "?") throw LabelError(source + ":" + std::to_string(line_no) + ": missing label");
        if (!attr.nominal.empty()) {
          bool declared = false;
          for (const auto& v : attr.nominal) declared = declared || detail::label_matches(cell, v);
          if (!declared) {
            throw LabelError(source + ":" + std::to_string(line_no) + ": unknown label value '" +
                             cell + "'");
          }
        }
        label = options.positive_label ? detail::label_matches(cell, *options.positive_label)
                                       : detail::is_default_positive(cell);
        continue;
      }
      if (cell == "?") {
        row.push_back(kMissing);
        continue;
      }
      auto value = detail::parse_number(cell);
      if (!value) {
        throw ParseError(source, line_no,
                         "non-numeric value '" + cell + "' for attribute '" + attributes[i].name + "'");
      }
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (!in_data) throw ParseError(source, line_no, "missing @data section");

  DatasetSchema schema;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (i == label_index) continue;
    schema.feature_names.push_back(attributes[i].name);
  }
  schema.label_name = attributes[label_index].name;
  schema.positive_label = options.positive_label.value_or("true");
  Matrix features;
  features.reset_columns(schema.feature_names.size());
  for (const auto& r : rows) features.append_row(r);
  if (warnings && std::ranges::none_of(labels, [](int y) { return y == 1; })) {
    warnings->push_back(source + ": no row carries the positive label");
  }
  return LabeledDataset(std::move(schema), std::move(features), std::move(labels));
}

inline LabeledDataset load_arff(const std::filesystem::path& path, const ArffOptions& options = {},
                                Warnings* warnings = nullptr) {
  return parse_arff(detail::read_file(path), path.string(), options, warnings);
}

// CSV with a mandatory header row. Empty cells are missing; the label column
// is compared case-insensitively against positive_label after trimming.
inline LabeledDataset parse_csv(std::string_view text, const std::string& label_column,
                                const std::string& positive_label,
                                const std::string& source = "<csv>", Warnings* warnings = nullptr) {
  auto records = detail::parse_csv(text, source);
  if (records.empty()) throw DataError(source + ": missing header row");
  const auto& header = records.front();
  bool all_numeric = true;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    all_numeric = all_numeric && !header.quoted[i] && detail::parse_number(header.fields[i]).has_value();
  }
  if (all_numeric) throw DataError(source + ": missing header row");

  std::optional<std::size_t> label_index;
  DatasetSchema schema;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    auto name = detail::trim(header.fields[i]);
    if (name == label_column) {
      label_index = i;
    } else {
      schema.feature_names.push_back(name);
    }
  }
  if (!label_index) throw DataError(source + ": label column '" + label_column + "' not found");
  schema.label_name = label_column;
  schema.positive_label = positive_label;

  Matrix features;
  features.reset_columns(schema.feature_names.size());
  std::vector<int> labels;
  std::vector<double> row(schema.feature_names.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      throw ParseError(source, rec.line,
                       "expected " + std::to_string(header.fields.size()) + " fields, found " +
                           std::to_string(rec.fields.size()));
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < rec.fields.size(); ++i) {
      if (i == *label_index) continue;
      const auto& cell = rec.fields[i];
      if (detail::trim(cell).empty()) {
        row[k++] = kMissing;
        continue;
      }
      auto value = detail::parse_number(cell);
      if (!value) {
        throw ParseError(source, rec.line,
                         "non-numeric value '" + cell + "' in column '" + schema.feature_names[k] + "'");
      }
      row[k++] = *value;
    }
    features.append_row(row);
    labels.push_back(detail::label_matches(rec.fields[*label_index], positive_label) ? 1 : 0);
  }
  if (warnings && std::ranges::none_of(labels, [](int y) { return y == 1; })) {
    warnings->push_back(source + ": positive label '" + positive_label + "' never occurs");
  }
  return LabeledDataset(std::move(schema), std::move(features), std::move(labels));
}

inline LabeledDataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                               const std::string& positive_label, Warnings* warnings = nullptr) {
  return parse_csv(detail::read_file(path), label_column, positive_label, path.string(), warnings);
}

// Writes features with shortest round-trip formatting and labels as 1/0, so
// that parse_csv(..., label_name, "1") reproduces the matrix bit for bit.
inline std::string to_csv(const LabeledDataset& dataset) {
  std::string out;
  for (const auto& name : dataset.schema().feature_names) {
    out += detail::csv_escape(name);
    out += ',';
  }
  out += detail::csv_escape(dataset.schema().label_name);
  out += '\n';
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (double v : dataset.features().row(r)) {
      if (!std::isnan(v)) out += detail::format_number(v);
      out += ',';
    }
    out += dataset.labels()[r] ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline void write_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_csv(dataset);
}

}  // namespace smelldetect
