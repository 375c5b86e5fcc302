// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairbound/ingest.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace fairbound {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one record; double-quoted fields may contain the delimiter.
std::vector<std::string> split_record(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (const char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == delimiter && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

double parse_number(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
    throw std::runtime_error(where + ": not a number: '" + text + "'");
  return v;
}

std::runtime_error malformed(const std::filesystem::path& path, Index line, const std::string& why) {
  return std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + why);
}

// Column layout shared by both loaders.
struct Schema {
  std::vector<std::string> names;
  std::vector<bool> numeric;
};

struct Table {
  std::vector<std::vector<std::string>> rows;  // kept records, label removed
  std::vector<double> labels;
};

// One-hot / numeric feature matrix for the listed columns, standardized,
// with a bias column appended.
Dataset build(const Table& table, const Schema& schema, const std::vector<std::size_t>& columns,
              Matrix sensitive, std::vector<std::string> sensitive_names) {
  const Index n = static_cast<Index>(table.rows.size());
  std::vector<std::string> names;
  std::vector<bool> numeric;
  std::vector<std::vector<double>> cols;
  for (const std::size_t c : columns) {
    if (schema.numeric[c]) {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i)
        values[static_cast<std::size_t>(i)] =
            parse_number(table.rows[static_cast<std::size_t>(i)][c], schema.names[c]);
      names.push_back(schema.names[c]);
      numeric.push_back(true);
      cols.push_back(std::move(values));
      continue;
    }
    std::set<std::string> levels;
    for (const auto& row : table.rows) levels.insert(row[c]);
    for (const std::string& level : levels) {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i)
        values[static_cast<std::size_t>(i)] =
            table.rows[static_cast<std::size_t>(i)][c] == level ? 1.0 : 0.0;
      names.push_back(schema.names[c] + "=" + level);
      numeric.push_back(false);
      cols.push_back(std::move(values));
    }
  }
  Matrix x(n, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    x.col(static_cast<Index>(j)) = Eigen::Map<const Vector>(cols[j].data(), n);
  Vector y = Eigen::Map<const Vector>(table.labels.data(), n);
  Dataset raw(std::move(x), std::move(y), std::move(sensitive), std::move(names),
              std::move(sensitive_names), false, std::move(numeric));
  return append_bias(fit_standardizer(raw).apply(raw));
}

void count_groups(IngestReport& report, const std::string& attribute,
                  const std::vector<std::string>& values, const std::vector<double>& labels) {
  std::map<std::string, GroupCount> counts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    GroupCount& g = counts[values[i]];
    g.attribute = attribute;
    g.value = values[i];
    ++g.total;
    if (labels[i] > 0) ++g.positive;
  }
  for (auto& [value, g] : counts) report.groups.push_back(g);
}

// Adult levels that almost never carry the positive label (Preschool has a
// single positive in 45,222 rows) let an unregularized model push their rows
// to arbitrary distance, which satisfies a covariance constraint at no loss.
// Schooling below HS-grad is therefore grouped in two levels and the native
// country reduced to United-States vs the rest.
void group_adult_levels(std::vector<std::string>& fields) {
  static const std::set<std::string> primary{"Preschool", "1st-4th", "5th-6th", "7th-8th"};
  static const std::set<std::string> high{"9th", "10th", "11th", "12th"};
  std::string& education = fields[3];
  if (primary.count(education)) education = "prim-middle-school";
  else if (high.count(education)) education = "high-school";
  std::string& country = fields[13];
  if (country != "United-States") country = "Non-United-States";
}

const Schema& adult_schema() {
  static const Schema s{
      {"age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
       "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
       "hours-per-week", "native-country"},
      {true, false, true, false, true, false, false, false, false, false, true, true, true,
       false}};
  return s;
}

const Schema& bank_schema() {
  static const Schema s{
      {"age", "job", "marital", "education", "default", "housing", "loan", "contact", "month",
       "day_of_week", "duration", "campaign", "pdays", "previous", "poutcome", "emp.var.rate",
       "cons.price.idx", "cons.conf.idx", "euribor3m", "nr.employed"},
      {true, false, false, false, false, false, false, false, false, false, true, true, true,
       true, false, true, true, true, true, true}};
  return s;
}

}  // namespace

std::string to_string(AdultSensitive choice) {
  switch (choice) {
    case AdultSensitive::gender: return "gender";
    case AdultSensitive::race: return "race";
    case AdultSensitive::gender_race: return "gender+race";
  }
  return "?";
}

AdultSensitive adult_sensitive_from_string(const std::string& name) {
  if (name == "gender" || name == "sex") return AdultSensitive::gender;
  if (name == "race") return AdultSensitive::race;
  if (name == "gender+race" || name == "gender_race") return AdultSensitive::gender_race;
  throw std::invalid_argument("unknown Adult sensitive attribute choice: " + name);
}

const GroupCount& IngestReport::group(const std::string& attribute,
                                      const std::string& value) const {
  for (const GroupCount& g : groups)
    if (g.attribute == attribute && g.value == value) return g;
  throw std::out_of_range("no group " + attribute + "=" + value);
}

std::vector<std::filesystem::path> adult_files(const std::filesystem::path& dir) {
  return {dir / "adult.data", dir / "adult.test"};
}

IngestResult load_adult(const std::vector<std::filesystem::path>& paths, AdultSensitive choice) {
  const Schema& schema = adult_schema();
  constexpr std::size_t kFields = 15;
  constexpr std::size_t kRace = 8, kSex = 9;
  IngestReport report;
  report.source = "adult";
  Table table;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t.front() == '|') continue;
      ++report.rows_read;
      std::vector<std::string> fields = split_record(t, ',');
      if (fields.size() != kFields)
        throw malformed(path, line_no, "expected 15 fields, got " + std::to_string(fields.size()));
      if (std::find(fields.begin(), fields.end(), "?") != fields.end()) {
        ++report.rows_dropped_missing;
        continue;
      }
      std::string label = fields.back();
      if (!label.empty() && label.back() == '.') label.pop_back();
      double y;
      if (label == ">50K") y = 1.0;
      else if (label == "<=50K") y = -1.0;
      else throw malformed(path, line_no, "unknown label '" + fields.back() + "'");
      fields.pop_back();
      group_adult_levels(fields);
      table.rows.push_back(std::move(fields));
      table.labels.push_back(y);
    }
  }
  const Index n = static_cast<Index>(table.rows.size());
  if (n == 0) throw std::runtime_error("no Adult records found");
  report.rows_kept = n;
  report.positive = std::count(table.labels.begin(), table.labels.end(), 1.0);

  std::vector<std::string> sex(static_cast<std::size_t>(n)), race(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    sex[static_cast<std::size_t>(i)] = table.rows[static_cast<std::size_t>(i)][kSex];
    race[static_cast<std::size_t>(i)] = table.rows[static_cast<std::size_t>(i)][kRace];
  }
  count_groups(report, "sex", sex, table.labels);
  count_groups(report, "race", race, table.labels);

  std::vector<SensitiveEncoding> blocks;
  std::set<std::size_t> excluded;
  if (choice != AdultSensitive::race) {
    blocks.push_back(encode_sensitive(sex, "sex"));
    excluded.insert(kSex);
  }
  if (choice != AdultSensitive::gender) {
    blocks.push_back(encode_sensitive(race, "race"));
    excluded.insert(kRace);
  }
  Index k = 0;
  for (const auto& b : blocks) k += b.columns.cols();
  Matrix sensitive(n, k);
  std::vector<std::string> sensitive_names;
  Index at = 0;
  for (const auto& b : blocks) {
    sensitive.middleCols(at, b.columns.cols()) = b.columns;
    at += b.columns.cols();
    sensitive_names.insert(sensitive_names.end(), b.names.begin(), b.names.end());
  }
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < schema.names.size(); ++c)
    if (!excluded.count(c)) columns.push_back(c);
  Dataset dataset = build(table, schema, columns, std::move(sensitive), std::move(sensitive_names));
  report.feature_count = dataset.dim();
  return {std::move(dataset), std::move(report)};
}

IngestResult load_bank(const std::filesystem::path& path) {
  const Schema& schema = bank_schema();
  constexpr std::size_t kFields = 21;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  IngestReport report;
  report.source = "bank";
  Table table;
  std::string line;
  Index line_no = 0;
  bool header_seen = false;
  std::vector<double> ages;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> fields = split_record(t, ';');
    if (!header_seen) {
      header_seen = true;
      if (!fields.empty() && fields.front() == "age") continue;
    }
    ++report.rows_read;
    if (fields.size() != kFields)
      throw malformed(path, line_no, "expected 21 fields, got " + std::to_string(fields.size()));
    double y;
    if (fields.back() == "yes") y = 1.0;
    else if (fields.back() == "no") y = -1.0;
    else throw malformed(path, line_no, "unknown label '" + fields.back() + "'");
    double age;
    try {
      age = parse_number(fields.front(), "age");
    } catch (const std::runtime_error&) {
      throw malformed(path, line_no, "non-numeric age '" + fields.front() + "'");
    }
    fields.pop_back();
    ages.push_back(age);
    table.rows.push_back(std::move(fields));
    table.labels.push_back(y);
  }
  const Index n = static_cast<Index>(table.rows.size());
  if (n == 0) throw std::runtime_error("no Bank records found");
  report.rows_kept = n;
  report.positive = std::count(table.labels.begin(), table.labels.end(), 1.0);

  Matrix sensitive(n, 1);
  std::vector<std::string> group(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double a = ages[static_cast<std::size_t>(i)];
    const bool inside = a >= 25.0 && a <= 60.0;
    sensitive(i, 0) = inside ? 1.0 : 0.0;
    group[static_cast<std::size_t>(i)] = inside ? "25-60" : "other";
  }
  count_groups(report, "age", group, table.labels);
  std::vector<std::size_t> columns;
  for (std::size_t c = 1; c < schema.names.size(); ++c) columns.push_back(c);
  Dataset dataset = build(table, schema, columns, std::move(sensitive), {"age_25_60"});
  report.feature_count = dataset.dim();
  return {std::move(dataset), std::move(report)};
}

}  // namespace fairbound
