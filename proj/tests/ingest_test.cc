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


#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fairbound/ingest.hpp"

namespace fairbound {
namespace {

namespace fs = std::filesystem;

const fs::path kSourceData = FAIRBOUND_SOURCE_DIR "/tests/data";

fs::path adult_dir() { return fs::path(FAIRBOUND_DATA_DIR) / "adult"; }

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("fairbound_ingest_" + name);
  std::ofstream(p) << text;
  return p;
}

// No sensitive column may reappear among the features.
void expect_sensitive_excluded(const Dataset& d) {
  for (const auto& s : d.sensitive_names())
    for (const auto& f : d.feature_names()) EXPECT_NE(s, f);
  for (Index k = 0; k < d.sensitive_count(); ++k)
    for (Index j = 0; j < d.dim(); ++j) EXPECT_NE(d.sensitive().col(k), d.features().col(j));
}

TEST(AdultIngestTest, CountsMatchPublishedTables) {
  if (!fs::exists(adult_dir() / "adult.data")) GTEST_SKIP() << "Adult files not present";
  const IngestResult r = load_adult(adult_files(adult_dir()), AdultSensitive::gender_race);
  const IngestReport& rep = r.report;
  EXPECT_EQ(rep.rows_read, 48842);
  EXPECT_EQ(rep.rows_kept, 45222);
  EXPECT_EQ(rep.rows_read, rep.rows_kept + rep.rows_dropped_missing);
  EXPECT_EQ(rep.positive, 11208);
  EXPECT_EQ(rep.group("sex", "Male").total, 30527);
  EXPECT_EQ(rep.group("sex", "Male").positive, 9539);
  EXPECT_EQ(rep.group("sex", "Female").total, 14695);
  EXPECT_EQ(rep.group("sex", "Female").positive, 1669);
  EXPECT_EQ(rep.group("race", "White").total, 38903);
  EXPECT_EQ(rep.group("race", "Black").total, 4228);
  EXPECT_EQ(rep.group("race", "Asian-Pac-Islander").total, 1303);
  EXPECT_EQ(rep.group("race", "Amer-Indian-Eskimo").total, 435);
  EXPECT_EQ(rep.group("race", "Other").total, 353);
  EXPECT_EQ(rep.group("race", "White").positive, 10207);
  EXPECT_EQ(rep.group("race", "Black").positive, 534);
  EXPECT_EQ(rep.group("race", "Asian-Pac-Islander").positive, 369);
  EXPECT_EQ(rep.group("race", "Amer-Indian-Eskimo").positive, 53);
  EXPECT_EQ(rep.group("race", "Other").positive, 45);
  const Dataset& d = r.dataset;
  EXPECT_EQ(d.rows(), 45222);
  EXPECT_TRUE(d.has_bias_column());
  EXPECT_EQ(d.feature_names().back(), "bias");
  EXPECT_EQ(d.sensitive_count(), 6);
  EXPECT_EQ(rep.feature_count, d.dim());
  expect_sensitive_excluded(d);
}

TEST(AdultIngestTest, SensitiveChoices) {
  if (!fs::exists(adult_dir() / "adult.data")) GTEST_SKIP() << "Adult files not present";
  const auto files = adult_files(adult_dir());
  const Dataset g = load_adult(files, AdultSensitive::gender).dataset;
  EXPECT_EQ(g.sensitive_names(), (std::vector<std::string>{"sex=Male"}));
  EXPECT_EQ(g.sensitive().col(0).sum(), 30527.0);
  const Dataset race = load_adult(files, AdultSensitive::race).dataset;
  EXPECT_EQ(race.sensitive_count(), 5);
  EXPECT_EQ(race.sensitive().rowwise().sum(), Vector::Ones(race.rows()));
  // Race stays a feature when only gender is sensitive.
  bool race_feature = false;
  for (const auto& f : g.feature_names()) race_feature |= f.rfind("race=", 0) == 0;
  EXPECT_TRUE(race_feature);
}

const char* kAdultRow =
    "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, "
    "Male, 2174, 0, 40, United-States, <=50K\n";

TEST(AdultIngestTest, MissingMarkersAndDottedLabels) {
  const std::string text = std::string("|1x3 Cross validator\n") + kAdultRow +
                           "50, ?, 83311, Bachelors, 13, Married-civ-spouse, Exec-managerial, "
                           "Husband, White, Male, 0, 0, 13, United-States, <=50K\n"
                           "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, "
                           "Not-in-family, Black, Female, 0, 0, 40, Cuba, >50K.\n";
  const IngestResult r = load_adult({write_temp("adult_ok.txt", text)}, AdultSensitive::gender);
  EXPECT_EQ(r.report.rows_read, 3);
  EXPECT_EQ(r.report.rows_dropped_missing, 1);
  EXPECT_EQ(r.report.rows_kept, 2);
  EXPECT_EQ(r.report.positive, 1);
  EXPECT_EQ(r.dataset.labels(), (Vector{{-1.0, 1.0}}));
}

TEST(AdultIngestTest, RejectsMalformedRows) {
  EXPECT_THROW(load_adult({write_temp("adult_short.txt", "39, State-gov, 77516\n")},
                          AdultSensitive::gender),
               std::runtime_error);
  std::string bad = kAdultRow;
  bad.replace(bad.find("<=50K"), 5, "maybe");
  EXPECT_THROW(load_adult({write_temp("adult_label.txt", bad)}, AdultSensitive::gender),
               std::runtime_error);
  EXPECT_THROW(load_adult({"/nonexistent/adult.data"}, AdultSensitive::gender),
               std::runtime_error);
  EXPECT_THROW(adult_sensitive_from_string("age"), std::invalid_argument);
}

TEST(BankIngestTest, SampleFile) {
  const IngestResult r = load_bank(kSourceData / "bank_sample.csv");
  const IngestReport& rep = r.report;
  EXPECT_EQ(rep.rows_read, 6);
  EXPECT_EQ(rep.rows_kept, 6);
  EXPECT_EQ(rep.positive, 3);
  // Ages 56, 25, 60, 40 are inside the closed interval; 24 and 61 are not.
  EXPECT_EQ(rep.group("age", "25-60").total, 4);
  EXPECT_EQ(rep.group("age", "25-60").positive, 1);
  EXPECT_EQ(rep.group("age", "other").total, 2);
  EXPECT_EQ(rep.group("age", "other").positive, 2);
  const Dataset& d = r.dataset;
  EXPECT_EQ(d.sensitive().col(0), (Vector{{1.0, 0.0, 1.0, 1.0, 0.0, 1.0}}));
  EXPECT_EQ(d.labels(), (Vector{{-1.0, 1.0, 1.0, -1.0, 1.0, -1.0}}));
  for (const auto& f : d.feature_names()) EXPECT_NE(f, "age");
  EXPECT_TRUE(d.has_bias_column());
  expect_sensitive_excluded(d);
}

TEST(BankIngestTest, RejectsMalformedRows) {
  std::ifstream in(kSourceData / "bank_sample.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_THROW(load_bank(write_temp("bank_short.csv", header + "\n56;\"housemaid\";\"no\"\n")),
               std::runtime_error);
  EXPECT_THROW(load_bank(write_temp("bank_age.csv", header + "\n\"old\"" +
                                                        row.substr(row.find(';')) + "\n")),
               std::runtime_error);
  std::string bad_label = row;
  bad_label.replace(bad_label.rfind("\"no\""), 4, "\"perhaps\"");
  EXPECT_THROW(load_bank(write_temp("bank_label.csv", header + "\n" + bad_label + "\n")),
               std::runtime_error);
  EXPECT_THROW(load_bank("/nonexistent/bank.csv"), std::runtime_error);
}

TEST(IngestReportTest, UnknownGroupThrows) {
  IngestReport rep;
  EXPECT_THROW(rep.group("sex", "Male"), std::out_of_range);
}

}  // namespace
}  // namespace fairbound
