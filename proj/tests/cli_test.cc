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
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "fairbound/io.hpp"

namespace fairbound {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fairbound_cli" / name;
  fs::create_directories(p.parent_path());
  return p;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

TEST(CliGenTest, EchoesConfig) {
  const fs::path out = scratch("gen.csv");
  const CliRun r = run({"gen", "--variant", "linear", "--phi", "0.7853981634", "--n", "4000",
                     "--seed", "1", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 4001u);
  EXPECT_EQ(rows.front(), "x1,x2,y,z");
  EXPECT_EQ(std::count(rows[1].begin(), rows[1].end(), ','), 3);
}

TEST(CliIngestTest, PrintsReport) {
  const CliRun r = run({"ingest", "--bank", FAIRBOUND_SOURCE_DIR "/tests/data/bank_sample.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("rows_kept"), 6);
  EXPECT_EQ(j.at("positive"), 3);
}

TEST(CliIngestTest, AdultCounts) {
  const fs::path dir = fs::path(FAIRBOUND_DATA_DIR) / "adult";
  if (!fs::exists(dir / "adult.data")) GTEST_SKIP() << "Adult files not present";
  const CliRun r = run({"ingest", "--adult", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("rows_kept"), 45222);
  EXPECT_EQ(j.at("positive"), 11208);
}

TEST(CliSweepTest, OnePointGridEqualsTrain) {
  const fs::path dir = scratch("one_point");
  fs::remove_all(dir);
  const CliRun s = run({"sweep", "--synthetic", "linear", "--n", "500", "--factors", "0.5",
                     "--repeats", "1", "--seed", "3", "--out", dir.string()});
  ASSERT_EQ(s.code, 0) << s.err;
  const CliRun t = run({"train", "--synthetic", "linear", "--n", "500", "--a", "0.5", "--seed", "3"});
  ASSERT_EQ(t.code, 0) << t.err;
  const Json cell = Json::parse(t.out);
  const Json summary = Json::parse(std::ifstream(dir / "summary.json"));
  const Json& point = summary.at("grid").at(0);
  EXPECT_EQ(cell.at("meta").at("mode"), "fairness_constrained");
  EXPECT_EQ(point.at("loss").at("mean").get<double>(), cell.at("loss").get<double>());
  EXPECT_EQ(point.at("test_accuracy").at("mean").get<double>(),
            cell.at("test_accuracy").get<double>());
  EXPECT_EQ(point.at("columns").at(0).at("train").at("p_percent").at("mean").get<double>(),
            cell.at("train_fairness").at("p_percent").at(0).get<double>());
  EXPECT_EQ(lines(dir / "cells.csv").size(), 2u);
}

TEST(CliSweepTest, ConfigFile) {
  const fs::path cfg = scratch("sweep.json");
  const fs::path dir = scratch("from_config");
  fs::remove_all(dir);
  std::ofstream(cfg) << R"({"data": {"source": "synthetic", "n": 300},
                            "grid": {"factors": [1.0, 0.0]},
                            "split": {"repeats": 2}, "seed": 1})";
  const CliRun r = run({"sweep", "--config", cfg.string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(dir / "cells.csv").size(), 5u);
}

TEST(CliTrainTest, WritesModel) {
  const fs::path model = scratch("model.json");
  const CliRun r = run({"train", "--synthetic", "linear", "--n", "300", "--classifier",
                     "linear_svm", "--c", "0", "--model-out", model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Model m = model_from_json(Json::parse(std::ifstream(model)));
  EXPECT_EQ(std::get<LinearModel>(m).theta.size(), 3);
}

TEST(CliAuditTest, HandExample) {
  const fs::path in = scratch("scores.csv");
  std::ofstream(in) << "score,z,y\n1,1,1\n1,1,1\n-1,0,1\n-1,0,-1\n";
  const CliRun r = run({"audit", "--input", in.string(), "--label", "y"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("fairness").at("covariance_per_column").at(0).get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("fairness").at("p_percent").at(0).get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), 0.75);
}

TEST(CliErrorsTest, NonzeroWithDiagnostics) {
  CliRun r = run({"gen", "--bogus", "1", "--out", "x.csv"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  r = run({});
  EXPECT_NE(r.code, 0);
  r = run({"ingest", "--bank", "/nonexistent/bank.csv"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  r = run({"sweep", "--synthetic", "linear", "--out", scratch("never").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(scratch("never")));
  r = run({"train", "--synthetic", "linear", "--mode", "fairness_constrained"});
  EXPECT_NE(r.code, 0);
  r = run({"train", "--synthetic", "linear", "--adult", "/tmp"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
}  // namespace fairbound
