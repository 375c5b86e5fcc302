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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fairbound/experiment.hpp"

namespace fairbound {
namespace {

namespace fs = std::filesystem;

ExperimentConfig synthetic_sweep() {
  ExperimentConfig c;
  c.data.synthetic.n = 600;
  c.data.synthetic.phi = std::numbers::pi / 8.0;
  c.factors = {1.0, 0.5, 0.0};
  c.split.repeats = 2;
  c.seed = 5;
  c.threads = 2;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig c = synthetic_sweep();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.grid_size(), 3u);
  c.factors.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.factors = {0.5};
  c.gammas = {0.1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = synthetic_sweep();
  c.mode = TrainingMode::accuracy_constrained;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.factors.clear();
  c.gammas = {0.0, 0.1};
  EXPECT_NO_THROW(c.validate());
  c.classifier = ClassifierKind::linear_svm;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = synthetic_sweep();
  c.mode = TrainingMode::unconstrained;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.factors.clear();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.grid_size(), 1u);
}

TEST(ExperimentConfigTest, JsonRoundTrip) {
  const Json j = Json::parse(R"({
    "data": {"source": "synthetic", "variant": "nonlinear", "n": 300, "phi": 0.5},
    "classifier": "kernel_svm",
    "mode": "fairness_constrained",
    "grid": {"thresholds": [[0.1], [0.0]]},
    "svm": {"cost": 2.0},
    "kernel": {"kind": "rbf", "rbf_gamma": 0.3},
    "split": {"train_fraction": 0.6, "repeats": 3},
    "seed": 9,
    "output": "out"
  })");
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.data.synthetic.variant, SynthConfig::Variant::nonlinear);
  EXPECT_EQ(c.data.synthetic.n, 300);
  EXPECT_EQ(c.classifier, ClassifierKind::kernel_svm);
  ASSERT_EQ(c.thresholds.size(), 2u);
  EXPECT_EQ(c.thresholds[0][0], 0.1);
  EXPECT_EQ(c.fit.svm_cost, 2.0);
  EXPECT_EQ(c.fit.kernel.rbf_gamma, 0.3);
  EXPECT_EQ(c.split.repeats, 3);
  EXPECT_EQ(c.seed, 9u);
  const ExperimentConfig again = config_from_json(to_json(c));
  EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
  EXPECT_ANY_THROW(config_from_json(Json::parse(R"({"data": {"source": "mars"}})")));
}

TEST(RunSweepTest, CellLayoutAndBaselineCell) {
  const ExperimentConfig c = synthetic_sweep();
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.cells.size(), 6u);
  ASSERT_EQ(r.baselines.size(), 2u);
  for (std::size_t g = 0; g < 3; ++g)
    for (int rep = 0; rep < 2; ++rep) {
      const CellResult& cell = r.cell(g, rep);
      EXPECT_EQ(cell.grid_index, g);
      EXPECT_EQ(cell.repeat, rep);
      ASSERT_TRUE(cell.ok) << cell.error;
      EXPECT_TRUE(cell.constraints_satisfied);
      EXPECT_EQ(cell.parameter, c.factors[g]);
    }
  for (int rep = 0; rep < 2; ++rep) {
    const RepeatBaseline& b = r.baselines[static_cast<std::size_t>(rep)];
    const CellResult& top = r.cell(0, rep);
    EXPECT_NEAR(top.loss, b.loss, 1e-6 * b.loss);
    EXPECT_NEAR(top.thresholds[0], std::abs(b.covariance[0]), 1e-15);
    EXPECT_NEAR(top.relative_loss, 0.0, 1e-6);
    EXPECT_NEAR(r.cell(2, rep).relative_loss, 1.0, 1e-12);
    EXPECT_GE(r.cell(1, rep).relative_loss, -1e-8);
    EXPECT_LE(r.cell(1, rep).relative_loss, 1.0 + 1e-8);
    EXPECT_LE(std::abs(r.cell(2, rep).train_fairness.covariance[0]), 1e-5);
  }
}

TEST(RunSweepTest, RelativeLossWithoutZeroCell) {
  ExperimentConfig c = synthetic_sweep();
  c.factors = {0.5};
  c.split.repeats = 1;
  const SweepResult r = run_sweep(c);
  const double rel = r.cells.front().relative_loss;
  EXPECT_GT(rel, 0.0);
  EXPECT_LT(rel, 1.0);
  EXPECT_TRUE(std::isfinite(r.baselines.front().zero_threshold_loss));
}

TEST(RunSweepTest, GammaZeroKeepsBaselineLoss) {
  ExperimentConfig c = synthetic_sweep();
  c.mode = TrainingMode::accuracy_constrained;
  c.factors.clear();
  c.gammas = {0.0, 0.3};
  c.split.repeats = 1;
  const SweepResult r = run_sweep(c);
  const double base = r.baselines.front().loss;
  EXPECT_LE(r.cell(0, 0).loss, base * (1.0 + 1e-6));
  EXPECT_LE(r.cell(1, 0).loss, 1.3 * base * (1.0 + 1e-6));
  EXPECT_TRUE(std::isnan(r.cell(0, 0).relative_loss));
  EXPECT_LE(std::abs(r.cell(0, 0).train_fairness.covariance[0]),
            std::abs(r.baselines.front().covariance[0]));
}

TEST(RunSweepTest, FineGrainedCountsNoFlips) {
  ExperimentConfig c = synthetic_sweep();
  c.mode = TrainingMode::fine_grained;
  c.factors.clear();
  c.gammas = {0.5};
  c.split.repeats = 1;
  const SweepResult r = run_sweep(c);
  ASSERT_TRUE(r.cells.front().ok) << r.cells.front().error;
  EXPECT_EQ(r.cells.front().protected_flips, 0);
  EXPECT_TRUE(r.cells.front().constraints_satisfied);
}

TEST(RunSweepTest, FailedCellIsRecorded) {
  ExperimentConfig c = synthetic_sweep();
  c.mode = TrainingMode::fine_grained;
  c.factors.clear();
  c.gammas = {0.5};
  c.split.repeats = 1;
  c.protected_column = "no_such_column";
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_FALSE(r.cells.front().ok);
  EXPECT_NE(r.cells.front().error.find("baseline failed"), std::string::npos);
}

TEST(EmitResultsTest, FilesRowCountAndDeterminism) {
  ExperimentConfig c = synthetic_sweep();
  const fs::path a = fs::temp_directory_path() / "fairbound_emit_a";
  const fs::path b = fs::temp_directory_path() / "fairbound_emit_b";
  fs::remove_all(a);
  fs::remove_all(b);
  emit_results(run_sweep(c), a);
  c.threads = 1;
  emit_results(run_sweep(c), b);
  for (const char* f : {"cells.csv", "summary.json", "fig_covariance_vs_loss.csv",
                        "fig_covariance_vs_p_percent.csv", "fig_accuracy_vs_p_percent.csv",
                        "fig_group_rates.csv"})
    EXPECT_TRUE(fs::exists(a / f)) << f;
  const std::string csv = slurp(a / "cells.csv");
  EXPECT_EQ(csv, slurp(b / "cells.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2);
  const Json summary = Json::parse(slurp(a / "summary.json"));
  EXPECT_EQ(summary.at("grid").size(), 3u);
}

TEST(EmitResultsTest, EmptyGridWritesNothing) {
  ExperimentConfig c = synthetic_sweep();
  c.factors.clear();
  const fs::path dir = fs::temp_directory_path() / "fairbound_emit_empty";
  fs::remove_all(dir);
  c.output = dir;
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(LoadSourceTest, CsvSource) {
  const fs::path p = fs::temp_directory_path() / "fairbound_source.csv";
  std::ofstream(p) << "a,y,s\n1,1,1\n2,-1,0\n3,1,0\n";
  DataSource s;
  s.kind = DataSource::Kind::csv;
  s.path = p;
  s.sensitive_columns = {"s"};
  const IngestResult r = load_source(s, 0);
  EXPECT_EQ(r.dataset.rows(), 3);
  EXPECT_EQ(r.dataset.sensitive_names(), (std::vector<std::string>{"s"}));
  EXPECT_EQ(source_kind_from_string(to_string(DataSource::Kind::bank)), DataSource::Kind::bank);
}

}  // namespace
}  // namespace fairbound
