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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairbound/classifiers.hpp"
#include "fairbound/dataset.hpp"
#include "fairbound/ingest.hpp"
#include "fairbound/io.hpp"
#include "fairbound/metrics.hpp"
#include "fairbound/synthetic.hpp"

namespace fairbound {

struct DataSource {
  enum class Kind { synthetic, adult, bank, csv };
  Kind kind = Kind::synthetic;
  SynthConfig synthetic;  // seed is overwritten by ExperimentConfig::seed
  std::filesystem::path path;
  AdultSensitive adult_sensitive = AdultSensitive::gender;
  // csv only.
  std::string label_column = "y";
  std::vector<std::string> sensitive_columns{"z"};
};

std::string to_string(DataSource::Kind kind);
DataSource::Kind source_kind_from_string(const std::string& name);

/// One experiment: a data source, a classifier and a grid over exactly one
/// mode parameter.
///
/// fairness_constrained takes either explicit threshold vectors or factors
/// a with c_k = a |cov_k(theta*)|. accuracy_constrained takes gammas.
/// fine_grained takes gammas too: rows with z = 1 in `protected_column`
/// that theta* puts on the positive side must stay there, every other row
/// gets the allowance gamma. unconstrained runs a single cell and takes no
/// grid.
struct ExperimentConfig {
  DataSource data;
  ClassifierKind classifier = ClassifierKind::logreg;
  TrainingMode mode = TrainingMode::fairness_constrained;
  std::vector<Vector> thresholds;
  std::vector<double> factors;
  std::vector<double> gammas;
  std::string protected_column;  // fine_grained; empty means the first column
  // Classifier settings shared by every cell (mode fields are ignored).
  FitSpec fit;
  SplitPlan split;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  int threads = 0;  // 0: hardware concurrency
  bool keep_models = false;

  // Throws std::invalid_argument.
  void validate() const;
  std::size_t grid_size() const;
};

ExperimentConfig config_from_json(const Json& json);
Json to_json(const ExperimentConfig& config);

struct CellResult {
  std::size_t grid_index = 0;
  int repeat = 0;
  // The grid value: factor a, gamma, or the index of a threshold vector.
  double parameter = 0.0;
  Vector thresholds;  // thresholds used (fairness_constrained)
  std::optional<double> gamma;
  bool ok = false;
  std::string error;
  TrainingMeta meta;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  FairnessReport train_fairness;
  FairnessReport test_fairness;
  double loss = 0.0;
  // L / L(theta*).
  double loss_ratio = 0.0;
  // (L - L*) / (L(c = 0) - L*); fairness_constrained only, NaN elsewhere.
  double relative_loss = 0.0;
  // The mode's constraints hold on the training rows.
  bool constraints_satisfied = false;
  // Rows of the protected set that crossed to d < 0 (fine_grained).
  Index protected_flips = 0;
  double wall_seconds = 0.0;
  std::optional<Model> model;
};

struct RepeatBaseline {
  int repeat = 0;
  TrainingMeta meta;
  Vector covariance;  // cov_k(theta*) on the training rows
  double loss = 0.0;
  double zero_threshold_loss = 0.0;  // NaN outside fairness_constrained
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  FairnessReport train_fairness;
  FairnessReport test_fairness;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<std::string> sensitive_names;
  std::vector<RepeatBaseline> baselines;
  // Ordered by (grid_index, repeat).
  std::vector<CellResult> cells;
  std::optional<IngestReport> ingest;

  const CellResult& cell(std::size_t grid_index, int repeat) const;
};

/// Loads or generates the configured data.
IngestResult load_source(const DataSource& source, std::uint64_t seed);

SweepResult run_sweep(const ExperimentConfig& config);

/// Writes <dir>/cells.csv, <dir>/summary.json and the plot files
/// <dir>/fig_*.csv into `dir`.
void emit_results(const SweepResult& result, const std::filesystem::path& dir);

/// The flat per-cell table as written to cells.csv.
std::string cells_csv(const SweepResult& result);
Json summary_json(const SweepResult& result);

}  // namespace fairbound
