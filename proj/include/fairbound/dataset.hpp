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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fairbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Labelled data with a sensitive-attribute block that is kept apart from the
/// features a model is allowed to read.
///
/// Rows are users. `features` is what a classifier sees; `sensitive` holds
/// 0/1 columns (binary attributes or one-hot blocks of polyvalent ones) used
/// only for fairness constraints and audits. The constructor validates every
/// invariant and the object is immutable afterwards.
class Dataset {
 public:
  Dataset(Matrix features, Vector labels, Matrix sensitive,
          std::vector<std::string> feature_names,
          std::vector<std::string> sensitive_names, bool has_bias_column = false,
          std::vector<bool> numeric_columns = {});

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  const Matrix& sensitive() const { return sensitive_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<std::string>& sensitive_names() const {
    return sensitive_names_;
  }
  bool has_bias_column() const { return has_bias_column_; }
  // Columns eligible for standardization (continuous attributes).
  const std::vector<bool>& numeric_columns() const { return numeric_columns_; }

  Index rows() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  Index sensitive_count() const { return sensitive_.cols(); }

  // Index of a sensitive column by name; throws std::out_of_range.
  Index sensitive_index(const std::string& name) const;

  // Same columns, rows picked in the given order.
  Dataset select_rows(std::span<const Index> rows) const;

 private:
  Matrix features_;
  Vector labels_;
  Matrix sensitive_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> sensitive_names_;
  bool has_bias_column_;
  std::vector<bool> numeric_columns_;
};

struct SplitPlan {
  double train_fraction = 0.7;
  int repeats = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SensitiveEncoding {
  Matrix columns;                   // N x K, entries in {0, 1}
  std::vector<std::string> names;   // K labels
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Appends a constant-one feature column named "bias".
Dataset append_bias(const Dataset& dataset);

// Binary attributes become one column with the lexicographically larger value
// mapped to 1 (named "<name>=<value>"). Attributes with more than two values
// become a full one-hot block in sorted value order.
SensitiveEncoding encode_sensitive(std::span<const std::string> raw,
                                   const std::string& name);

// Uniform, unstratified row partition. |train| = round(fraction * N); the
// permutation depends only on (plan.seed, repeat_index).
TrainTestSplit split(const Dataset& dataset, const SplitPlan& plan,
                     int repeat_index);

// Row permutation used by split(); exposed for tests.
std::vector<Index> split_permutation(Index n, std::uint64_t seed,
                                     int repeat_index);

struct Standardizer {
  Vector mean;
  Vector scale;  // 1 for non-numeric columns and for zero-variance columns

  Dataset apply(const Dataset& dataset) const;
};

// Mean / standard deviation of the numeric columns of `reference`.
Standardizer fit_standardizer(const Dataset& reference);

}  // namespace fairbound
