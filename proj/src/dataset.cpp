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

#include "fairbound/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace fairbound {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Dataset::Dataset(Matrix features, Vector labels, Matrix sensitive,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> sensitive_names, bool has_bias_column,
                 std::vector<bool> numeric_columns)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      sensitive_(std::move(sensitive)),
      feature_names_(std::move(feature_names)),
      sensitive_names_(std::move(sensitive_names)),
      has_bias_column_(has_bias_column),
      numeric_columns_(std::move(numeric_columns)) {
  const Index n = features_.rows();
  if (n < 1) throw std::invalid_argument("dataset needs at least one row");
  if (labels_.size() != n || sensitive_.rows() != n)
    throw std::invalid_argument("features, labels and sensitive block differ in row count");
  if (static_cast<Index>(feature_names_.size()) != features_.cols())
    throw std::invalid_argument("feature_names size does not match feature columns");
  if (static_cast<Index>(sensitive_names_.size()) != sensitive_.cols())
    throw std::invalid_argument("sensitive_names size does not match sensitive columns");
  if (numeric_columns_.empty()) numeric_columns_.assign(features_.cols(), false);
  if (static_cast<Index>(numeric_columns_.size()) != features_.cols())
    throw std::invalid_argument("numeric_columns size does not match feature columns");
  for (Index i = 0; i < n; ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("labels must be -1 or +1");
  }
  for (Index i = 0; i < sensitive_.size(); ++i) {
    const double v = sensitive_.data()[i];
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("sensitive columns must take values in {0, 1}");
  }
  std::set<std::string> names(feature_names_.begin(), feature_names_.end());
  for (const auto& s : sensitive_names_) {
    if (names.contains(s))
      throw std::invalid_argument("sensitive column '" + s + "' also listed as a feature");
  }
  if (has_bias_column_) {
    if (features_.cols() == 0 || (features_.col(features_.cols() - 1).array() != 1.0).any())
      throw std::invalid_argument("bias flag set but last feature column is not all ones");
  }
}

Index Dataset::sensitive_index(const std::string& name) const {
  auto it = std::find(sensitive_names_.begin(), sensitive_names_.end(), name);
  if (it == sensitive_names_.end())
    throw std::out_of_range("no sensitive column named '" + name + "'");
  return static_cast<Index>(it - sensitive_names_.begin());
}

Dataset Dataset::select_rows(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), dim());
  Vector y(static_cast<Index>(rows.size()));
  Matrix z(static_cast<Index>(rows.size()), sensitive_count());
  for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= this->rows()) throw std::out_of_range("row index out of range");
    x.row(r) = features_.row(src);
    y[r] = labels_[src];
    z.row(r) = sensitive_.row(src);
  }
  return Dataset(std::move(x), std::move(y), std::move(z), feature_names_,
                 sensitive_names_, has_bias_column_, numeric_columns_);
}

void SplitPlan::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie strictly between 0 and 1");
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
}

Dataset append_bias(const Dataset& dataset) {
  if (dataset.has_bias_column())
    throw std::invalid_argument("dataset already has a bias column");
  Matrix x(dataset.rows(), dataset.dim() + 1);
  x.leftCols(dataset.dim()) = dataset.features();
  x.col(dataset.dim()).setOnes();
  auto names = dataset.feature_names();
  names.push_back("bias");
  auto numeric = dataset.numeric_columns();
  numeric.push_back(false);
  return Dataset(std::move(x), dataset.labels(), dataset.sensitive(),
                 std::move(names), dataset.sensitive_names(), true,
                 std::move(numeric));
}

SensitiveEncoding encode_sensitive(std::span<const std::string> raw,
                                   const std::string& name) {
  std::set<std::string> values(raw.begin(), raw.end());
  if (values.size() < 2)
    throw std::invalid_argument("sensitive attribute '" + name +
                                "' is constant; its covariance is identically zero");
  const Index n = static_cast<Index>(raw.size());
  SensitiveEncoding out;
  if (values.size() == 2) {
    const std::string& positive = *values.rbegin();
    out.columns.resize(n, 1);
    for (Index i = 0; i < n; ++i)
      out.columns(i, 0) = raw[static_cast<std::size_t>(i)] == positive ? 1.0 : 0.0;
    out.names.push_back(name + "=" + positive);
    return out;
  }
  std::map<std::string, Index> column_of;
  for (const auto& v : values) {
    column_of.emplace(v, static_cast<Index>(out.names.size()));
    out.names.push_back(name + "=" + v);
  }
  out.columns = Matrix::Zero(n, static_cast<Index>(values.size()));
  for (Index i = 0; i < n; ++i)
    out.columns(i, column_of.at(raw[static_cast<std::size_t>(i)])) = 1.0;
  return out;
}

std::vector<Index> split_permutation(Index n, std::uint64_t seed,
                                     int repeat_index) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(repeat_index))));
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle.
  for (std::size_t i = perm.size(); i > 1; --i) {
    const std::uint64_t j = rng() % i;
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

TrainTestSplit split(const Dataset& dataset, const SplitPlan& plan,
                     int repeat_index) {
  plan.validate();
  if (repeat_index < 0 || repeat_index >= plan.repeats)
    throw std::out_of_range("repeat_index outside [0, repeats)");
  const Index n = dataset.rows();
  const Index n_train = static_cast<Index>(std::llround(plan.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw std::invalid_argument("split leaves an empty train or test half");
  const auto perm = split_permutation(n, plan.seed, repeat_index);
  std::vector<Index> train(perm.begin(), perm.begin() + n_train);
  std::vector<Index> test(perm.begin() + n_train, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {dataset.select_rows(train), dataset.select_rows(test)};
}

Standardizer fit_standardizer(const Dataset& reference) {
  const Index d = reference.dim();
  Standardizer s{Vector::Zero(d), Vector::Ones(d)};
  const double n = static_cast<double>(reference.rows());
  for (Index j = 0; j < d; ++j) {
    if (!reference.numeric_columns()[static_cast<std::size_t>(j)]) continue;
    const auto col = reference.features().col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / n;
    s.mean[j] = mean;
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& dataset) const {
  if (mean.size() != dataset.dim())
    throw std::invalid_argument("standardizer fitted on a different column count");
  Matrix x = (dataset.features().rowwise() - mean.transpose()).array().rowwise() /
             scale.transpose().array();
  return Dataset(std::move(x), dataset.labels(), dataset.sensitive(),
                 dataset.feature_names(), dataset.sensitive_names(),
                 dataset.has_bias_column(), dataset.numeric_columns());
}

}  // namespace fairbound
