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

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairbound/dataset.hpp"

namespace fairbound {
namespace {

Dataset Tiny(Index n) {
  Matrix x(n, 2);
  Vector y(n);
  Matrix z(n, 1);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = static_cast<double>(10 * i);
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
    z(i, 0) = i % 3 == 0 ? 1.0 : 0.0;
  }
  return Dataset(x, y, z, {"a", "b"}, {"z"});
}

TEST(DatasetTest, RejectsBadInvariants) {
  const Matrix x = Matrix::Zero(2, 1);
  const Matrix z = Matrix::Zero(2, 1);
  EXPECT_THROW(Dataset(x, Vector{{1.0, 0.0}}, z, {"a"}, {"z"}), std::invalid_argument);
  EXPECT_THROW(Dataset(x, Vector{{1.0, -1.0}}, Matrix::Constant(2, 1, 0.5), {"a"}, {"z"}),
               std::invalid_argument);
  EXPECT_THROW(Dataset(x, Vector{{1.0, -1.0}}, z, {"z"}, {"z"}), std::invalid_argument);
  EXPECT_THROW(Dataset(Matrix(0, 1), Vector(0), Matrix(0, 1), {"a"}, {"z"}),
               std::invalid_argument);
  EXPECT_THROW(Dataset(x, Vector{{1.0, -1.0}}, z, {"a"}, {"z"}, /*has_bias_column=*/true),
               std::invalid_argument);
}

TEST(AppendBiasTest, AppendsOnesColumn) {
  const Dataset d(Matrix{{3, 4}, {5, 6}}, Vector{{1, -1}}, Matrix{{1}, {0}}, {"u", "v"}, {"z"});
  const Dataset b = append_bias(d);
  EXPECT_EQ(b.features(), (Matrix{{3, 4, 1}, {5, 6, 1}}));
  EXPECT_TRUE(b.has_bias_column());
  EXPECT_EQ(b.feature_names().back(), "bias");
  EXPECT_EQ(b.labels(), d.labels());
  EXPECT_EQ(b.sensitive(), d.sensitive());
}

TEST(AppendBiasTest, EmptyFeatureSetBecomesOnes) {
  const Dataset d(Matrix(2, 0), Vector{{1, -1}}, Matrix{{1}, {0}}, {}, {"z"});
  EXPECT_EQ(append_bias(d).features(), Matrix::Ones(2, 1));
}

TEST(AppendBiasTest, SecondAppendThrows) {
  const Dataset b = append_bias(Tiny(4));
  EXPECT_THROW(append_bias(b), std::invalid_argument);
}

TEST(EncodeSensitiveTest, BinaryBecomesOneColumn) {
  const std::vector<std::string> raw{"F", "M", "F"};
  const SensitiveEncoding e = encode_sensitive(raw, "sex");
  ASSERT_EQ(e.columns.cols(), 1);
  EXPECT_EQ(e.columns.col(0), (Vector{{0, 1, 0}}));
  EXPECT_EQ(e.names, std::vector<std::string>{"sex=M"});
}

TEST(EncodeSensitiveTest, FiveValuesGiveFullOneHot) {
  const std::vector<std::string> raw{"White", "Black", "Other", "Asian-Pac-Islander",
                                     "Amer-Indian-Eskimo", "White", "Black"};
  const SensitiveEncoding e = encode_sensitive(raw, "race");
  ASSERT_EQ(e.columns.cols(), 5);
  EXPECT_EQ(e.columns.rowwise().sum(), Vector::Ones(7));
  EXPECT_EQ(e.names.front(), "race=Amer-Indian-Eskimo");
  EXPECT_EQ(e.names.back(), "race=White");
  EXPECT_EQ(e.columns(0, 4), 1.0);
  // Same input, same layout.
  const SensitiveEncoding again = encode_sensitive(raw, "race");
  EXPECT_EQ(again.columns, e.columns);
  EXPECT_EQ(again.names, e.names);
}

TEST(EncodeSensitiveTest, ConstantColumnThrows) {
  const std::vector<std::string> raw{"a", "a", "a"};
  EXPECT_THROW(encode_sensitive(raw, "x"), std::invalid_argument);
}

TEST(SplitTest, SizesAndDisjointness) {
  const Dataset d = Tiny(10);
  const SplitPlan plan{0.7, 5, 42};
  const TrainTestSplit s = split(d, plan, 0);
  EXPECT_EQ(s.train.rows(), 7);
  EXPECT_EQ(s.test.rows(), 3);
  std::set<double> seen;
  for (Index i = 0; i < 7; ++i) seen.insert(s.train.features()(i, 0));
  for (Index i = 0; i < 3; ++i) seen.insert(s.test.features()(i, 0));
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(s.train.feature_names(), d.feature_names());
  EXPECT_EQ(s.test.sensitive_names(), d.sensitive_names());
}

TEST(SplitTest, DeterministicPerSeedAndRepeat) {
  const Dataset d = Tiny(50);
  const SplitPlan plan{0.7, 5, 7};
  EXPECT_EQ(split(d, plan, 2).train.features(), split(d, plan, 2).train.features());
  EXPECT_NE(split(d, plan, 2).train.features(), split(d, plan, 3).train.features());
  EXPECT_EQ(split_permutation(50, 7, 1), split_permutation(50, 7, 1));
}

TEST(SplitTest, RepeatIndexOutOfRange) {
  const SplitPlan plan{0.7, 5, 0};
  EXPECT_THROW(split(Tiny(10), plan, 5), std::out_of_range);
  EXPECT_THROW(split(Tiny(10), plan, -1), std::out_of_range);
}

TEST(SplitTest, CommutesWithAppendBias) {
  const Dataset d = Tiny(30);
  const SplitPlan plan{0.7, 5, 3};
  const TrainTestSplit a = split(append_bias(d), plan, 1);
  const TrainTestSplit b = split(d, plan, 1);
  EXPECT_EQ(a.train.features().leftCols(2), b.train.features());
  EXPECT_EQ(a.test.features().leftCols(2), b.test.features());
}

TEST(SplitPlanTest, Validates) {
  EXPECT_THROW((SplitPlan{0.0, 5, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((SplitPlan{1.0, 5, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((SplitPlan{0.5, 0, 0}.validate()), std::invalid_argument);
}

TEST(StandardizerTest, OnlyNumericColumnsChange) {
  const Dataset d(Matrix{{1, 0}, {3, 1}, {5, 0}}, Vector{{1, -1, 1}}, Matrix{{1}, {0}, {1}},
                  {"num", "flag"}, {"z"}, false, {true, false});
  const Standardizer s = fit_standardizer(d);
  const Dataset t = s.apply(d);
  EXPECT_NEAR(t.features().col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(t.features().col(0).squaredNorm() / 3.0, 1.0, 1e-12);
  EXPECT_EQ(t.features().col(1), d.features().col(1));
}

}  // namespace
}  // namespace fairbound
