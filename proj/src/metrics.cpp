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

#include "fairbound/metrics.hpp"

namespace fairbound {

FairnessReport audit(const Vector& distances, const Matrix& sensitive,
                     const std::vector<std::string>& names) {
  if (distances.size() != sensitive.rows())
    throw std::invalid_argument("distances not aligned with dataset rows");
  if (static_cast<Index>(names.size()) != sensitive.cols())
    throw std::invalid_argument("one name per sensitive column required");
  FairnessReport report;
  report.columns = names;
  for (Index k = 0; k < sensitive.cols(); ++k) {
    const auto z = sensitive.col(k);
    const GroupRates g = group_rates(distances, z);
    report.covariance.push_back(boundary_covariance(z, distances));
    report.p_percent.push_back(p_percent_from_rates(g));
    report.cv_score.push_back(cv_score_from_rates(g));
    report.rates.push_back(g);
  }
  return report;
}

FairnessReport audit(const Vector& distances, const Dataset& dataset) {
  return audit(distances, dataset.sensitive(), dataset.sensitive_names());
}

double accuracy(const Vector& distances, const Vector& labels) {
  if (distances.size() != labels.size())
    throw std::invalid_argument("distances and labels differ in length");
  if (labels.size() == 0) return 0.0;
  Index hits = 0;
  for (Index i = 0; i < labels.size(); ++i)
    hits += ((distances[i] >= 0.0) ? 1.0 : -1.0) == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace fairbound
