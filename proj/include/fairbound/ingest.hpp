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
#include <string>
#include <vector>

#include "fairbound/dataset.hpp"

namespace fairbound {

enum class AdultSensitive { gender, race, gender_race };

std::string to_string(AdultSensitive choice);
AdultSensitive adult_sensitive_from_string(const std::string& name);

struct GroupCount {
  std::string attribute;
  std::string value;
  Index total = 0;
  Index positive = 0;
};

struct IngestReport {
  std::string source;
  Index rows_read = 0;
  Index rows_kept = 0;
  Index rows_dropped_missing = 0;
  Index positive = 0;
  Index feature_count = 0;  // including the bias column
  std::vector<GroupCount> groups;

  // Count for (attribute, value); throws std::out_of_range.
  const GroupCount& group(const std::string& attribute, const std::string& value) const;
};

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

/// UCI Adult (comma separated, one or more files concatenated). Rows with a
/// "?" field are dropped; labels "<=50K" / ">50K" with an optional trailing
/// period. Categorical non-sensitive attributes are one-hot encoded (with
/// schooling below HS-grad grouped in two levels and native-country reduced
/// to United-States / Non-United-States), the six continuous ones
/// standardized, and a bias column appended.
IngestResult load_adult(const std::vector<std::filesystem::path>& paths, AdultSensitive choice);

/// UCI bank-additional-full (semicolon separated, quoted, with header).
/// z = 1 iff 25 <= age <= 60; age itself is not a feature.
IngestResult load_bank(const std::filesystem::path& path);

/// <dir>/adult.data and <dir>/adult.test.
std::vector<std::filesystem::path> adult_files(const std::filesystem::path& dir);

}  // namespace fairbound
