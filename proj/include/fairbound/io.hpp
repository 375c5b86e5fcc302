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

#include <json.hpp>

#include "fairbound/classifiers.hpp"
#include "fairbound/dataset.hpp"
#include "fairbound/ingest.hpp"
#include "fairbound/metrics.hpp"

namespace fairbound {

using Json = nlohmann::ordered_json;

Json to_json(const GroupRates& rates);
Json to_json(const FairnessReport& report);
Json to_json(const IngestReport& report);
Json to_json(const TrainingMeta& meta);
Json to_json(const Model& model);

// Inverse of to_json(Model); meta is restored as far as it was written.
Model model_from_json(const Json& json);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& json);

// Non-finite doubles become null so the output stays valid JSON.
Json number(double value);

/// Header: feature names (bias column omitted), "y", sensitive names.
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Reads a numeric CSV with a header row. `label` names the {-1,+1} column,
/// `sensitive` the 0/1 columns; every other column is a feature. A column
/// named "bias" is ignored (callers append their own).
Dataset read_dataset_csv(const std::filesystem::path& path, const std::string& label,
                         const std::vector<std::string>& sensitive);

/// Header plus numeric rows, keyed by column name. Used by the audit command.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

NumericTable read_numeric_csv(const std::filesystem::path& path);

// Creates the parent directory if needed and replaces the file.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fairbound
