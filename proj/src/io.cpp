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

#include "fairbound/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fairbound {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double number_from_json(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

optim::SolverStatus status_from_string(const std::string& name) {
  for (const auto s : {optim::SolverStatus::converged, optim::SolverStatus::max_iter,
                       optim::SolverStatus::infeasible})
    if (optim::to_string(s) == name) return s;
  throw std::invalid_argument("unknown solver status: " + name);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

Matrix matrix_from_json(const Json& j, Index cols) {
  Matrix m(static_cast<Index>(j.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const Vector row = vector_from_json(j.at(static_cast<std::size_t>(i)));
    if (row.size() != cols) throw std::invalid_argument("ragged matrix in JSON");
    m.row(i) = row.transpose();
  }
  return m;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

TrainingMeta meta_from_json(const Json& j) {
  TrainingMeta m;
  m.classifier = classifier_from_string(j.at("classifier").get<std::string>());
  m.mode = mode_from_string(j.at("mode").get<std::string>());
  m.thresholds = vector_from_json(j.at("thresholds"));
  if (!j.at("gamma").is_null()) m.gamma = j.at("gamma").get<double>();
  m.status = status_from_string(j.at("status").get<std::string>());
  m.converged = j.at("converged").get<bool>();
  m.auto_ridge = j.at("auto_ridge").get<bool>();
  m.l2_penalty = number_from_json(j.at("l2_penalty"));
  m.objective = number_from_json(j.at("objective"));
  m.loss = number_from_json(j.at("loss"));
  m.reference_loss = number_from_json(j.at("reference_loss"));
  m.svm_cost = number_from_json(j.at("svm_cost"));
  const Json& k = j.at("kkt");
  m.kkt.stationarity = number_from_json(k.at("stationarity"));
  m.kkt.primal_violation = number_from_json(k.at("primal_violation"));
  m.kkt.complementarity = number_from_json(k.at("complementarity"));
  m.iterations = j.at("iterations").get<int>();
  return m;
}

}  // namespace

Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vector vector_from_json(const Json& json) {
  if (!json.is_array()) throw std::invalid_argument("expected a JSON array");
  Vector v(static_cast<Index>(json.size()));
  for (Index i = 0; i < v.size(); ++i) {
    const Json& e = json.at(static_cast<std::size_t>(i));
    v[i] = e.is_null() ? std::numeric_limits<double>::infinity() : e.get<double>();
  }
  return v;
}

Json to_json(const GroupRates& rates) {
  return Json{{"positive_rate_z1", rates.rate_z1},
              {"positive_rate_z0", rates.rate_z0},
              {"n_z1", rates.n_z1},
              {"n_z0", rates.n_z0}};
}

Json to_json(const FairnessReport& report) {
  Json cov = Json::array(), p = Json::array(), cv = Json::array(), rates = Json::array(),
       counts = Json::array();
  for (std::size_t k = 0; k < report.columns.size(); ++k) {
    cov.push_back(number(report.covariance[k]));
    p.push_back(number(report.p_percent[k]));
    cv.push_back(number(report.cv_score[k]));
    rates.push_back(Json::array({report.rates[k].rate_z1, report.rates[k].rate_z0}));
    counts.push_back(Json::array({report.rates[k].n_z1, report.rates[k].n_z0}));
  }
  return Json{{"columns", report.columns},
              {"covariance_per_column", cov},
              {"p_percent", p},
              {"cv_score", cv},
              {"group_positive_rates", rates},
              {"n_per_group", counts}};
}

Json to_json(const IngestReport& report) {
  Json groups = Json::array();
  for (const GroupCount& g : report.groups)
    groups.push_back(Json{{"attribute", g.attribute},
                          {"value", g.value},
                          {"total", g.total},
                          {"positive", g.positive}});
  return Json{{"source", report.source},
              {"rows_read", report.rows_read},
              {"rows_kept", report.rows_kept},
              {"rows_dropped_missing", report.rows_dropped_missing},
              {"positive", report.positive},
              {"feature_count", report.feature_count},
              {"groups", groups}};
}

Json to_json(const TrainingMeta& meta) {
  return Json{{"classifier", to_string(meta.classifier)},
              {"mode", to_string(meta.mode)},
              {"thresholds", to_json(meta.thresholds)},
              {"gamma", meta.gamma ? number(*meta.gamma) : Json(nullptr)},
              {"status", optim::to_string(meta.status)},
              {"converged", meta.converged},
              {"auto_ridge", meta.auto_ridge},
              {"l2_penalty", number(meta.l2_penalty)},
              {"objective", number(meta.objective)},
              {"loss", number(meta.loss)},
              {"reference_loss", number(meta.reference_loss)},
              {"svm_cost", number(meta.svm_cost)},
              {"kkt",
               {{"stationarity", number(meta.kkt.stationarity)},
                {"primal_violation", number(meta.kkt.primal_violation)},
                {"complementarity", number(meta.kkt.complementarity)}}},
              {"iterations", meta.iterations}};
}

Json to_json(const Model& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model))
    return Json{{"kind", "linear"}, {"theta", to_json(lin->theta)}, {"training_meta", to_json(lin->meta)}};
  const auto& k = std::get<KernelModel>(model);
  return Json{{"kind", "kernel"},
              {"kernel", {{"kind", to_string(k.kernel.kind)}, {"rbf_gamma", k.kernel.rbf_gamma}}},
              {"svm_cost", k.svm_cost},
              {"intercept", k.intercept},
              {"alphas", to_json(k.alphas)},
              {"support_labels", to_json(k.support_labels)},
              {"support_points", matrix_to_json(k.support_points)},
              {"training_meta", to_json(k.meta)}};
}

Model model_from_json(const Json& json) {
  const std::string kind = json.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearModel m;
    m.theta = vector_from_json(json.at("theta"));
    m.meta = meta_from_json(json.at("training_meta"));
    return m;
  }
  if (kind != "kernel") throw std::invalid_argument("unknown model kind: " + kind);
  KernelModel m;
  m.kernel.kind = kernel_kind_from_string(json.at("kernel").at("kind").get<std::string>());
  m.kernel.rbf_gamma = json.at("kernel").at("rbf_gamma").get<double>();
  m.svm_cost = json.at("svm_cost").get<double>();
  m.intercept = json.at("intercept").get<double>();
  m.alphas = vector_from_json(json.at("alphas"));
  m.support_labels = vector_from_json(json.at("support_labels"));
  const Json& points = json.at("support_points");
  const Index cols = points.empty() ? 0 : static_cast<Index>(points.at(0).size());
  m.support_points = matrix_from_json(points, cols);
  if (m.alphas.size() != m.support_points.rows() || m.support_labels.size() != m.alphas.size())
    throw std::invalid_argument("kernel model arrays differ in length");
  m.meta = meta_from_json(json.at("training_meta"));
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  const Index d = dataset.dim() - (dataset.has_bias_column() ? 1 : 0);
  std::string text;
  for (Index j = 0; j < d; ++j) text += dataset.feature_names()[static_cast<std::size_t>(j)] + ",";
  text += "y";
  for (const auto& name : dataset.sensitive_names()) text += "," + name;
  text += "\n";
  for (Index i = 0; i < dataset.rows(); ++i) {
    for (Index j = 0; j < d; ++j) text += format_double(dataset.features()(i, j)) + ",";
    text += format_double(dataset.labels()[i]);
    for (Index k = 0; k < dataset.sensitive_count(); ++k)
      text += "," + format_double(dataset.sensitive()(i, k));
    text += "\n";
  }
  write_text(path, text);
}

const std::vector<double>& NumericTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no column named '" + name + "'");
  return columns[static_cast<std::size_t>(it - header.begin())];
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  table.header = split_csv_line(line);
  table.columns.assign(table.header.size(), {});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " fields");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (used != cells[c].size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": not a number: '" + cells[c] + "'");
      table.columns[c].push_back(v);
    }
  }
  return table;
}

Dataset read_dataset_csv(const std::filesystem::path& path, const std::string& label,
                         const std::vector<std::string>& sensitive) {
  const NumericTable table = read_numeric_csv(path);
  const auto& y = table.column(label);
  const Index n = static_cast<Index>(y.size());
  Matrix s(n, static_cast<Index>(sensitive.size()));
  for (std::size_t k = 0; k < sensitive.size(); ++k)
    s.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(table.column(sensitive[k]).data(), n);
  std::vector<std::string> names;
  std::vector<const std::vector<double>*> cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& h = table.header[c];
    if (h == label || h == "bias" ||
        std::find(sensitive.begin(), sensitive.end(), h) != sensitive.end())
      continue;
    names.push_back(h);
    cols.push_back(&table.columns[c]);
  }
  Matrix x(n, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    x.col(static_cast<Index>(j)) = Eigen::Map<const Vector>(cols[j]->data(), n);
  return Dataset(std::move(x), Eigen::Map<const Vector>(y.data(), n), std::move(s),
                 std::move(names), sensitive);
}

}  // namespace fairbound
