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

#include "fairbound/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "fairbound/losses.hpp"

namespace fairbound {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Slack of the train-side constraint checks.
constexpr double kCovarianceSlack = 1e-5;
constexpr double kLossSlack = 1e-6;
constexpr double kPointSlack = 1e-9;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector train_covariances(const Vector& distances, const Dataset& train) {
  Vector c(train.sensitive_count());
  for (Index k = 0; k < c.size(); ++k) c[k] = boundary_covariance(train.sensitive().col(k), distances);
  return c;
}

// Everything a repeat shares between its cells.
struct RepeatContext {
  std::optional<Dataset> train;
  std::optional<Dataset> test;
  std::optional<Model> baseline;
  RepeatBaseline summary;
  std::string error;
  // fine_grained: rows that must keep d >= 0.
  std::vector<Index> protected_rows;
};

FitSpec cell_spec(const ExperimentConfig& config, const RepeatContext& ctx, std::size_t g,
                  CellResult& cell) {
  FitSpec spec = config.fit;
  spec.mode = config.mode;
  spec.covariance_thresholds = Vector();
  spec.gamma.reset();
  spec.per_point_gammas = Vector();
  spec.protected_indices.clear();
  switch (config.mode) {
    case TrainingMode::unconstrained: break;
    case TrainingMode::fairness_constrained:
      if (!config.factors.empty()) {
        cell.parameter = config.factors[g];
        spec.covariance_thresholds = config.factors[g] * ctx.summary.covariance.cwiseAbs();
      } else {
        cell.parameter = static_cast<double>(g);
        spec.covariance_thresholds = config.thresholds[g];
      }
      cell.thresholds = spec.covariance_thresholds;
      break;
    case TrainingMode::accuracy_constrained:
      cell.parameter = config.gammas[g];
      cell.gamma = spec.gamma = config.gammas[g];
      break;
    case TrainingMode::fine_grained: {
      cell.parameter = config.gammas[g];
      cell.gamma = config.gammas[g];
      const Index n = ctx.train->rows();
      spec.per_point_gammas = Vector::Constant(n, config.gammas[g]);
      for (const Index i : ctx.protected_rows)
        spec.per_point_gammas[i] = std::numeric_limits<double>::infinity();
      spec.protected_indices = ctx.protected_rows;
      break;
    }
  }
  return spec;
}

// Checks the mode's constraints on the training rows with the documented
// slacks; also counts protected rows that crossed the boundary.
bool check_constraints(const ExperimentConfig& config, const RepeatContext& ctx,
                       const FitSpec& spec, const Model& model, const Vector& train_d,
                       Index& flips) {
  const Dataset& train = *ctx.train;
  flips = 0;
  switch (config.mode) {
    case TrainingMode::unconstrained: return true;
    case TrainingMode::fairness_constrained: {
      const Vector c = train_covariances(train_d, train);
      for (Index k = 0; k < c.size(); ++k)
        if (std::isfinite(spec.covariance_thresholds[k]) &&
            std::abs(c[k]) > spec.covariance_thresholds[k] + kCovarianceSlack)
          return false;
      return true;
    }
    case TrainingMode::accuracy_constrained: {
      const auto& lin = std::get<LinearModel>(model);
      const auto& base = std::get<LinearModel>(*ctx.baseline);
      const LogisticLoss loss(train.features(), train.labels(), lin.meta.l2_penalty);
      const double bound = (1.0 + *spec.gamma) * loss(base.theta, nullptr) * (1.0 + kLossSlack);
      return loss(lin.theta, nullptr) <= bound;
    }
    case TrainingMode::fine_grained: {
      const auto& lin = std::get<LinearModel>(model);
      const auto& base = std::get<LinearModel>(*ctx.baseline);
      const LogisticLoss loss(train.features(), train.labels());
      const Vector now = loss.per_point(lin.theta);
      const Vector star = loss.per_point(base.theta);
      bool ok = true;
      for (const Index i : ctx.protected_rows)
        if (train_d[i] < 0.0) {
          ++flips;
          ok = false;
        }
      for (Index i = 0; i < train.rows(); ++i)
        if (std::isfinite(spec.per_point_gammas[i]) &&
            now[i] > (1.0 + spec.per_point_gammas[i]) * star[i] + kPointSlack)
          ok = false;
      return ok;
    }
  }
  return false;
}

void run_cell(const ExperimentConfig& config, const RepeatContext& ctx, CellResult& cell) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!ctx.error.empty()) throw std::runtime_error("baseline failed: " + ctx.error);
    const FitSpec spec = cell_spec(config, ctx, cell.grid_index, cell);
    const LinearModel* base = std::get_if<LinearModel>(&*ctx.baseline);
    Model model = config.mode == TrainingMode::unconstrained
                      ? *ctx.baseline
                      : fit(config.classifier, *ctx.train, spec, base);
    const Vector train_d = decision_values(model, ctx.train->features());
    const Vector test_d = decision_values(model, ctx.test->features());
    cell.meta = meta(model);
    cell.train_accuracy = accuracy(train_d, ctx.train->labels());
    cell.test_accuracy = accuracy(test_d, ctx.test->labels());
    cell.train_fairness = audit(train_d, *ctx.train);
    cell.test_fairness = audit(test_d, *ctx.test);
    cell.loss = cell.meta.loss;
    cell.loss_ratio = cell.loss / ctx.summary.loss;
    cell.constraints_satisfied =
        check_constraints(config, ctx, spec, model, train_d, cell.protected_flips);
    cell.ok = true;
    if (config.keep_models) cell.model = std::move(model);
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  cell.wall_seconds = seconds_since(start);
}

void prepare_repeat(const ExperimentConfig& config, const Dataset& data, int repeat,
                    RepeatContext& ctx) {
  ctx.summary.repeat = repeat;
  ctx.summary.zero_threshold_loss = kNaN;
  try {
    TrainTestSplit s = split(data, config.split, repeat);
    if (config.data.kind == DataSource::Kind::adult || config.data.kind == DataSource::Kind::bank) {
      const Standardizer st = fit_standardizer(s.train);
      ctx.train = st.apply(s.train);
      ctx.test = st.apply(s.test);
    } else {
      ctx.train = std::move(s.train);
      ctx.test = std::move(s.test);
    }
    FitSpec spec = config.fit;
    spec.mode = TrainingMode::unconstrained;
    spec.covariance_thresholds = Vector();
    spec.gamma.reset();
    spec.per_point_gammas = Vector();
    spec.protected_indices.clear();
    // The epigraph modes are measured against the logistic baseline.
    Model base = fit(config.classifier, *ctx.train, spec);
    const Vector train_d = decision_values(base, ctx.train->features());
    const Vector test_d = decision_values(base, ctx.test->features());
    ctx.summary.meta = meta(base);
    ctx.summary.covariance = train_covariances(train_d, *ctx.train);
    ctx.summary.loss = meta(base).loss;
    ctx.summary.train_accuracy = accuracy(train_d, ctx.train->labels());
    ctx.summary.test_accuracy = accuracy(test_d, ctx.test->labels());
    ctx.summary.train_fairness = audit(train_d, *ctx.train);
    ctx.summary.test_fairness = audit(test_d, *ctx.test);
    if (config.mode == TrainingMode::fine_grained) {
      const Index col = config.protected_column.empty()
                            ? 0
                            : ctx.train->sensitive_index(config.protected_column);
      for (Index i = 0; i < ctx.train->rows(); ++i)
        if (ctx.train->sensitive()(i, col) == 1.0 && train_d[i] >= 0.0)
          ctx.protected_rows.push_back(i);
    }
    ctx.baseline = std::move(base);
  } catch (const std::exception& e) {
    ctx.error = e.what();
  }
}

// L(c = 0) for the relative-loss normalization; reuses a zero cell when the
// grid has one.
void zero_threshold_loss(const ExperimentConfig& config, RepeatContext& ctx,
                         const std::vector<CellResult*>& cells) {
  if (config.mode != TrainingMode::fairness_constrained || !ctx.error.empty()) return;
  for (const CellResult* c : cells)
    if (c->ok && (c->thresholds.array() == 0.0).all()) {
      ctx.summary.zero_threshold_loss = c->loss;
      return;
    }
  FitSpec spec = config.fit;
  spec.mode = TrainingMode::fairness_constrained;
  spec.gamma.reset();
  spec.per_point_gammas = Vector();
  spec.protected_indices.clear();
  spec.covariance_thresholds = Vector::Zero(ctx.train->sensitive_count());
  try {
    ctx.summary.zero_threshold_loss = meta(fit(config.classifier, *ctx.train, spec)).loss;
  } catch (const std::exception&) {
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Stats {
  double mean = kNaN;
  double sd = kNaN;
};

// Mean and sample standard deviation over the finite values.
Stats stats(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  Stats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

Json stats_json(const std::vector<double>& values) {
  const Stats s = stats(values);
  return Json{{"mean", number(s.mean)}, {"sd", number(s.sd)}};
}

// Cells of one grid point that finished.
std::vector<const CellResult*> grid_cells(const SweepResult& r, std::size_t g) {
  std::vector<const CellResult*> out;
  for (const CellResult& c : r.cells)
    if (c.grid_index == g && c.ok) out.push_back(&c);
  return out;
}

template <typename F>
std::vector<double> collect(const std::vector<const CellResult*>& cells, F f) {
  std::vector<double> v;
  for (const CellResult* c : cells) v.push_back(f(*c));
  return v;
}

double mean_of(const std::vector<const CellResult*>& cells,
               const std::function<double(const CellResult&)>& f) {
  return stats(collect(cells, f)).mean;
}

}  // namespace

std::string to_string(DataSource::Kind kind) {
  switch (kind) {
    case DataSource::Kind::synthetic: return "synthetic";
    case DataSource::Kind::adult: return "adult";
    case DataSource::Kind::bank: return "bank";
    case DataSource::Kind::csv: return "csv";
  }
  return "?";
}

DataSource::Kind source_kind_from_string(const std::string& name) {
  for (const auto k : {DataSource::Kind::synthetic, DataSource::Kind::adult,
                       DataSource::Kind::bank, DataSource::Kind::csv})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown data source: " + name);
}

std::size_t ExperimentConfig::grid_size() const {
  switch (mode) {
    case TrainingMode::unconstrained: return 1;
    case TrainingMode::fairness_constrained:
      return factors.empty() ? thresholds.size() : factors.size();
    case TrainingMode::accuracy_constrained:
    case TrainingMode::fine_grained: return gammas.size();
  }
  return 0;
}

void ExperimentConfig::validate() const {
  split.validate();
  fit.solver.validate();
  if (data.kind == DataSource::Kind::synthetic) data.synthetic.validate();
  const int populated = !thresholds.empty() + !factors.empty() + !gammas.empty();
  if (mode == TrainingMode::unconstrained) {
    if (populated != 0) throw std::invalid_argument("unconstrained runs take no grid");
  } else {
    if (populated == 0) throw std::invalid_argument("empty parameter grid");
    if (populated > 1) throw std::invalid_argument("exactly one parameter grid may be set");
    const bool fair_grid = !thresholds.empty() || !factors.empty();
    if ((mode == TrainingMode::fairness_constrained) != fair_grid)
      throw std::invalid_argument("grid does not match the training mode");
  }
  for (double a : factors)
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("factors must be >= 0");
  for (double g : gammas)
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gammas must be >= 0");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i].size() != thresholds[0].size())
      throw std::invalid_argument("threshold vectors differ in length");
  const bool epigraph =
      mode == TrainingMode::accuracy_constrained || mode == TrainingMode::fine_grained;
  if (epigraph && classifier != ClassifierKind::logreg)
    throw std::invalid_argument(to_string(mode) + " is only defined for logreg");
  if (!protected_column.empty() && mode != TrainingMode::fine_grained)
    throw std::invalid_argument("protected_column is only used by fine_grained");
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  if (j.contains("data")) {
    const Json& d = j.at("data");
    c.data.kind = source_kind_from_string(d.value("source", std::string("synthetic")));
    if (d.contains("variant"))
      c.data.synthetic.variant = variant_from_string(d.at("variant").get<std::string>());
    if (d.contains("n")) c.data.synthetic.n = d.at("n").get<Index>();
    if (d.contains("phi")) c.data.synthetic.phi = d.at("phi").get<double>();
    if (d.contains("path")) c.data.path = d.at("path").get<std::string>();
    if (d.contains("sensitive")) {
      if (c.data.kind == DataSource::Kind::csv)
        c.data.sensitive_columns = d.at("sensitive").get<std::vector<std::string>>();
      else
        c.data.adult_sensitive = adult_sensitive_from_string(d.at("sensitive").get<std::string>());
    }
    if (d.contains("label")) c.data.label_column = d.at("label").get<std::string>();
  }
  if (j.contains("classifier"))
    c.classifier = classifier_from_string(j.at("classifier").get<std::string>());
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    if (g.contains("factors")) c.factors = g.at("factors").get<std::vector<double>>();
    if (g.contains("gammas")) c.gammas = g.at("gammas").get<std::vector<double>>();
    if (g.contains("thresholds"))
      for (const Json& t : g.at("thresholds")) c.thresholds.push_back(vector_from_json(t));
  }
  c.protected_column = j.value("protected_column", std::string());
  if (j.contains("svm")) {
    const Json& s = j.at("svm");
    c.fit.svm_cost = s.value("cost", c.fit.svm_cost);
    if (s.contains("loss")) c.fit.svm_loss = svm_loss_from_string(s.at("loss").get<std::string>());
  }
  if (j.contains("kernel")) {
    const Json& k = j.at("kernel");
    if (k.contains("kind")) c.fit.kernel.kind = kernel_kind_from_string(k.at("kind").get<std::string>());
    c.fit.kernel.rbf_gamma = k.value("rbf_gamma", c.fit.kernel.rbf_gamma);
  }
  c.fit.l2_penalty = j.value("l2_penalty", c.fit.l2_penalty);
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    auto& o = c.fit.solver;
    o.max_iterations = s.value("max_iterations", o.max_iterations);
    o.objective_tolerance = s.value("objective_tolerance", o.objective_tolerance);
    o.kkt_tolerance = s.value("kkt_tolerance", o.kkt_tolerance);
    o.primal_tolerance = s.value("primal_tolerance", o.primal_tolerance);
  }
  if (j.contains("split")) {
    const Json& s = j.at("split");
    c.split.train_fraction = s.value("train_fraction", c.split.train_fraction);
    c.split.repeats = s.value("repeats", c.split.repeats);
  }
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  c.split.seed = c.seed;
  c.data.synthetic.seed = c.seed;
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json data{{"source", to_string(c.data.kind)}};
  switch (c.data.kind) {
    case DataSource::Kind::synthetic:
      data["variant"] = to_string(c.data.synthetic.variant);
      data["n"] = c.data.synthetic.n;
      data["phi"] = c.data.synthetic.phi;
      break;
    case DataSource::Kind::adult:
      data["path"] = c.data.path.string();
      data["sensitive"] = to_string(c.data.adult_sensitive);
      break;
    case DataSource::Kind::bank: data["path"] = c.data.path.string(); break;
    case DataSource::Kind::csv:
      data["path"] = c.data.path.string();
      data["label"] = c.data.label_column;
      data["sensitive"] = c.data.sensitive_columns;
      break;
  }
  Json grid = Json::object();
  if (!c.factors.empty()) grid["factors"] = c.factors;
  if (!c.gammas.empty()) grid["gammas"] = c.gammas;
  if (!c.thresholds.empty()) {
    grid["thresholds"] = Json::array();
    for (const Vector& t : c.thresholds) grid["thresholds"].push_back(to_json(t));
  }
  Json out{{"data", data},
           {"classifier", to_string(c.classifier)},
           {"mode", to_string(c.mode)},
           {"grid", grid}};
  if (!c.protected_column.empty()) out["protected_column"] = c.protected_column;
  out["svm"] = {{"cost", c.fit.svm_cost}, {"loss", to_string(c.fit.svm_loss)}};
  out["kernel"] = {{"kind", to_string(c.fit.kernel.kind)}, {"rbf_gamma", c.fit.kernel.rbf_gamma}};
  out["l2_penalty"] = c.fit.l2_penalty;
  out["solver"] = {{"max_iterations", c.fit.solver.max_iterations},
                   {"objective_tolerance", c.fit.solver.objective_tolerance},
                   {"kkt_tolerance", c.fit.solver.kkt_tolerance},
                   {"primal_tolerance", c.fit.solver.primal_tolerance}};
  out["split"] = {{"train_fraction", c.split.train_fraction}, {"repeats", c.split.repeats}};
  out["seed"] = c.seed;
  out["threads"] = c.threads;
  if (!c.output.empty()) out["output"] = c.output.string();
  return out;
}

const CellResult& SweepResult::cell(std::size_t grid_index, int repeat) const {
  for (const CellResult& c : cells)
    if (c.grid_index == grid_index && c.repeat == repeat) return c;
  throw std::out_of_range("no such cell");
}

IngestResult load_source(const DataSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case DataSource::Kind::synthetic: {
      SynthConfig sc = source.synthetic;
      sc.seed = seed;
      Dataset d = generate(sc);
      IngestReport report;
      report.source = "synthetic-" + to_string(sc.variant);
      report.rows_read = report.rows_kept = d.rows();
      report.positive = (d.labels().array() > 0.0).count();
      report.feature_count = d.dim();
      return {std::move(d), std::move(report)};
    }
    case DataSource::Kind::adult: {
      const auto paths = std::filesystem::is_directory(source.path)
                             ? adult_files(source.path)
                             : std::vector<std::filesystem::path>{source.path};
      return load_adult(paths, source.adult_sensitive);
    }
    case DataSource::Kind::bank: return load_bank(source.path);
    case DataSource::Kind::csv: {
      Dataset d = read_dataset_csv(source.path, source.label_column, source.sensitive_columns);
      IngestReport report;
      report.source = "csv";
      report.rows_read = report.rows_kept = d.rows();
      report.positive = (d.labels().array() > 0.0).count();
      report.feature_count = d.dim();
      return {std::move(d), std::move(report)};
    }
  }
  throw std::invalid_argument("unknown data source");
}

SweepResult run_sweep(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.split.seed = config.seed;
  config.data.synthetic.seed = config.seed;
  config.validate();
  IngestResult loaded = load_source(config.data, config.seed);
  Dataset data = loaded.dataset.has_bias_column() ? loaded.dataset : append_bias(loaded.dataset);
  if (config.mode == TrainingMode::fairness_constrained && !config.thresholds.empty() &&
      config.thresholds[0].size() != data.sensitive_count())
    throw std::invalid_argument("one threshold per sensitive column required");

  const int repeats = config.split.repeats;
  std::vector<RepeatContext> ctx(static_cast<std::size_t>(repeats));
  parallel_for(ctx.size(), config.threads, [&](std::size_t r) {
    prepare_repeat(config, data, static_cast<int>(r), ctx[r]);
  });

  const std::size_t grid = config.grid_size();
  SweepResult result;
  result.config = config;
  result.sensitive_names = data.sensitive_names();
  if (config.data.kind == DataSource::Kind::adult || config.data.kind == DataSource::Kind::bank)
    result.ingest = loaded.report;
  result.cells.resize(grid * static_cast<std::size_t>(repeats));
  for (std::size_t g = 0; g < grid; ++g)
    for (int r = 0; r < repeats; ++r) {
      CellResult& c = result.cells[g * static_cast<std::size_t>(repeats) + r];
      c.grid_index = g;
      c.repeat = r;
    }
  parallel_for(result.cells.size(), config.threads, [&](std::size_t i) {
    CellResult& c = result.cells[i];
    run_cell(config, ctx[static_cast<std::size_t>(c.repeat)], c);
  });

  parallel_for(ctx.size(), config.threads, [&](std::size_t r) {
    std::vector<CellResult*> mine;
    for (CellResult& c : result.cells)
      if (c.repeat == static_cast<int>(r)) mine.push_back(&c);
    zero_threshold_loss(config, ctx[r], mine);
    const double l0 = ctx[r].summary.zero_threshold_loss;
    for (CellResult* c : mine) {
      c->relative_loss = kNaN;
      if (c->ok && std::isfinite(l0) && l0 > ctx[r].summary.loss)
        c->relative_loss = (c->loss - ctx[r].summary.loss) / (l0 - ctx[r].summary.loss);
    }
  });
  for (RepeatContext& r : ctx) {
    if (!r.error.empty()) r.summary.loss = kNaN;
    result.baselines.push_back(std::move(r.summary));
  }
  return result;
}

std::string cells_csv(const SweepResult& r) {
  const auto& names = r.sensitive_names;
  std::string out =
      "grid_index,repeat,parameter,gamma,ok,status,iterations,auto_ridge,train_accuracy,"
      "test_accuracy,loss,loss_ratio,relative_loss,objective,constraints_satisfied,"
      "protected_flips";
  for (const auto& n : names) {
    out += ",threshold[" + n + "]";
    for (const char* set : {"train", "test"})
      for (const char* m : {"covariance", "p_percent", "cv_score", "rate_z1", "rate_z0"})
        out += std::string(",") + set + "_" + m + "[" + n + "]";
  }
  out += ",error\n";
  for (const CellResult& c : r.cells) {
    out += std::to_string(c.grid_index) + "," + std::to_string(c.repeat) + "," +
           fmt(c.parameter) + "," + (c.gamma ? fmt(*c.gamma) : std::string()) + "," +
           (c.ok ? "1" : "0") + ",";
    if (c.ok) {
      out += optim::to_string(c.meta.status) + "," + std::to_string(c.meta.iterations) + "," +
             (c.meta.auto_ridge ? "1" : "0") + "," + fmt(c.train_accuracy) + "," +
             fmt(c.test_accuracy) + "," + fmt(c.loss) + "," + fmt(c.loss_ratio) + "," +
             fmt(c.relative_loss) + "," + fmt(c.meta.objective) + "," +
             (c.constraints_satisfied ? "1" : "0") + "," + std::to_string(c.protected_flips);
      for (std::size_t k = 0; k < names.size(); ++k) {
        out += "," + (c.thresholds.size() > 0 ? fmt(c.thresholds[static_cast<Index>(k)])
                                              : std::string());
        for (const FairnessReport* f : {&c.train_fairness, &c.test_fairness})
          out += "," + fmt(f->covariance[k]) + "," + fmt(f->p_percent[k]) + "," +
                 fmt(f->cv_score[k]) + "," + fmt(f->rates[k].rate_z1) + "," +
                 fmt(f->rates[k].rate_z0);
      }
      out += ",\n";
    } else {
      out += ",,,,,,,,,,";
      for (std::size_t k = 0; k < names.size(); ++k) out += ",,,,,,,,,,,";
      std::string e = c.error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '\n', ' ');
      out += "," + e + "\n";
    }
  }
  return out;
}

Json summary_json(const SweepResult& r) {
  Json baselines = Json::array();
  for (const RepeatBaseline& b : r.baselines)
    baselines.push_back(Json{{"repeat", b.repeat},
                             {"meta", to_json(b.meta)},
                             {"covariance", to_json(b.covariance)},
                             {"loss", number(b.loss)},
                             {"zero_threshold_loss", number(b.zero_threshold_loss)},
                             {"train_accuracy", b.train_accuracy},
                             {"test_accuracy", b.test_accuracy},
                             {"train_fairness", to_json(b.train_fairness)},
                             {"test_fairness", to_json(b.test_fairness)}});
  Json points = Json::array();
  const std::size_t grid = r.config.grid_size();
  for (std::size_t g = 0; g < grid; ++g) {
    const auto cells = grid_cells(r, g);
    Json p{{"grid_index", g}};
    Index failed = 0, unconverged = 0, violated = 0;
    for (const CellResult& c : r.cells)
      if (c.grid_index == g) {
        failed += !c.ok;
        unconverged += c.ok && !c.meta.converged;
        violated += c.ok && !c.constraints_satisfied;
        p["parameter"] = c.parameter;
      }
    p["cells"] = cells.size();
    p["failed"] = failed;
    p["not_converged"] = unconverged;
    p["constraint_violations"] = violated;
    p["train_accuracy"] = stats_json(collect(cells, [](const CellResult& c) { return c.train_accuracy; }));
    p["test_accuracy"] = stats_json(collect(cells, [](const CellResult& c) { return c.test_accuracy; }));
    p["loss"] = stats_json(collect(cells, [](const CellResult& c) { return c.loss; }));
    p["loss_ratio"] = stats_json(collect(cells, [](const CellResult& c) { return c.loss_ratio; }));
    p["relative_loss"] = stats_json(collect(cells, [](const CellResult& c) { return c.relative_loss; }));
    p["wall_seconds"] = stats_json(collect(cells, [](const CellResult& c) { return c.wall_seconds; }));
    Json columns = Json::array();
    for (std::size_t k = 0; k < r.sensitive_names.size(); ++k) {
      Json col{{"column", r.sensitive_names[k]}};
      for (const bool train : {true, false}) {
        auto pick = [&](const CellResult& c) -> const FairnessReport& {
          return train ? c.train_fairness : c.test_fairness;
        };
        col[train ? "train" : "test"] = Json{
            {"abs_covariance", stats_json(collect(cells, [&](const CellResult& c) { return std::abs(pick(c).covariance[k]); }))},
            {"p_percent", stats_json(collect(cells, [&](const CellResult& c) { return pick(c).p_percent[k]; }))},
            {"cv_score", stats_json(collect(cells, [&](const CellResult& c) { return pick(c).cv_score[k]; }))},
            {"rate_z1", stats_json(collect(cells, [&](const CellResult& c) { return pick(c).rates[k].rate_z1; }))},
            {"rate_z0", stats_json(collect(cells, [&](const CellResult& c) { return pick(c).rates[k].rate_z0; }))}};
      }
      columns.push_back(col);
    }
    p["columns"] = columns;
    points.push_back(p);
  }
  Json out{{"config", to_json(r.config)},
           {"sensitive_columns", r.sensitive_names},
           {"baselines", baselines},
           {"grid", points}};
  if (r.ingest) out["ingest"] = to_json(*r.ingest);
  return out;
}

void emit_results(const SweepResult& r, const std::filesystem::path& dir) {
  if (r.config.grid_size() == 0 || r.cells.empty())
    throw std::invalid_argument("empty parameter grid: nothing to write");
  std::filesystem::create_directories(dir);
  write_text(dir / "cells.csv", cells_csv(r));
  write_text(dir / "summary.json", summary_json(r).dump(2) + "\n");

  // Plot files: one row per (grid point, sensitive column), means over repeats.
  std::string cov_loss = "parameter,column,train_abs_covariance,relative_loss,loss_ratio\n";
  std::string cov_p = "parameter,column,train_abs_covariance,train_p_percent,train_cv_score\n";
  std::string acc_p = "parameter,column,test_p_percent,test_cv_score,test_accuracy\n";
  std::string rates =
      "parameter,column,test_rate_z1,test_rate_z0,test_p_percent,train_rate_z1,train_rate_z0\n";
  for (std::size_t g = 0; g < r.config.grid_size(); ++g) {
    const auto cells = grid_cells(r, g);
    if (cells.empty()) continue;
    const std::string param = fmt(cells.front()->parameter);
    for (std::size_t k = 0; k < r.sensitive_names.size(); ++k) {
      const std::string head = param + "," + r.sensitive_names[k] + ",";
      const double cov = mean_of(cells, [&](const CellResult& c) { return std::abs(c.train_fairness.covariance[k]); });
      cov_loss += head + fmt(cov) + "," +
                  fmt(mean_of(cells, [](const CellResult& c) { return c.relative_loss; })) + "," +
                  fmt(mean_of(cells, [](const CellResult& c) { return c.loss_ratio; })) + "\n";
      cov_p += head + fmt(cov) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.train_fairness.p_percent[k]; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.train_fairness.cv_score[k]; })) + "\n";
      acc_p += head +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.test_fairness.p_percent[k]; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.test_fairness.cv_score[k]; })) + "," +
               fmt(mean_of(cells, [](const CellResult& c) { return c.test_accuracy; })) + "\n";
      rates += head +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.test_fairness.rates[k].rate_z1; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.test_fairness.rates[k].rate_z0; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.test_fairness.p_percent[k]; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.train_fairness.rates[k].rate_z1; })) + "," +
               fmt(mean_of(cells, [&](const CellResult& c) { return c.train_fairness.rates[k].rate_z0; })) + "\n";
    }
  }
  write_text(dir / "fig_covariance_vs_loss.csv", cov_loss);
  write_text(dir / "fig_covariance_vs_p_percent.csv", cov_p);
  write_text(dir / "fig_accuracy_vs_p_percent.csv", acc_p);
  write_text(dir / "fig_group_rates.csv", rates);
}

}  // namespace fairbound
