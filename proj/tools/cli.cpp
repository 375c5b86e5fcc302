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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fairbound/experiment.hpp"
#include "fairbound/io.hpp"
#include "fairbound/synthetic.hpp"

namespace fairbound::cli {
namespace {

// Data source flags shared by train and sweep.
struct SourceFlags {
  std::string synthetic;  // linear | nonlinear
  Index n = 4000;
  double phi = std::numbers::pi / 4.0;
  std::string adult;
  std::string bank;
  std::string csv;
  std::string sensitive;  // Adult choice, or comma separated CSV columns
  std::string label = "y";

  void add(CLI::App* app) {
    app->add_option("--synthetic", synthetic, "Generate data: linear or nonlinear");
    app->add_option("--n", n, "Synthetic sample size");
    app->add_option("--phi", phi, "Synthetic correlation angle (radians)");
    app->add_option("--adult", adult, "Directory with adult.data/adult.test, or one file");
    app->add_option("--bank", bank, "bank-additional-full.csv");
    app->add_option("--csv", csv, "Numeric CSV with a header row");
    app->add_option("--sensitive", sensitive,
                    "Adult: gender, race or gender+race; CSV: sensitive column names");
    app->add_option("--label", label, "CSV label column");
  }

  bool given() const {
    return !synthetic.empty() || !adult.empty() || !bank.empty() || !csv.empty();
  }

  DataSource source() const {
    const int count = !synthetic.empty() + !adult.empty() + !bank.empty() + !csv.empty();
    if (count != 1)
      throw CLI::ValidationError("data", "give exactly one of --synthetic/--adult/--bank/--csv");
    DataSource s;
    if (!synthetic.empty()) {
      s.kind = DataSource::Kind::synthetic;
      s.synthetic.variant = variant_from_string(synthetic);
      s.synthetic.n = n;
      s.synthetic.phi = phi;
    } else if (!adult.empty()) {
      s.kind = DataSource::Kind::adult;
      s.path = adult;
      if (!sensitive.empty()) s.adult_sensitive = adult_sensitive_from_string(sensitive);
    } else if (!bank.empty()) {
      s.kind = DataSource::Kind::bank;
      s.path = bank;
    } else {
      s.kind = DataSource::Kind::csv;
      s.path = csv;
      s.label_column = label;
      if (!sensitive.empty()) {
        s.sensitive_columns.clear();
        std::string item;
        std::istringstream in(sensitive);
        while (std::getline(in, item, ',')) s.sensitive_columns.push_back(item);
      }
    }
    return s;
  }
};

// Classifier flags shared by train and sweep; unset flags keep the config.
struct ModelFlags {
  std::optional<std::string> classifier;
  std::optional<std::string> mode;
  std::optional<double> cost;
  std::optional<std::string> svm_loss;
  std::optional<std::string> kernel;
  std::optional<double> rbf_gamma;
  std::optional<double> l2;
  std::optional<int> max_iterations;

  void add(CLI::App* app) {
    app->add_option("--classifier", classifier, "logreg, linear_svm or kernel_svm");
    app->add_option("--mode", mode,
                    "unconstrained, fairness_constrained, accuracy_constrained, fine_grained");
    app->add_option("--cost", cost, "SVM cost C");
    app->add_option("--svm-loss", svm_loss, "hinge or squared_hinge (linear SVM)");
    app->add_option("--kernel", kernel, "rbf or linear (kernel SVM)");
    app->add_option("--rbf-gamma", rbf_gamma, "RBF width; 0 picks it from the data");
    app->add_option("--l2", l2, "Ridge penalty for logistic regression");
    app->add_option("--max-iterations", max_iterations, "Solver iteration cap");
  }

  void apply(ExperimentConfig& c) const {
    if (classifier) c.classifier = classifier_from_string(*classifier);
    if (mode) c.mode = mode_from_string(*mode);
    if (cost) c.fit.svm_cost = *cost;
    if (svm_loss) c.fit.svm_loss = svm_loss_from_string(*svm_loss);
    if (kernel) c.fit.kernel.kind = kernel_kind_from_string(*kernel);
    if (rbf_gamma) c.fit.kernel.rbf_gamma = *rbf_gamma;
    if (l2) c.fit.l2_penalty = *l2;
    if (max_iterations) c.fit.solver.max_iterations = *max_iterations;
  }
};

Json cell_json(const SweepResult& r, const CellResult& c) {
  Json j{{"grid_index", c.grid_index}, {"repeat", c.repeat}, {"parameter", c.parameter}, {"ok", c.ok}};
  if (!c.ok) {
    j["error"] = c.error;
    return j;
  }
  j["meta"] = to_json(c.meta);
  j["train_accuracy"] = c.train_accuracy;
  j["test_accuracy"] = c.test_accuracy;
  j["loss"] = number(c.loss);
  j["loss_ratio"] = number(c.loss_ratio);
  j["relative_loss"] = number(c.relative_loss);
  j["constraints_satisfied"] = c.constraints_satisfied;
  j["protected_flips"] = c.protected_flips;
  j["train_fairness"] = to_json(c.train_fairness);
  j["test_fairness"] = to_json(c.test_fairness);
  j["baseline_covariance"] = to_json(r.baselines.at(static_cast<std::size_t>(c.repeat)).covariance);
  return j;
}

int cmd_gen(const std::string& variant, Index n, double phi, std::uint64_t seed,
            const std::string& out_path, std::ostream& out) {
  SynthConfig config;
  config.variant = variant_from_string(variant);
  config.n = n;
  config.phi = phi;
  config.seed = seed;
  const Dataset d = generate(config);
  write_dataset_csv(d, out_path);
  out << "wrote " << d.rows() << " rows to " << out_path << "\n";
  return 0;
}

int cmd_ingest(const std::string& adult, const std::string& bank, const std::string& sensitive,
               const std::string& json_path, std::ostream& out) {
  if (adult.empty() == bank.empty())
    throw CLI::ValidationError("ingest", "give exactly one of --adult/--bank");
  DataSource s;
  if (!adult.empty()) {
    s.kind = DataSource::Kind::adult;
    s.path = adult;
    if (!sensitive.empty()) s.adult_sensitive = adult_sensitive_from_string(sensitive);
  } else {
    s.kind = DataSource::Kind::bank;
    s.path = bank;
  }
  const IngestResult r = load_source(s, 0);
  const std::string text = to_json(r.report).dump(2) + "\n";
  if (!json_path.empty()) write_text(json_path, text);
  out << text;
  return 0;
}

int cmd_audit(const std::string& input, const std::string& score, const std::string& sensitive,
              const std::string& label, std::ostream& out) {
  const NumericTable table = read_numeric_csv(input);
  const auto& d = table.column(score);
  const Index n = static_cast<Index>(d.size());
  std::vector<std::string> names;
  std::string item;
  std::istringstream in(sensitive);
  while (std::getline(in, item, ',')) names.push_back(item);
  if (names.empty()) throw CLI::ValidationError("audit", "--sensitive names no column");
  Matrix z(n, static_cast<Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k)
    z.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(table.column(names[k]).data(), n);
  const Vector dist = Eigen::Map<const Vector>(d.data(), n);
  Json j{{"rows", n}, {"fairness", to_json(audit(dist, z, names))}};
  if (!label.empty())
    j["accuracy"] = accuracy(dist, Eigen::Map<const Vector>(table.column(label).data(), n));
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-boundary fairness constraints for margin classifiers", "fairbound"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
  std::string gen_variant = "linear", gen_out;
  Index gen_n = 4000;
  double gen_phi = std::numbers::pi / 4.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--variant", gen_variant, "linear or nonlinear");
  gen->add_option("--n", gen_n, "Number of rows");
  gen->add_option("--phi", gen_phi, "Correlation angle (radians)");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output CSV")->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a UCI file and print its counts");
  std::string ing_adult, ing_bank, ing_sensitive, ing_json;
  ingest->add_option("--adult", ing_adult, "Directory with adult.data/adult.test, or one file");
  ingest->add_option("--bank", ing_bank, "bank-additional-full.csv");
  ingest->add_option("--sensitive", ing_sensitive, "gender, race or gender+race");
  ingest->add_option("--json", ing_json, "Also write the report here");

  // train
  auto* train = app.add_subcommand("train", "Fit one model on repeat 0 of the split and audit it");
  SourceFlags train_src;
  ModelFlags train_model;
  std::vector<double> train_c;
  std::optional<double> train_a, train_gamma;
  std::uint64_t train_seed = 0;
  double train_fraction = 0.7;
  std::string train_model_out, train_json;
  train_src.add(train);
  train_model.add(train);
  train->add_option("--c", train_c, "Covariance thresholds, one per sensitive column")
      ->delimiter(',');
  train->add_option("--a", train_a, "Threshold factor: c = a |cov(theta*)|");
  train->add_option("--gamma", train_gamma, "Loss allowance (accuracy_constrained, fine_grained)");
  train->add_option("--seed", train_seed, "Seed for data generation and the split");
  train->add_option("--train-fraction", train_fraction, "Share of rows used for training");
  train->add_option("--model-out", train_model_out, "Write the fitted model as JSON");
  train->add_option("--json", train_json, "Write the metrics as JSON");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write result files");
  std::string sweep_config;
  SourceFlags sweep_src;
  ModelFlags sweep_model;
  std::optional<std::string> sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<int> sweep_repeats, sweep_threads;
  std::vector<double> sweep_factors, sweep_gammas;
  sweep->add_option("--config", sweep_config, "Experiment JSON");
  sweep_src.add(sweep);
  sweep_model.add(sweep);
  sweep->add_option("--factors", sweep_factors, "Threshold factors a (replaces the grid)")
      ->delimiter(',');
  sweep->add_option("--gammas", sweep_gammas, "Gamma grid (replaces the grid)")->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--seed", sweep_seed, "Seed for data generation and splits");
  sweep->add_option("--repeats", sweep_repeats, "Number of random splits");
  sweep->add_option("--threads", sweep_threads, "Worker threads (0: all cores)");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Score-file fairness audit");
  std::string aud_input, aud_score = "score", aud_sensitive = "z", aud_label;
  audit_cmd->add_option("--input", aud_input, "CSV with score and sensitive columns")->required();
  audit_cmd->add_option("--score", aud_score, "Signed-distance column");
  audit_cmd->add_option("--sensitive", aud_sensitive, "Comma separated 0/1 columns");
  audit_cmd->add_option("--label", aud_label, "Optional {-1,+1} label column for accuracy");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_variant, gen_n, gen_phi, gen_seed, gen_out, out);
    if (ingest->parsed()) return cmd_ingest(ing_adult, ing_bank, ing_sensitive, ing_json, out);
    if (audit_cmd->parsed()) return cmd_audit(aud_input, aud_score, aud_sensitive, aud_label, out);
    if (train->parsed()) {
      ExperimentConfig c;
      c.data = train_src.source();
      // Without --mode the grid flags pick it.
      if (train_a || !train_c.empty()) c.mode = TrainingMode::fairness_constrained;
      else if (train_gamma) c.mode = TrainingMode::accuracy_constrained;
      else c.mode = TrainingMode::unconstrained;
      train_model.apply(c);
      if (c.mode == TrainingMode::unconstrained && (train_a || train_gamma || !train_c.empty()))
        throw CLI::ValidationError("train", "unconstrained mode takes no --a/--c/--gamma");
      if (c.mode == TrainingMode::fairness_constrained) {
        if (train_a.has_value() == !train_c.empty())
          throw CLI::ValidationError("train", "fairness_constrained needs exactly one of --c/--a");
        if (train_a) c.factors = {*train_a};
        else c.thresholds = {Eigen::Map<const Vector>(train_c.data(), static_cast<Index>(train_c.size()))};
      } else if (c.mode != TrainingMode::unconstrained) {
        if (!train_gamma) throw CLI::ValidationError("train", to_string(c.mode) + " needs --gamma");
        c.gammas = {*train_gamma};
      }
      c.seed = train_seed;
      c.split.repeats = 1;
      c.split.train_fraction = train_fraction;
      c.threads = 1;
      c.keep_models = true;
      const SweepResult r = run_sweep(c);
      const CellResult& cell = r.cells.front();
      const std::string text = cell_json(r, cell).dump(2) + "\n";
      if (!train_json.empty()) write_text(train_json, text);
      out << text;
      if (!cell.ok) {
        err << "error: fit failed: " << cell.error << "\n";
        return 1;
      }
      if (!train_model_out.empty()) write_text(train_model_out, to_json(*cell.model).dump(2) + "\n");
      return 0;
    }
    if (sweep->parsed()) {
      ExperimentConfig c;
      if (!sweep_config.empty()) {
        std::ifstream in(sweep_config);
        if (!in) throw std::runtime_error("cannot open " + sweep_config);
        c = config_from_json(Json::parse(in));
      } else if (!sweep_src.given()) {
        throw CLI::ValidationError("sweep", "give --config or a data source");
      }
      if (sweep_src.given()) c.data = sweep_src.source();
      sweep_model.apply(c);
      if (!sweep_factors.empty()) {
        c.thresholds.clear();
        c.gammas.clear();
        c.factors = sweep_factors;
      }
      if (!sweep_gammas.empty()) {
        c.thresholds.clear();
        c.factors.clear();
        c.gammas = sweep_gammas;
      }
      if (sweep_out) c.output = *sweep_out;
      if (sweep_seed) c.seed = *sweep_seed;
      if (sweep_repeats) c.split.repeats = *sweep_repeats;
      if (sweep_threads) c.threads = *sweep_threads;
      if (c.output.empty()) throw CLI::ValidationError("sweep", "no output directory (--out)");
      if (c.grid_size() == 0) throw std::invalid_argument("empty parameter grid");
      const SweepResult r = run_sweep(c);
      emit_results(r, c.output);
      std::size_t failed = 0;
      for (const CellResult& cell : r.cells) failed += !cell.ok;
      out << "wrote " << r.cells.size() << " cells to " << c.output.string();
      if (failed > 0) out << " (" << failed << " failed)";
      out << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fairbound::cli
