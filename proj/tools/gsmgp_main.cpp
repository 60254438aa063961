/*
 * Copyright 2026 the gsmgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsmgp/benchmark.hpp"
#include "gsmgp/checks.hpp"
#include "gsmgp/data_io.hpp"
#include "gsmgp/gp_core.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/spectral.hpp"
#include "gsmgp/train.hpp"

namespace {

using gsmgp::Vec;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) out.push_back(item);
  return out;
}

Vec linspace(double lo, double hi, Eigen::Index n) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

// Series files start with an alphabetic header row; grid files are numeric.
bool looks_like_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string first;
  std::getline(in, first);
  for (char c : first) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  }
  return false;
}

gsmgp::GridDataset load_dataset(const std::string& data_path, const std::string& mask_path,
                                const std::string& axes_csv) {
  std::vector<std::string> axes_paths;
  if (!axes_csv.empty()) axes_paths = split(axes_csv, ',');
  if (mask_path.empty() && axes_paths.empty() && looks_like_series(data_path))
    return gsmgp::load_series(data_path);
  return gsmgp::load_grid(data_path, mask_path, axes_paths);
}

// Numeric CSV of prediction inputs, one row per point.
gsmgp::Mat load_points(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": non-numeric cell '" + cell + "'");
      }
    }
    if (static_cast<int>(row.size()) != p)
      throw std::runtime_error(path + ": expected " + std::to_string(p) + " columns");
    rows.push_back(std::move(row));
  }
  gsmgp::Mat points(rows.size(), p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int d = 0; d < p; ++d) points(static_cast<Eigen::Index>(i), d) = rows[i][d];
  return points;
}

struct SimulateArgs {
  std::string kind = "chirp";
  int n = 200;
  double noise = 0.1;
  std::string pattern = "freq-sweep";
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  Stopwatch timer;
  gsmgp::RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = a.seed;
  manifest.config = {{"kind", a.kind},
                     {"n", std::to_string(a.n)},
                     {"noise", std::to_string(a.noise)},
                     {"pattern", a.pattern},
                     {"seed", std::to_string(a.seed)},
                     {"out", a.out}};
  const std::string truth_path = a.out + ".truth.csv";

  if (a.kind == "chirp") {
    gsmgp::ChirpTruth truth;
    const gsmgp::GridDataset data = gsmgp::simulate_chirp(a.n, a.noise, a.seed, &truth);
    gsmgp::save_series_csv(a.out, data.axes[0], data.y);
    std::ofstream tf(truth_path);
    if (!tf) throw std::runtime_error("cannot write " + truth_path);
    tf << "x,mu,ell,w\n";
    char buf[160];
    for (Eigen::Index i = 0; i < data.axes[0].size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", data.axes[0][i], truth.mu[i],
                    truth.ell, truth.w);
      tf << buf;
    }
  } else {
    const gsmgp::TexturePattern pattern = gsmgp::texture_pattern_from_name(a.pattern);
    const gsmgp::GridDataset data = gsmgp::simulate_texture(a.n, a.n, pattern, a.noise, a.seed);
    gsmgp::save_grid_csv(a.out, data);
    const gsmgp::GridDataset clean = gsmgp::simulate_texture(a.n, a.n, pattern, 0.0, a.seed);
    gsmgp::save_grid_csv(truth_path, clean);
  }

  manifest.inputs = {};
  manifest.outputs = {a.out, truth_path};
  manifest.wall_clock_seconds = timer.seconds();
  gsmgp::write_manifest(manifest, a.out);
  std::printf("wrote %s and %s\n", a.out.c_str(), truth_path.c_str());
  return 0;
}

struct FitArgs {
  std::string data;
  std::string mask;
  std::string axes;
  std::string kernel = "gsm";
  int q = 1;
  int restarts = 10;
  int candidates = 100;
  int max_iterations = 500;
  double prior_variance = 1.0;
  std::uint64_t seed = 0;
  std::string init = "prior";
  bool quiet = false;
  bool q_given = false;
  std::string out;
};

int run_fit(const FitArgs& a) {
  Stopwatch timer;
  gsmgp::GridDataset data = load_dataset(a.data, a.mask, a.axes);
  if (data.observed_count() < data.size()) {
    gsmgp::impute_mean(&data);
    data.mask.assign(data.mask.size(), true);
  }

  gsmgp::TrainConfig config;
  config.kind = gsmgp::kernel_kind_from_name(a.kernel);
  config.q = a.q;
  if (config.kind == gsmgp::KernelKind::se && a.q_given) {
    std::fprintf(stderr, "warning: --kernel se has no components, ignoring --Q\n");
    config.q = 1;
  }
  config.restarts = a.restarts;
  config.candidates = a.candidates;
  config.max_iterations = a.max_iterations;
  config.prior_variance = a.prior_variance;
  config.seed = a.seed;
  config.init = a.init == "spectrogram" ? gsmgp::InitKind::spectrogram : gsmgp::InitKind::prior;
  config.verbose = !a.quiet;

  const gsmgp::GpModel model = gsmgp::fit(config, data);
  gsmgp::save_model(model, a.out);

  gsmgp::RunManifest manifest;
  manifest.command = "fit";
  manifest.seed = a.seed;
  manifest.config = {{"data", a.data},
                     {"mask", a.mask},
                     {"axes", a.axes},
                     {"kernel", a.kernel},
                     {"Q", std::to_string(config.q)},
                     {"restarts", std::to_string(a.restarts)},
                     {"candidates", std::to_string(a.candidates)},
                     {"max-iterations", std::to_string(a.max_iterations)},
                     {"prior-variance", std::to_string(a.prior_variance)},
                     {"seed", std::to_string(a.seed)},
                     {"init", a.init},
                     {"out", a.out}};
  manifest.inputs = {a.data};
  if (!a.mask.empty()) manifest.inputs.push_back(a.mask);
  manifest.outputs = {a.out};
  manifest.wall_clock_seconds = timer.seconds();
  manifest.has_objective = true;
  manifest.final_objective = model.summary.final_objective;
  gsmgp::write_manifest(manifest, a.out);

  std::printf("final objective %.6f\n", model.summary.final_objective);
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string at;
  std::string out;
};

int run_predict(const PredictArgs& a) {
  Stopwatch timer;
  const gsmgp::GpModel model = gsmgp::load_model(a.model);
  const int p = model.p();

  gsmgp::Mat points;
  gsmgp::Vec mean, variance;
  if (a.at.rfind("lin(", 0) == 0) {
    const std::vector<Vec> axes = gsmgp::parse_grid_spec(a.at);
    if (static_cast<int>(axes.size()) != p)
      throw std::runtime_error("grid spec has " + std::to_string(axes.size()) +
                               " dimensions, model has " + std::to_string(p));
    const gsmgp::Backend backend = p == 1 ? gsmgp::Backend::dense : gsmgp::Backend::kron;
    const gsmgp::Prediction pred = gsmgp::predict_grid(model, axes, backend);
    Eigen::Index total = 1;
    for (const Vec& axis : axes) total *= axis.size();
    points.resize(total, p);
    for (Eigen::Index flat = 0; flat < total; ++flat) {
      Eigen::Index rem = flat;
      for (int d = p - 1; d >= 0; --d) {
        points(flat, d) = axes[d][rem % axes[d].size()];
        rem /= axes[d].size();
      }
    }
    mean = pred.mean;
    variance = pred.variance;
  } else {
    points = load_points(a.at, p);
    if (points.rows() == 0) {
      mean = Vec(0);
      variance = Vec(0);
    } else {
      const gsmgp::Prediction pred = gsmgp::predict_points(model, points);
      mean = pred.mean;
      variance = pred.variance;
    }
  }
  gsmgp::save_prediction_csv(a.out, points, mean, variance);

  gsmgp::RunManifest manifest;
  manifest.command = "predict";
  manifest.config = {{"model", a.model}, {"at", a.at}, {"out", a.out}};
  manifest.inputs = {a.model};
  manifest.outputs = {a.out};
  manifest.wall_clock_seconds = timer.seconds();
  gsmgp::write_manifest(manifest, a.out);
  std::printf("wrote %lld predictions to %s\n", static_cast<long long>(mean.size()),
              a.out.c_str());
  return 0;
}

struct SpectrogramArgs {
  std::string model;
  std::string data;
  std::string freq_range;
  int bins = 128;
  int window = 0;  // 0 = automatic
  std::string out;
};

int run_spectrogram(const SpectrogramArgs& a) {
  Stopwatch timer;
  if (a.model.empty() == a.data.empty()) {
    std::fprintf(stderr, "error: pass exactly one of --model or --data\n");
    return 2;
  }

  gsmgp::Spectrogram spec;
  if (!a.model.empty()) {
    const gsmgp::GpModel model = gsmgp::load_model(a.model);
    if (model.kind != gsmgp::KernelKind::gsm)
      throw std::runtime_error("model-implied spectrograms need a gsm model");
    const Vec& axis = model.train_axes[0];
    double lo = 0.0, hi = model.gsm.dims[0].nyquist;
    if (!a.freq_range.empty()) {
      const auto parts = split(a.freq_range, ':');
      if (parts.size() != 2) throw std::runtime_error("--freq-range must be lo:hi");
      lo = std::stod(parts[0]);
      hi = std::stod(parts[1]);
      if (!(hi > lo)) throw std::runtime_error("--freq-range must have hi > lo");
    }
    spec = gsmgp::model_spectrogram(model.gsm, axis, linspace(lo, hi, a.bins), 0);
  } else {
    const gsmgp::GridDataset series = gsmgp::load_series(a.data);
    const Eigen::Index n = series.axes[0].size();
    int window = a.window;
    if (window <= 0) {
      window = 2 * static_cast<int>(n / 6);
      window = std::clamp(window, 8, 64);
      window = std::min<int>(window, static_cast<int>(n));
    }
    spec = gsmgp::empirical_spectrogram(series.axes[0], series.y, window, 0.5);
  }
  gsmgp::save_spectrogram_csv(a.out, spec);

  gsmgp::RunManifest manifest;
  manifest.command = "spectrogram";
  manifest.config = {{"model", a.model},
                     {"data", a.data},
                     {"freq-range", a.freq_range},
                     {"bins", std::to_string(a.bins)},
                     {"window", std::to_string(a.window)},
                     {"out", a.out}};
  if (!a.model.empty()) manifest.inputs.push_back(a.model);
  if (!a.data.empty()) manifest.inputs.push_back(a.data);
  manifest.outputs = {a.out};
  manifest.wall_clock_seconds = timer.seconds();
  gsmgp::write_manifest(manifest, a.out);
  std::printf("wrote %lld x %lld spectrogram to %s\n",
              static_cast<long long>(spec.input_axis.size()),
              static_cast<long long>(spec.frequency_axis.size()), a.out.c_str());
  return 0;
}

struct CheckArgs {
  std::string suite = "all";
  std::string out = "check_results.csv";
};

int run_check(const CheckArgs& a) {
  Stopwatch timer;
  std::vector<std::string> suites;
  if (a.suite == "all")
    suites = gsmgp::check_suite_names();
  else
    suites = {a.suite};

  bool all_passed = true;
  std::ofstream csv(a.out);
  if (!csv) throw std::runtime_error("cannot write " + a.out);
  csv << "suite,name,passed,residual,threshold\n";
  for (const std::string& suite : suites) {
    for (const gsmgp::CheckResult& r : gsmgp::run_check_suite(suite)) {
      all_passed = all_passed && r.passed;
      std::printf("%-10s %-22s %s  residual %.3e (threshold %.1e)\n", suite.c_str(),
                  r.name.c_str(), r.passed ? "PASS" : "FAIL", r.residual, r.threshold);
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.17g,%.17g\n", suite.c_str(), r.name.c_str(),
                    r.passed ? 1 : 0, r.residual, r.threshold);
      csv << buf;
    }
  }

  gsmgp::RunManifest manifest;
  manifest.command = "check";
  manifest.config = {{"suite", a.suite}, {"out", a.out}};
  manifest.outputs = {a.out};
  manifest.wall_clock_seconds = timer.seconds();
  gsmgp::write_manifest(manifest, a.out);
  return all_passed ? 0 : 1;
}

struct BenchmarkArgs {
  std::string data;
  std::string axes;
  std::string kernels = "gsm,se";
  int q = 2;
  std::string holdout = "cross";
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string out;
};

int run_benchmark(const BenchmarkArgs& a) {
  Stopwatch timer;
  const gsmgp::GridDataset full = load_dataset(a.data, "", a.axes);
  std::vector<gsmgp::KernelKind> kinds;
  for (const std::string& name : split(a.kernels, ','))
    kinds.push_back(gsmgp::kernel_kind_from_name(name));

  const gsmgp::BenchmarkResult result = gsmgp::benchmark_run(
      full, gsmgp::holdout_from_name(a.holdout), kinds, a.q, a.seed, !a.quiet);
  gsmgp::save_benchmark_csv(a.out, result);

  std::printf("%-6s %12s %14s %14s\n", "kernel", "rmse", "loglik", "objective");
  for (const gsmgp::BenchmarkRow& row : result.rows)
    std::printf("%-6s %12.5f %14.3f %14.3f\n", row.kernel.c_str(), row.rmse, row.loglik,
                row.fit_objective);

  gsmgp::RunManifest manifest;
  manifest.command = "benchmark";
  manifest.seed = a.seed;
  manifest.config = {{"data", a.data},    {"axes", a.axes}, {"kernels", a.kernels},
                     {"Q", std::to_string(a.q)},            {"holdout", a.holdout},
                     {"seed", std::to_string(a.seed)},      {"out", a.out}};
  manifest.inputs = {a.data};
  manifest.outputs = {a.out};
  manifest.wall_clock_seconds = timer.seconds();
  gsmgp::write_manifest(manifest, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process regression with generalised spectral mixture kernels"};
  app.set_config("--config", "", "INI file holding the same keys; command-line flags win");
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--kind", sim.kind, "Dataset family")
      ->check(CLI::IsMember({"chirp", "texture"}));
  simulate->add_option("--n", sim.n, "Points per axis")->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim.noise, "Observation noise variance")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--pattern", sim.pattern, "Texture pattern")
      ->check(CLI::IsMember({"freq-sweep", "stationary-weave"}));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output CSV path")->required();

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Train a model on a dataset");
  fit_cmd->add_option("--data", fit.data, "Series or grid CSV")->required();
  fit_cmd->add_option("--mask", fit.mask, "Grid mask CSV (1 = observed)");
  fit_cmd->add_option("--axes", fit.axes, "Comma-separated axis CSV paths");
  fit_cmd->add_option("--kernel", fit.kernel, "Kernel family")
      ->check(CLI::IsMember({"gsm", "sm", "ss", "se"}));
  CLI::Option* q_opt = fit_cmd->add_option("--Q", fit.q, "Mixture components")
                           ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--restarts", fit.restarts, "Optimisation restarts")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--candidates", fit.candidates, "Screened draws per restart")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-iterations", fit.max_iterations, "Iteration cap per restart")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--prior-variance", fit.prior_variance, "Latent prior variance")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--init", fit.init, "Initialisation scheme")
      ->check(CLI::IsMember({"prior", "spectrogram"}));
  fit_cmd->add_flag("--quiet", fit.quiet, "Suppress progress output");
  fit_cmd->add_option("--out", fit.out, "Model file path")->required();

  PredictArgs pred;
  CLI::App* predict = app.add_subcommand("predict", "Evaluate the predictive distribution");
  predict->add_option("--model", pred.model, "Model file")->required();
  predict->add_option("--at", pred.at, "lin(start,stop,count) per dimension, or an input CSV")
      ->required();
  predict->add_option("--out", pred.out, "Prediction CSV path")->required();

  SpectrogramArgs spect;
  CLI::App* spectrogram = app.add_subcommand("spectrogram", "Export a spectrogram CSV");
  spectrogram->add_option("--model", spect.model, "Model file (model-implied spectrogram)");
  spectrogram->add_option("--data", spect.data, "Series CSV (empirical spectrogram)");
  spectrogram->add_option("--freq-range", spect.freq_range, "lo:hi frequency range");
  spectrogram->add_option("--bins", spect.bins, "Frequency bins (model-implied)")
      ->check(CLI::PositiveNumber);
  spectrogram->add_option("--window", spect.window, "Window length (empirical; 0 = automatic)");
  spectrogram->add_option("--out", spect.out, "Spectrogram CSV path")->required();

  CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check", "Run verification suites");
  check_cmd->add_option("--suite", check.suite, "Suite name or 'all'")
      ->check(CLI::IsMember({"all", "psd", "fourier", "gradient", "kronecker", "reduction"}));
  check_cmd->add_option("--out", check.out, "Results CSV path");

  BenchmarkArgs bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Compare kernels on a held-out grid");
  benchmark->add_option("--data", bench.data, "Grid CSV")->required();
  benchmark->add_option("--axes", bench.axes, "Comma-separated axis CSV paths");
  benchmark->add_option("--kernels", bench.kernels, "Comma-separated kernel list");
  benchmark->add_option("--Q", bench.q, "Mixture components")->check(CLI::PositiveNumber);
  benchmark->add_option("--holdout", bench.holdout, "Held-out region")
      ->check(CLI::IsMember({"cross", "border"}));
  benchmark->add_option("--seed", bench.seed, "Random seed");
  benchmark->add_flag("--quiet", bench.quiet, "Suppress progress output");
  benchmark->add_option("--out", bench.out, "Result table CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  fit.q_given = q_opt->count() > 0;

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    if (*predict) return run_predict(pred);
    if (*spectrogram) return run_spectrogram(spect);
    if (*check_cmd) return run_check(check);
    if (*benchmark) return run_benchmark(bench);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
