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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gsmgp/data_io.hpp"
#include "gsmgp/gp_core.hpp"
#include "gsmgp/latent.hpp"
#include "gsmgp/model.hpp"
#include "gsmgp/types.hpp"
#include "json.hpp"

namespace {

using namespace gsmgp;

std::string tmp_path(const std::string& name) {
  static const std::string dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "gsmgp_cli_tests";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out = tmp_path("stdout_" + std::to_string(counter));
  const std::string err = tmp_path("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd =
      std::string(GSMGP_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Small chirp series shared by the fit/predict tests (generated once).
std::string chirp_series() {
  static const std::string path = [] {
    const std::string p = tmp_path("chirp48.csv");
    const CmdResult r = run_cli("simulate --kind chirp --n 48 --noise 0.1 --seed 9 --out " + p);
    REQUIRE(r.code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("cli: simulate writes data, truth and manifest") {
  const std::string out = tmp_path("sim_a.csv");
  const CmdResult r = run_cli("simulate --kind chirp --n 64 --noise 0.05 --seed 9 --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.find("wrote") != std::string::npos);

  const GridDataset data = load_series(out);
  CHECK(data.size() == 64);
  CHECK(read_file(out + ".truth.csv").rfind("x,mu,ell,w\n", 0) == 0);
  const auto manifest = nlohmann::json::parse(read_file(out + ".manifest.json"));
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("seed") == 9);

  // Same seed reproduces the file bit for bit; a new seed does not.
  const std::string again = tmp_path("sim_b.csv");
  REQUIRE(run_cli("simulate --kind chirp --n 64 --noise 0.05 --seed 9 --out " + again).code == 0);
  CHECK(read_file(out) == read_file(again));
  const std::string other = tmp_path("sim_c.csv");
  REQUIRE(run_cli("simulate --kind chirp --n 64 --noise 0.05 --seed 10 --out " + other).code == 0);
  CHECK(read_file(out) != read_file(other));
}

TEST_CASE("cli: simulate texture produces a grid and its noiseless truth") {
  const std::string out = tmp_path("tex.csv");
  const CmdResult r = run_cli(
      "simulate --kind texture --n 16 --noise 0.02 --pattern freq-sweep --seed 3 --out " + out);
  CHECK(r.code == 0);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == 16);
  CHECK(rows[0].size() == 16);
  const auto truth = parse_csv(read_file(out + ".truth.csv"));
  REQUIRE(truth.size() == 16);
  // The truth grid is the same pattern without noise, so the files differ.
  CHECK(read_file(out) != read_file(out + ".truth.csv"));
}

TEST_CASE("cli: usage errors exit with code 2") {
  CHECK(run_cli("simulate --kind nonsense --out " + tmp_path("x.csv")).code == 2);
  CHECK(run_cli("simulate --kind chirp").code == 2);  // --out is required
  CHECK(run_cli("").code == 2);                       // a subcommand is required
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("spectrogram --bins 0 --data x.csv --out y.csv").code == 2);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("cli: missing input files exit with code 1") {
  CHECK(run_cli("fit --data " + tmp_path("nope.csv") + " --out " + tmp_path("m.json")).code == 1);
  CHECK(run_cli("predict --model " + tmp_path("nope.json") + " --at 'lin(0,1,4)' --out " +
                tmp_path("p.csv"))
            .code == 1);
}

TEST_CASE("cli: fit trains a baseline and records the objective") {
  const std::string model_path = tmp_path("model_se.json");
  const CmdResult r = run_cli("fit --data " + chirp_series() +
                              " --kernel se --restarts 2 --candidates 2 --max-iterations 20"
                              " --quiet --seed 1 --out " +
                              model_path);
  CHECK(r.code == 0);
  CHECK(r.out.find("final objective") != std::string::npos);

  const GpModel model = load_model(model_path);
  CHECK(model.kind == KernelKind::se);
  CHECK(model.summary.restarts.size() == 2);

  const auto manifest = nlohmann::json::parse(read_file(model_path + ".manifest.json"));
  CHECK(manifest.at("command") == "fit");
  CHECK(manifest.at("final_objective").get<double>() ==
        doctest::Approx(model.summary.final_objective).epsilon(1e-12));
}

TEST_CASE("cli: component count is ignored for the squared-exponential kernel") {
  const std::string model_path = tmp_path("model_se_q.json");
  const CmdResult r = run_cli("fit --data " + chirp_series() +
                              " --kernel se --Q 3 --restarts 1 --candidates 1"
                              " --max-iterations 5 --quiet --out " +
                              model_path);
  CHECK(r.code == 0);
  CHECK(r.err.find("ignoring --Q") != std::string::npos);
  const auto manifest = nlohmann::json::parse(read_file(model_path + ".manifest.json"));
  CHECK(manifest.at("config").at("Q") == "1");
}

TEST_CASE("cli: fits are deterministic in the seed") {
  const std::string base = " fit --data " + chirp_series() +
                           " --kernel gsm --Q 1 --restarts 1 --candidates 2"
                           " --max-iterations 8 --seed 5 --quiet --out ";
  const std::string m1 = tmp_path("model_det1.json");
  const std::string m2 = tmp_path("model_det2.json");
  REQUIRE(run_cli(base + m1).code == 0);
  REQUIRE(run_cli(base + m2).code == 0);
  CHECK(read_file(m1) == read_file(m2));
}

TEST_CASE("cli: fit accepts masked grids") {
  GridDataset tex = simulate_texture(16, 16, TexturePattern::freq_sweep, 0.01, 1);
  tex.mask = cross_mask(16, 16, 4);
  const std::string values = tmp_path("masked_grid.csv");
  const std::string mask = tmp_path("masked_grid_mask.csv");
  save_grid_csv(values, tex);
  save_mask_csv(mask, tex);
  const CmdResult r = run_cli("fit --data " + values + " --mask " + mask +
                              " --kernel se --restarts 1 --candidates 1 --max-iterations 10"
                              " --quiet --out " +
                              tmp_path("model_masked.json"));
  CHECK(r.code == 0);
}

TEST_CASE("cli: predictions at explicit points match the library") {
  const std::string model_path = tmp_path("model_pred.json");
  REQUIRE(run_cli("fit --data " + chirp_series() +
                  " --kernel gsm --Q 1 --restarts 1 --candidates 2 --max-iterations 8"
                  " --seed 5 --quiet --out " +
                  model_path)
              .code == 0);

  const GpModel model = load_model(model_path);
  const Vec& axis = model.train_axes[0];
  std::ostringstream pts;
  char buf[40];
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", axis[i]);
    pts << buf;
  }
  const std::string points_path = tmp_path("points.csv");
  write_file(points_path, pts.str());

  const std::string out = tmp_path("pred.csv");
  const CmdResult r =
      run_cli("predict --model " + model_path + " --at " + points_path + " --out " + out);
  CHECK(r.code == 0);

  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == static_cast<std::size_t>(axis.size()) + 1);
  CHECK(rows[0] == std::vector<std::string>({"x1", "mean", "variance"}));

  Mat points(axis.size(), 1);
  points.col(0) = axis;
  const Prediction expected = predict_points(model, points);
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    CHECK(std::stod(rows[i + 1][1]) == doctest::Approx(expected.mean[i]).epsilon(1e-10));
    CHECK(std::stod(rows[i + 1][2]) == doctest::Approx(expected.variance[i]).epsilon(1e-10));
    CHECK(std::stod(rows[i + 1][2]) > 0.0);
  }
}

TEST_CASE("cli: predictions on a grid specification") {
  const std::string model_path = tmp_path("model_pred.json");  // written by the previous case
  if (!std::filesystem::exists(model_path)) {
    REQUIRE(run_cli("fit --data " + chirp_series() +
                    " --kernel gsm --Q 1 --restarts 1 --candidates 2 --max-iterations 8"
                    " --seed 5 --quiet --out " +
                    model_path)
                .code == 0);
  }
  const std::string out = tmp_path("pred_grid.csv");
  const CmdResult r =
      run_cli("predict --model " + model_path + " --at 'lin(-1,1,16)' --out " + out);
  CHECK(r.code == 0);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == 17);
  CHECK(std::stod(rows[1][0]) == -1.0);
  CHECK(std::stod(rows[16][0]) == 1.0);
  // Grid spec dimensionality must match the model.
  CHECK(run_cli("predict --model " + model_path + " --at 'lin(0,1,4),lin(0,1,4)' --out " +
                tmp_path("pred_bad.csv"))
            .code == 1);
}

TEST_CASE("cli: an empty prediction input yields a header-only file") {
  const std::string model_path = tmp_path("model_pred.json");
  REQUIRE(std::filesystem::exists(model_path));
  const std::string empty = tmp_path("empty_points.csv");
  write_file(empty, "");
  const std::string out = tmp_path("pred_empty.csv");
  CHECK(run_cli("predict --model " + model_path + " --at " + empty + " --out " + out).code == 0);
  CHECK(read_file(out) == "x1,mean,variance\n");
}

TEST_CASE("cli: empirical spectrogram export") {
  const std::string out = tmp_path("spec_data.csv");
  const CmdResult r = run_cli("spectrogram --data " + chirp_series() + " --out " + out);
  CHECK(r.code == 0);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0][0] == "input");
  CHECK(rows[0].size() == rows[1].size());
  // A window longer than the series is a runtime failure, not a crash.
  CHECK(run_cli("spectrogram --data " + chirp_series() + " --window 200 --out " +
                tmp_path("spec_bad.csv"))
            .code == 1);
}

TEST_CASE("cli: model-implied spectrogram of constant latents") {
  const Vec axis = Vec::LinSpaced(16, 0.0, 1.0);
  GpModel m;
  m.kind = KernelKind::gsm;
  m.gsm = GsmParams::constant({axis}, 1, HyperPrior::for_range(1.0), 1.2, 1.0, 2.0);
  m.train_axes = {axis};
  m.train_y = Vec::Zero(16);
  m.noise_log = -1.0;
  const std::string model_path = tmp_path("model_const.json");
  save_model(m, model_path);

  const std::string out = tmp_path("spec_model.csv");
  const CmdResult r = run_cli("spectrogram --model " + model_path +
                              " --bins 32 --freq-range 0:5 --out " + out);
  CHECK(r.code == 0);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == 17);           // header + one row per axis point
  REQUIRE(rows[0].size() == 33);        // input column + 32 frequency bins
  // Constant latents give identical rows up to the whitening round trip.
  for (std::size_t i = 2; i < rows.size(); ++i)
    for (std::size_t j = 1; j < rows[i].size(); ++j)
      CHECK(std::stod(rows[i][j]) ==
            doctest::Approx(std::stod(rows[1][j])).epsilon(1e-9));

  // Model-implied spectrograms require latent-modulated models.
  const std::string se_model = tmp_path("model_se.json");
  if (std::filesystem::exists(se_model))
    CHECK(run_cli("spectrogram --model " + se_model + " --out " + tmp_path("spec_se.csv")).code ==
          1);
}

TEST_CASE("cli: spectrogram source selection") {
  CHECK(run_cli("spectrogram --out " + tmp_path("spec_none.csv")).code == 2);
  CHECK(run_cli("spectrogram --model a.json --data b.csv --out " + tmp_path("spec_both.csv"))
            .code == 2);
}

TEST_CASE("cli: verification suite run") {
  const std::string out = tmp_path("check.csv");
  const CmdResult r = run_cli("check --suite reduction --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == 3);  // header + two reduction checks
  CHECK(rows[0][0] == "suite");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][0] == "reduction");
    CHECK(rows[i][2] == "1");
  }
}

TEST_CASE("cli: benchmark compares kernels on a held-out grid") {
  const std::string tex = tmp_path("bench_tex.csv");
  REQUIRE(run_cli("simulate --kind texture --n 16 --noise 0.01 --seed 1 --out " + tex).code == 0);
  const std::string out = tmp_path("bench.csv");
  const CmdResult r = run_cli("benchmark --data " + tex +
                              " --kernels gsm,se --Q 1 --holdout cross --seed 1 --quiet --out " +
                              out);
  CHECK(r.code == 0);
  CHECK(r.out.find("kernel") != std::string::npos);
  const auto rows = parse_csv(read_file(out));
  REQUIRE(rows.size() == 3);  // header + one row per kernel
  CHECK(rows[0] == std::vector<std::string>({"kernel", "rmse", "loglik", "fit_objective"}));
  CHECK(rows[1][0] == "gsm");
  CHECK(rows[2][0] == "se");
  CHECK(std::stod(rows[1][1]) > 0.0);
  CHECK(std::stod(rows[2][1]) > 0.0);

  // Deterministic under a fixed seed.
  const std::string out2 = tmp_path("bench2.csv");
  REQUIRE(run_cli("benchmark --data " + tex +
                  " --kernels gsm,se --Q 1 --holdout cross --seed 1 --quiet --out " + out2)
              .code == 0);
  CHECK(read_file(out) == read_file(out2));

  // One-dimensional data cannot be benchmarked.
  CHECK(run_cli("benchmark --data " + chirp_series() + " --quiet --out " +
                tmp_path("bench_bad.csv"))
            .code == 1);
}
