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

#include "gsmgp/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gsmgp/gp_core.hpp"
#include "gsmgp/kernels.hpp"
#include "gsmgp/rng.hpp"

namespace gsmgp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::string trimmed(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

double parse_number(const std::string& field, const std::string& path, std::size_t line_no) {
  const std::string t = trimmed(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                             ": malformed numeric cell '" + field + "'");
  return value;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trimmed(lines.back()).empty()) lines.pop_back();
  return lines;
}

Mat read_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty file");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f, path, i + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": line " + std::to_string(i + 1) +
                               ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Vec read_column(const std::string& path) {
  const Mat m = read_matrix(path);
  if (m.cols() != 1) throw std::runtime_error(path + ": expected a single column");
  return m.col(0);
}

Vec default_axis(Eigen::Index n) {
  Vec axis(n);
  for (Eigen::Index i = 0; i < n; ++i) axis[i] = static_cast<double>(i) / static_cast<double>(n);
  return axis;
}

void check_axis(const Vec& axis, Eigen::Index expected, const std::string& what) {
  if (axis.size() != expected)
    throw std::runtime_error(what + ": axis length " + std::to_string(axis.size()) +
                             " does not match grid extent " + std::to_string(expected));
  for (Eigen::Index i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw std::runtime_error(what + ": axis must be strictly increasing");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json latent_to_json(const LatentFunction& f) {
  ordered_json j;
  j["transform"] = f.transform.kind == Transform::Kind::log      ? "log"
                   : f.transform.kind == Transform::Kind::logit  ? "logit"
                                                                 : "identity";
  if (f.transform.kind == Transform::Kind::logit) j["nyquist"] = f.transform.nyquist;
  j["prior"] = {{"lengthscale", f.prior.lengthscale},
                {"variance", f.prior.variance},
                {"jitter", f.prior.jitter}};
  j["whitened"] = std::vector<double>(f.whitened.begin(), f.whitened.end());
  return j;
}

LatentFunction latent_from_json(const ordered_json& j, const Vec& axis) {
  const std::string kind = j.at("transform").get<std::string>();
  Transform t = Transform::identity();
  if (kind == "log") {
    t = Transform::log();
  } else if (kind == "logit") {
    t = Transform::logit(j.at("nyquist").get<double>());
  } else if (kind != "identity") {
    throw std::runtime_error("model file: unknown transform '" + kind + "'");
  }
  HyperPrior prior{j.at("prior").at("lengthscale").get<double>(),
                   j.at("prior").at("variance").get<double>(),
                   j.at("prior").at("jitter").get<double>()};
  const auto values = j.at("whitened").get<std::vector<double>>();
  Vec whitened = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  return LatentFunction(std::move(whitened), prior, t, axis);
}

}  // namespace

Eigen::Index GridDataset::observed_count() const {
  return static_cast<Eigen::Index>(std::count(mask.begin(), mask.end(), true));
}

void GridDataset::validate() const {
  if (axes.empty()) throw std::invalid_argument("dataset: no axes");
  Eigen::Index total = 1;
  for (const Vec& axis : axes) {
    if (axis.size() < 1) throw std::invalid_argument("dataset: empty axis");
    for (Eigen::Index i = 1; i < axis.size(); ++i)
      if (!(axis[i] > axis[i - 1]))
        throw std::invalid_argument("dataset: axes must be strictly increasing");
    total *= axis.size();
  }
  if (y.size() != total) throw std::invalid_argument("dataset: value count does not match axes");
  if (mask.size() != static_cast<std::size_t>(total))
    throw std::invalid_argument("dataset: mask length does not match values");
  if (observed_count() == 0) throw std::invalid_argument("dataset: no observed cells");
}

void impute_mean(GridDataset* data) {
  const Eigen::Index total = data->y.size();
  if (data->p() == 3) {
    const Eigen::Index slice = data->axes[1].size() * data->axes[2].size();
    for (Eigen::Index s = 0; s * slice < total; ++s) {
      double sum = 0.0;
      Eigen::Index count = 0;
      for (Eigen::Index i = s * slice; i < (s + 1) * slice; ++i)
        if (data->mask[i]) {
          sum += data->y[i];
          ++count;
        }
      if (count == 0)
        throw std::runtime_error("imputation: slice " + std::to_string(s) +
                                 " has no observed cells");
      const double mean = sum / static_cast<double>(count);
      for (Eigen::Index i = s * slice; i < (s + 1) * slice; ++i)
        if (!data->mask[i]) data->y[i] = mean;
    }
    return;
  }
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < total; ++i)
    if (data->mask[i]) {
      sum += data->y[i];
      ++count;
    }
  if (count == 0) throw std::runtime_error("imputation: no observed cells");
  const double mean = sum / static_cast<double>(count);
  for (Eigen::Index i = 0; i < total; ++i)
    if (!data->mask[i]) data->y[i] = mean;
}

GridDataset load_series(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 3) throw std::runtime_error(path + ": need a header and at least 2 rows");
  if (split(lines[0], ',').size() != 2)
    throw std::runtime_error(path + ": line 1: expected a two-column header");
  std::vector<std::pair<double, double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 2)
      throw std::runtime_error(path + ": line " + std::to_string(i + 1) +
                               ": expected two columns");
    rows.emplace_back(parse_number(fields[0], path, i + 1), parse_number(fields[1], path, i + 1));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first)
      throw std::runtime_error(path + ": duplicate input value " + format_double(rows[i].first));
  GridDataset data;
  data.axes.resize(1);
  data.axes[0].resize(static_cast<Eigen::Index>(rows.size()));
  data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.axes[0][static_cast<Eigen::Index>(i)] = rows[i].first;
    data.y[static_cast<Eigen::Index>(i)] = rows[i].second;
  }
  data.mask.assign(rows.size(), true);
  data.validate();
  return data;
}

GridDataset load_grid(const std::string& values_path, const std::string& mask_path,
                      const std::vector<std::string>& axes_paths) {
  const int p = axes_paths.empty() ? 2 : static_cast<int>(axes_paths.size());
  if (p != 2 && p != 3)
    throw std::runtime_error("load grid: need two or three axes, got " + std::to_string(p));
  const Mat values = read_matrix(values_path);

  GridDataset data;
  if (p == 2) {
    const Eigen::Index n1 = values.rows(), n2 = values.cols();
    data.y.resize(n1 * n2);
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j) data.y[i * n2 + j] = values(i, j);
    data.axes = {default_axis(n1), default_axis(n2)};
  } else {
    // Stacked slices: first column is the slice index of the first axis.
    const Eigen::Index n3 = values.cols() - 1;
    if (n3 < 1) throw std::runtime_error(values_path + ": slice format needs data columns");
    Eigen::Index n1 = 0;
    for (Eigen::Index r = 0; r < values.rows(); ++r)
      n1 = std::max<Eigen::Index>(n1, static_cast<Eigen::Index>(values(r, 0)) + 1);
    if (values.rows() % n1 != 0)
      throw std::runtime_error(values_path + ": rows do not divide evenly into slices");
    const Eigen::Index n2 = values.rows() / n1;
    data.y.resize(n1 * n2 * n3);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      const auto s = static_cast<Eigen::Index>(values(r, 0));
      if (values(r, 0) != static_cast<double>(s) || s != r / n2)
        throw std::runtime_error(values_path + ": line " + std::to_string(r + 1) +
                                 ": slice index out of order");
      for (Eigen::Index k = 0; k < n3; ++k) data.y[r * n3 + k] = values(r, k + 1);
    }
    data.axes = {default_axis(n1), default_axis(n2), default_axis(n3)};
  }

  data.mask.assign(static_cast<std::size_t>(data.y.size()), true);
  if (!mask_path.empty()) {
    const Mat mask = read_matrix(mask_path);
    if (mask.rows() != values.rows() || mask.cols() != values.cols())
      throw std::runtime_error(mask_path + ": mask shape does not match values");
    const Eigen::Index skip = p == 3 ? 1 : 0;
    Eigen::Index idx = 0;
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
      for (Eigen::Index c = skip; c < mask.cols(); ++c) {
        const double v = mask(r, c);
        if (v != 0.0 && v != 1.0)
          throw std::runtime_error(mask_path + ": line " + std::to_string(r + 1) +
                                   ": mask cells must be 0 or 1");
        data.mask[static_cast<std::size_t>(idx++)] = v == 1.0;
      }
  }

  for (std::size_t d = 0; d < axes_paths.size(); ++d) {
    if (axes_paths[d].empty()) continue;
    Vec axis = read_column(axes_paths[d]);
    check_axis(axis, data.axes[d].size(), axes_paths[d]);
    data.axes[d] = std::move(axis);
  }

  impute_mean(&data);
  data.validate();
  return data;
}

GridDataset simulate_chirp(int n, double noise_var, std::uint64_t seed, ChirpTruth* truth) {
  if (n < 2) throw std::invalid_argument("simulate chirp: need at least 2 points");
  Vec axis(n);
  for (int i = 0; i < n; ++i)
    axis[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);

  GsmComponentValues comp;
  comp.w = Vec::Ones(n);
  comp.ell = Vec::Constant(n, std::exp(-1.0));
  comp.mu = Vec(n);
  for (int i = 0; i < n; ++i) comp.mu[i] = 1.0 + (1.0 - axis[i]) * (1.0 - axis[i]);

  Mat k = gsm_gram({comp}, axis);
  k.diagonal().array() += noise_var;
  const Mat l = jittered_cholesky(std::move(k));
  Rng rng(seed);
  Vec z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();

  GridDataset data;
  data.axes = {axis};
  data.y = l.triangularView<Eigen::Lower>() * z;
  data.mask.assign(static_cast<std::size_t>(n), true);
  if (truth) {
    truth->mu = comp.mu;
    truth->ell = std::exp(-1.0);
    truth->w = 1.0;
  }
  return data;
}

TexturePattern texture_pattern_from_name(const std::string& name) {
  if (name == "freq-sweep") return TexturePattern::freq_sweep;
  if (name == "stationary-weave") return TexturePattern::stationary_weave;
  throw std::invalid_argument("unknown texture pattern '" + name + "'");
}

GridDataset simulate_texture(int n1, int n2, TexturePattern pattern, double noise_var,
                             std::uint64_t seed) {
  if (n1 < 8 || n2 < 8) throw std::invalid_argument("simulate texture: dimensions must be >= 8");
  GridDataset data;
  data.axes = {default_axis(n1), default_axis(n2)};
  data.y.resize(static_cast<Eigen::Index>(n1) * n2);
  Rng rng(seed);
  const double noise_sd = std::sqrt(noise_var);
  for (int i = 0; i < n1; ++i) {
    const double x = data.axes[0][i];
    for (int j = 0; j < n2; ++j) {
      const double x2 = data.axes[1][j];
      double v = 0.0;
      if (pattern == TexturePattern::freq_sweep) {
        // Instantaneous frequency 3 + 8x sweeps upward across the first axis.
        v = std::sin(2.0 * M_PI * (3.0 * x + 4.0 * x * x)) * std::sin(2.0 * M_PI * 5.0 * x2);
      } else {
        v = std::sin(2.0 * M_PI * 4.0 * x) * std::sin(2.0 * M_PI * 8.0 * x2);
      }
      data.y[static_cast<Eigen::Index>(i) * n2 + j] = v + noise_sd * rng.normal();
    }
  }
  data.mask.assign(static_cast<std::size_t>(data.y.size()), true);
  return data;
}

std::vector<bool> cross_mask(int n1, int n2, int thickness) {
  if (thickness < 1 || thickness > std::min(n1, n2))
    throw std::invalid_argument("cross mask: bad thickness");
  std::vector<bool> mask(static_cast<std::size_t>(n1) * n2, true);
  const int r0 = (n1 - thickness) / 2, c0 = (n2 - thickness) / 2;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const bool in_row_band = i >= r0 && i < r0 + thickness;
      const bool in_col_band = j >= c0 && j < c0 + thickness;
      if (in_row_band || in_col_band) mask[static_cast<std::size_t>(i) * n2 + j] = false;
    }
  return mask;
}

std::vector<bool> border_mask(int n1, int n2, int width) {
  if (width < 1 || 2 * width >= std::min(n1, n2))
    throw std::invalid_argument("border mask: bad width");
  std::vector<bool> mask(static_cast<std::size_t>(n1) * n2, true);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (i < width || i >= n1 - width || j < width || j >= n2 - width)
        mask[static_cast<std::size_t>(i) * n2 + j] = false;
  return mask;
}

void save_model(const GpModel& model, const std::string& path) {
  ordered_json j;
  j["format"] = "gsmgp-model/1";
  j["kind"] = kernel_kind_name(model.kind);
  j["noise_log"] = model.noise_log;
  j["axes"] = ordered_json::array();
  for (const Vec& axis : model.train_axes)
    j["axes"].push_back(std::vector<double>(axis.begin(), axis.end()));
  j["y"] = std::vector<double>(model.train_y.begin(), model.train_y.end());

  if (model.kind == KernelKind::gsm) {
    j["dims"] = ordered_json::array();
    for (const GsmDim& dim : model.gsm.dims) {
      ordered_json jd;
      jd["nyquist"] = dim.nyquist;
      jd["components"] = ordered_json::array();
      for (const auto& c : dim.comps) {
        ordered_json jc;
        jc["w"] = latent_to_json(c.w);
        jc["ell"] = latent_to_json(c.ell);
        jc["mu"] = latent_to_json(c.mu);
        jd["components"].push_back(std::move(jc));
      }
      j["dims"].push_back(std::move(jd));
    }
  } else {
    ordered_json jb;
    jb["q"] = model.baseline.q;
    jb["amplitude_log"] = model.baseline.amplitude_log;
    jb["nyquists"] = std::vector<double>(model.baseline.nyquists.begin(),
                                         model.baseline.nyquists.end());
    jb["dim_params"] = ordered_json::array();
    for (const Vec& pars : model.baseline.dim_params)
      jb["dim_params"].push_back(std::vector<double>(pars.begin(), pars.end()));
    j["baseline"] = std::move(jb);
  }

  ordered_json js;
  js["final_objective"] = model.summary.final_objective;
  js["chosen_restart"] = model.summary.chosen_restart;
  js["restarts"] = ordered_json::array();
  for (const RestartInfo& r : model.summary.restarts)
    js["restarts"].push_back({{"index", r.index},
                              {"objective", r.objective},
                              {"iterations", r.iterations},
                              {"reason", r.reason}});
  j["summary"] = std::move(js);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

GpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": corrupt model file: " + e.what());
  }
  if (!j.contains("format") || j["format"].get<std::string>() != "gsmgp-model/1")
    throw std::runtime_error(path + ": unsupported model file version");

  GpModel model;
  model.kind = kernel_kind_from_name(j.at("kind").get<std::string>());
  model.noise_log = j.at("noise_log").get<double>();
  for (const auto& ja : j.at("axes")) {
    const auto values = ja.get<std::vector<double>>();
    model.train_axes.push_back(
        Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  const auto yvals = j.at("y").get<std::vector<double>>();
  model.train_y = Eigen::Map<const Vec>(yvals.data(), static_cast<Eigen::Index>(yvals.size()));

  if (model.kind == KernelKind::gsm) {
    int d = 0;
    for (const auto& jd : j.at("dims")) {
      GsmDim dim;
      dim.axis = model.train_axes.at(d);
      dim.nyquist = jd.at("nyquist").get<double>();
      for (const auto& jc : jd.at("components")) {
        GsmComponentLatents c{latent_from_json(jc.at("w"), dim.axis),
                              latent_from_json(jc.at("ell"), dim.axis),
                              latent_from_json(jc.at("mu"), dim.axis)};
        dim.comps.push_back(std::move(c));
      }
      model.gsm.dims.push_back(std::move(dim));
      ++d;
    }
  } else {
    const auto& jb = j.at("baseline");
    model.baseline.kind = model.kind;
    model.baseline.q = jb.at("q").get<int>();
    model.baseline.amplitude_log = jb.at("amplitude_log").get<double>();
    const auto nyq = jb.at("nyquists").get<std::vector<double>>();
    model.baseline.nyquists.assign(nyq.begin(), nyq.end());
    for (const auto& jp : jb.at("dim_params")) {
      const auto values = jp.get<std::vector<double>>();
      model.baseline.dim_params.push_back(
          Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
  }

  if (j.contains("summary")) {
    const auto& js = j.at("summary");
    model.summary.final_objective = js.at("final_objective").get<double>();
    model.summary.chosen_restart = js.at("chosen_restart").get<int>();
    for (const auto& jr : js.at("restarts"))
      model.summary.restarts.push_back({jr.at("index").get<int>(),
                                        jr.at("objective").get<double>(),
                                        jr.at("iterations").get<int>(),
                                        jr.at("reason").get<std::string>()});
  }
  return model;
}

void save_series_csv(const std::string& path, const Vec& x, const Vec& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y\n";
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out << format_double(x[i]) << "," << format_double(y[i]) << "\n";
}

void save_grid_csv(const std::string& path, const GridDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (data.p() == 2) {
    const Eigen::Index n1 = data.axes[0].size(), n2 = data.axes[1].size();
    for (Eigen::Index i = 0; i < n1; ++i) {
      for (Eigen::Index j = 0; j < n2; ++j)
        out << (j ? "," : "") << format_double(data.y[i * n2 + j]);
      out << "\n";
    }
  } else if (data.p() == 3) {
    const Eigen::Index n1 = data.axes[0].size(), n2 = data.axes[1].size(),
                       n3 = data.axes[2].size();
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j) {
        out << i;
        for (Eigen::Index k = 0; k < n3; ++k)
          out << "," << format_double(data.y[(i * n2 + j) * n3 + k]);
        out << "\n";
      }
  } else {
    throw std::invalid_argument("grid CSV writer handles two or three dimensions");
  }
}

void save_mask_csv(const std::string& path, const GridDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (data.p() != 2) throw std::invalid_argument("mask CSV writer handles two dimensions");
  const Eigen::Index n1 = data.axes[0].size(), n2 = data.axes[1].size();
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j)
      out << (j ? "," : "") << (data.mask[static_cast<std::size_t>(i * n2 + j)] ? 1 : 0);
    out << "\n";
  }
}

void save_spectrogram_csv(const std::string& path, const Spectrogram& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "input";
  for (Eigen::Index j = 0; j < spec.frequency_axis.size(); ++j)
    out << "," << format_double(spec.frequency_axis[j]);
  out << "\n";
  for (Eigen::Index i = 0; i < spec.input_axis.size(); ++i) {
    out << format_double(spec.input_axis[i]);
    for (Eigen::Index j = 0; j < spec.frequency_axis.size(); ++j)
      out << "," << format_double(spec.amplitude(i, j));
    out << "\n";
  }
}

void save_prediction_csv(const std::string& path, const Mat& inputs, const Vec& mean,
                         const Vec& variance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index d = 0; d < inputs.cols(); ++d) out << "x" << d + 1 << ",";
  out << "mean,variance\n";
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (Eigen::Index d = 0; d < inputs.cols(); ++d) out << format_double(inputs(i, d)) << ",";
    out << format_double(mean[i]) << "," << format_double(variance[i]) << "\n";
  }
}

void write_manifest(const RunManifest& manifest, const std::string& output_path) {
  ordered_json j;
  j["command"] = manifest.command;
  ordered_json jc = ordered_json::object();
  for (const auto& [key, value] : manifest.config) jc[key] = value;
  j["config"] = std::move(jc);
  j["seed"] = manifest.seed;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  if (manifest.has_objective) j["final_objective"] = manifest.final_objective;
  const std::string path = output_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<Vec> parse_grid_spec(const std::string& spec) {
  static const std::regex entry(R"(lin\(\s*([^,()]+)\s*,\s*([^,()]+)\s*,\s*([^,()]+)\s*\))");
  std::vector<Vec> axes;
  auto begin = std::sregex_iterator(spec.begin(), spec.end(), entry);
  std::string matched;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    matched += m.str();
    const double start = parse_number(m[1].str(), "grid spec", 1);
    const double stop = parse_number(m[2].str(), "grid spec", 1);
    const double count_raw = parse_number(m[3].str(), "grid spec", 1);
    const int count = static_cast<int>(count_raw);
    if (count_raw != count || count < 1)
      throw std::runtime_error("grid spec: count must be a positive integer");
    if (count > 1 && !(stop > start))
      throw std::runtime_error("grid spec: stop must exceed start");
    Vec axis(count);
    for (int i = 0; i < count; ++i)
      axis[i] = count == 1 ? start
                           : start + (stop - start) * static_cast<double>(i) /
                                         static_cast<double>(count - 1);
    axes.push_back(std::move(axis));
  }
  // Everything outside the matched entries must be separators only.
  std::string residue = std::regex_replace(spec, entry, "");
  residue.erase(std::remove_if(residue.begin(), residue.end(),
                               [](unsigned char c) { return c == ',' || std::isspace(c); }),
                residue.end());
  if (axes.empty() || !residue.empty())
    throw std::runtime_error("grid spec: expected comma-separated lin(start,stop,count) entries");
  return axes;
}

}  // namespace gsmgp
