// Copyright 2026 The lolysim Authors
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

// lolysim command line front end:
//   stats        trace summary statistics at several sampling intervals
//   predict-eval relative prediction-error quantiles on supplied traces
//   fit-errors   parametric fits of truncated error distributions
//   sweep        run configuration grids across traces
//   frontier     quality frontier curves with concave hulls
//   compare      integral comparison of two frontier curves
//   example-run  one session with plot-ready output series

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lolysim/distribution_fit.hpp"
#include "lolysim/error_model.hpp"
#include "lolysim/experiment.hpp"
#include "lolysim/predictors.hpp"
#include "lolysim/simulation.hpp"
#include "lolysim/text_format.hpp"
#include "lolysim/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    spill(out_path, content);
  }
}

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> scales;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    for (int s = lo; s <= hi; ++s) scales.push_back(s);
  } else {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) scales.push_back(std::stoi(item));
  }
  if (scales.empty()) throw std::runtime_error("no scales given");
  return scales;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(std::stod(item));
  return values;
}

// Linear-interpolation sample quantile of a sorted vector.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::runtime_error("quantile of empty set");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::string> trace_files_in(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no trace files in " + dir);
  return paths;
}

int cmd_stats(const std::vector<std::string>& trace_paths, const std::string& intervals_text,
              const std::string& out_path) {
  const auto intervals = parse_scales(intervals_text);
  std::string csv =
      "trace,interval_s,n_windows,mean_bps,cv,autocorr_lag1,diff_autocorr_lag1\n";
  for (const auto& path : trace_paths) {
    const lolysim::ThroughputTrace trace = lolysim::load_trace(path);
    for (const int interval : intervals) {
      const auto series = lolysim::resample(trace, interval);
      const auto stats = lolysim::compute_stats(series, interval);
      csv += trace.id;
      csv += ',';
      csv += lolysim::format_number(interval);
      csv += ',';
      csv += lolysim::format_number(series.size());
      csv += ',';
      csv += lolysim::format_number(stats.mean_bps);
      csv += ',';
      if (stats.cv) csv += lolysim::format_number(*stats.cv);
      csv += ',';
      if (stats.autocorr_lag1) csv += lolysim::format_number(*stats.autocorr_lag1);
      csv += ',';
      if (stats.diff_autocorr_lag1) csv += lolysim::format_number(*stats.diff_autocorr_lag1);
      csv += '\n';
    }
  }
  emit(out_path, csv);
  return 0;
}

int cmd_predict_eval(const std::vector<std::string>& trace_paths, const std::string& method,
                     const std::string& scales_text, const std::string& quantiles_text,
                     double rho_min, const std::string& out_path,
                     const std::string& errors_out_path) {
  const auto spec = lolysim::parse_predictor_spec(method);
  const auto scales = parse_scales(scales_text);
  const auto quantiles = parse_double_list(quantiles_text);

  // Signed errors per scale, pooled over every trace (sliding by 1 s).
  const bool dump_raw = !errors_out_path.empty();
  std::map<int, std::vector<double>> signed_errors;
  std::string raw = "t,T,signed_error\n";
  for (const auto& path : trace_paths) {
    const lolysim::ThroughputTrace trace = lolysim::load_trace(path);
    const auto duration = static_cast<long long>(trace.duration_s());
    const lolysim::MeterView view = [&trace](double t1, double t2)
        -> std::optional<double> {
      if (t1 < 0.0 || t2 > trace.duration_s()) return std::nullopt;
      return trace.mean_rate(t1, t2);
    };
    for (const int T : scales) {
      const long long first = static_cast<long long>(spec.n) * T;
      for (long long t = first; t + T <= duration; ++t) {
        const auto records = lolysim::predict_all_scales(view, t, spec, T);
        const auto& rec = records[static_cast<std::size_t>(T - 1)];
        if (!rec.available) continue;
        const double realized =
            trace.mean_rate(static_cast<double>(t), static_cast<double>(t + T));
        const double err = lolysim::signed_rel_error(rec.rho_hat, realized, rho_min);
        signed_errors[T].push_back(err);
        if (dump_raw) {
          raw += lolysim::format_number(t + T);
          raw += ',';
          raw += lolysim::format_number(T);
          raw += ',';
          raw += lolysim::format_number(err);
          raw += '\n';
        }
      }
    }
  }

  std::string csv = "scale_s,side,quantile,value,n_samples\n";
  for (const int T : scales) {
    const auto& errors = signed_errors[T];
    for (const char* side : {"under", "over"}) {
      std::vector<double> magnitudes;
      for (const double e : errors) {
        const bool under = e < 0.0;
        if (under == (std::string(side) == "under")) magnitudes.push_back(std::abs(e));
      }
      std::sort(magnitudes.begin(), magnitudes.end());
      for (const double q : quantiles) {
        csv += lolysim::format_number(T);
        csv += ',';
        csv += side;
        csv += ',';
        csv += lolysim::format_number(q);
        csv += ',';
        if (!magnitudes.empty()) csv += lolysim::format_number(quantile(magnitudes, q));
        csv += ',';
        csv += lolysim::format_number(magnitudes.size());
        csv += '\n';
      }
    }
  }
  emit(out_path, csv);
  if (dump_raw) spill(errors_out_path, raw);
  return 0;
}

json fit_to_json(const lolysim::FitResult& result, lolysim::ErrorSide side) {
  json j;
  j["side"] = side == lolysim::ErrorSide::kUnder ? "under" : "over";
  switch (result.status) {
    case lolysim::FitStatus::kInsufficientSamples:
      j["status"] = "insufficient-samples";
      return j;
    case lolysim::FitStatus::kDegenerate:
      j["status"] = "degenerate";
      return j;
    case lolysim::FitStatus::kOk:
      break;
  }
  j["status"] = "ok";
  j["family"] = lolysim::dist_family_name(result.dist.family);
  json params;
  switch (result.dist.family) {
    case lolysim::DistFamily::kExponential:
      params["rate"] = result.dist.params[0];
      break;
    case lolysim::DistFamily::kNormal:
      params["mu"] = result.dist.params[0];
      params["sigma"] = result.dist.params[1];
      break;
    case lolysim::DistFamily::kLogistic:
      params["mu"] = result.dist.params[0];
      params["scale"] = result.dist.params[1];
      break;
    case lolysim::DistFamily::kLomax:
      params["alpha"] = result.dist.params[0];
      params["lambda"] = result.dist.params[1];
      break;
  }
  j["params"] = params;
  j["l2_distance"] = result.dist.l2_distance;
  j["ks_statistic"] = result.dist.ks_statistic;
  j["n_samples"] = result.dist.n_samples;
  j["window"] = json::array({result.dist.window.lo, result.dist.window.hi});
  return j;
}

int cmd_fit_errors(const std::string& csv_path, const std::string& family_name,
                   const std::string& side_name, int horizon, bool all_families,
                   const std::string& out_path) {
  const lolysim::ErrorSide side =
      side_name == "under" ? lolysim::ErrorSide::kUnder : lolysim::ErrorSide::kOver;

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(csv_path + ": empty file");
  std::vector<double> magnitudes;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string t_str, horizon_str, value_str;
    if (!std::getline(fields, t_str, ',') || !std::getline(fields, horizon_str, ',') ||
        !std::getline(fields, value_str, ',')) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                               ": expected columns t,T,signed_error");
    }
    if (horizon > 0 && std::stoi(horizon_str) != horizon) continue;
    const double value = std::stod(value_str);
    const bool under = value < 0.0;
    if (under == (side == lolysim::ErrorSide::kUnder)) magnitudes.push_back(std::abs(value));
  }

  json out;
  if (all_families) {
    json fits = json::array();
    for (const auto family :
         {lolysim::DistFamily::kExponential, lolysim::DistFamily::kNormal,
          lolysim::DistFamily::kLogistic, lolysim::DistFamily::kLomax}) {
      auto result = lolysim::fit_truncated(magnitudes, side, family);
      json j = fit_to_json(result, side);
      j["family"] = lolysim::dist_family_name(family);
      fits.push_back(std::move(j));
    }
    std::sort(fits.begin(), fits.end(), [](const json& a, const json& b) {
      const double la = a.value("l2_distance", 1e300);
      const double lb = b.value("l2_distance", 1e300);
      return la < lb;
    });
    out["fits"] = std::move(fits);
  } else {
    const auto family = lolysim::parse_dist_family(family_name);
    out = fit_to_json(lolysim::fit_truncated(magnitudes, side, family), side);
    out["family"] = lolysim::dist_family_name(family);
  }
  emit(out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& traces_dir,
              const std::string& out_dir, int threads) {
  const auto spec = lolysim::parse_sweep_spec(slurp(spec_path));
  const auto paths = trace_files_in(traces_dir);
  const auto table = lolysim::run_sweep(spec, paths, threads);
  fs::create_directories(out_dir);
  spill((fs::path(out_dir) / "results.csv").string(), lolysim::sweep_to_csv(table));
  const auto region = lolysim::operating_region(table);
  spill((fs::path(out_dir) / "region.csv").string(), lolysim::region_to_csv(region));
  std::cerr << "sweep: " << spec.configs.size() << " configs x " << paths.size()
            << " traces -> " << out_dir << "\n";
  return 0;
}

std::string locate_results_csv(const std::string& results) {
  if (fs::is_directory(results)) return (fs::path(results) / "results.csv").string();
  return results;
}

int cmd_frontier(const std::string& results, const std::string& omega_text,
                 const std::string& sigma_text, const std::string& out_path) {
  const auto table = lolysim::parse_sweep_csv(slurp(locate_results_csv(results)));
  const auto omegas = omega_text.empty() ? lolysim::default_frontier_omega_thresholds()
                                         : parse_double_list(omega_text);
  const auto sigmas = sigma_text.empty() ? lolysim::default_frontier_sigma_grid()
                                         : parse_double_list(sigma_text);
  const auto curves = lolysim::quality_frontier(table, sigmas, omegas);
  emit(out_path, lolysim::frontier_to_csv(curves));
  return 0;
}

int cmd_compare(const std::string& frontier_path, const std::string& algo_a,
                const std::string& algo_b, const std::string& omega_text,
                const std::string& out_path) {
  const auto curves = lolysim::parse_frontier_csv(slurp(frontier_path));
  const auto omega_filter = omega_text.empty() ? std::vector<double>{}
                                               : parse_double_list(omega_text);
  const auto curve_for = [&](const std::string& algo,
                             double omega) -> const lolysim::FrontierCurve* {
    for (const auto& curve : curves) {
      if (curve.algorithm == algo && curve.omega_threshold == omega) return &curve;
    }
    return nullptr;
  };
  std::vector<double> omegas;
  for (const auto& curve : curves) {
    if (curve.algorithm != algo_a) continue;
    if (!omega_filter.empty() &&
        std::find(omega_filter.begin(), omega_filter.end(), curve.omega_threshold) ==
            omega_filter.end()) {
      continue;
    }
    omegas.push_back(curve.omega_threshold);
  }
  std::sort(omegas.begin(), omegas.end());

  json out = json::array();
  for (const double omega : omegas) {
    const auto* a = curve_for(algo_a, omega);
    const auto* b = curve_for(algo_b, omega);
    json j;
    j["omega_threshold"] = omega;
    if (!a || !b) {
      j["outcome"] = "incomparable";
      out.push_back(std::move(j));
      continue;
    }
    std::vector<lolysim::CurvePoint> pa, pb;
    for (const auto& pt : a->points) pa.push_back({pt.sigma, pt.quality_hull});
    for (const auto& pt : b->points) pb.push_back({pt.sigma, pt.quality_hull});
    const auto cmp = lolysim::integral_compare(pa, pb);
    j["outcome"] = lolysim::compare_outcome_name(cmp.outcome);
    j["integral_a"] = cmp.integral_a;
    j["integral_b"] = cmp.integral_b;
    j["range"] = json::array({cmp.range_lo, cmp.range_hi});
    out.push_back(std::move(j));
    std::cerr << "omega " << omega << ": " << lolysim::compare_outcome_name(cmp.outcome)
              << " (" << algo_a << " " << cmp.integral_a << " vs " << algo_b << " "
              << cmp.integral_b << ")\n";
  }
  json doc;
  doc["a"] = algo_a;
  doc["b"] = algo_b;
  doc["comparisons"] = std::move(out);
  emit(out_path, doc.dump(2) + "\n");
  return 0;
}

int cmd_example_run(const std::string& config_path, const std::string& trace_path,
                    const std::string& out_dir) {
  const auto spec = lolysim::parse_session_spec(slurp(config_path));
  const auto trace = lolysim::load_trace(trace_path);
  const auto report = lolysim::run_session(trace, spec.catalog, spec.timeline, spec.sim);
  const auto bundle =
      lolysim::emit_example_run(report, trace, spec.catalog, spec.timeline);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  spill((dir / "report.json").string(), lolysim::report_to_json(report));
  spill((dir / "events.csv").string(), lolysim::events_to_csv(report));
  spill((dir / "series_throughput.csv").string(), bundle.throughput_csv);
  spill((dir / "series_selections.csv").string(), bundle.selections_csv);
  spill((dir / "series_buffer.csv").string(), bundle.buffer_csv);
  std::cerr << "example-run: sigma=" << report.sigma << " omega=" << report.omega
            << " mean_repr="
            << (report.mean_repr ? lolysim::format_number(*report.mean_repr) : "n/a")
            << " -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for QoE-based low-delay adaptive live streaming"};
  app.require_subcommand(1);

  // stats
  std::vector<std::string> stats_traces;
  std::string stats_intervals = "1,2,5,10";
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Trace summary statistics");
  stats->add_option("traces", stats_traces, "Trace files")->required()->expected(-1);
  stats->add_option("--intervals", stats_intervals, "Sampling intervals, e.g. 1,2,5,10");
  stats->add_option("--out", stats_out, "Output CSV (default stdout)");

  // predict-eval
  std::vector<std::string> pe_traces;
  std::string pe_method = "SMA:1:ar";
  std::string pe_scales = "1..10";
  std::string pe_quantiles = "0.2,0.5,0.9";
  std::string pe_out, pe_errors_out;
  double pe_rho_min = lolysim::kDefaultRhoMinBps;
  auto* pe = app.add_subcommand("predict-eval", "Prediction-error quantiles over traces");
  pe->add_option("traces", pe_traces, "Trace files")->required()->expected(-1);
  pe->add_option("--method", pe_method, "Predictor, e.g. SMA:1:ar, LinExt:4, HW:6:mse");
  pe->add_option("--scales", pe_scales, "Horizons, e.g. 1..10 or 1,2,5");
  pe->add_option("--quantiles", pe_quantiles, "Quantiles, e.g. 0.2,0.5,0.9");
  pe->add_option("--rho-min", pe_rho_min, "Clamp for relative errors, bits/s");
  pe->add_option("--out", pe_out, "Quantile table CSV (default stdout)");
  pe->add_option("--errors-out", pe_errors_out, "Raw signed errors CSV (t,T,signed_error)");

  // fit-errors
  std::string fe_csv, fe_family = "lomax", fe_side = "over", fe_out;
  int fe_horizon = 0;
  bool fe_all = false;
  auto* fe = app.add_subcommand("fit-errors", "Fit truncated error distributions");
  fe->add_option("errors", fe_csv, "Signed-error CSV (t,T,signed_error)")->required();
  fe->add_option("--family", fe_family, "exponential|normal|logistic|lomax");
  fe->add_option("--side", fe_side, "under|over")
      ->check(CLI::IsMember({"under", "over"}));
  fe->add_option("--horizon", fe_horizon, "Restrict to one horizon T (default: all)");
  fe->add_flag("--all-families", fe_all, "Fit all four families, sorted by L2 distance");
  fe->add_option("--out", fe_out, "Output JSON (default stdout)");

  // sweep
  std::string sw_spec, sw_traces, sw_out = "results";
  int sw_threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run configuration grids across traces");
  sw->add_option("--spec", sw_spec, "Sweep spec JSON")->required();
  sw->add_option("--traces", sw_traces, "Directory of trace files")->required();
  sw->add_option("--out", sw_out, "Output directory");
  sw->add_option("--threads", sw_threads, "Worker threads (default: hardware)");

  // frontier
  std::string fr_results, fr_omega, fr_sigma, fr_out;
  auto* fr = app.add_subcommand("frontier", "Quality frontier curves with concave hulls");
  fr->add_option("--results", fr_results, "Sweep output dir or results.csv")->required();
  fr->add_option("--omega", fr_omega, "Omega thresholds (default: 0.02..0.5 ladder)");
  fr->add_option("--sigma", fr_sigma, "Sigma grid (default: 0.005..0.1 ladder)");
  fr->add_option("--out", fr_out, "Output CSV (default stdout)");

  // compare
  std::string cp_frontier, cp_a = "lolypop", cp_b = "festive", cp_omega, cp_out;
  auto* cp = app.add_subcommand("compare", "Integral comparison of frontier curves");
  cp->add_option("--frontier", cp_frontier, "Frontier CSV produced by 'frontier'")
      ->required();
  cp->add_option("--a", cp_a, "First algorithm name");
  cp->add_option("--b", cp_b, "Second algorithm name");
  cp->add_option("--omega", cp_omega, "Restrict to these omega thresholds");
  cp->add_option("--out", cp_out, "Output JSON (default stdout)");

  // example-run
  std::string er_config, er_trace, er_out = "example-run";
  auto* er = app.add_subcommand("example-run", "One session with plot-ready series");
  er->add_option("--config", er_config, "Session spec JSON")->required();
  er->add_option("--trace", er_trace, "Trace file")->required();
  er->add_option("--out", er_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return cmd_stats(stats_traces, stats_intervals, stats_out);
    if (pe->parsed()) {
      return cmd_predict_eval(pe_traces, pe_method, pe_scales, pe_quantiles, pe_rho_min,
                              pe_out, pe_errors_out);
    }
    if (fe->parsed()) {
      return cmd_fit_errors(fe_csv, fe_family, fe_side, fe_horizon, fe_all, fe_out);
    }
    if (sw->parsed()) return cmd_sweep(sw_spec, sw_traces, sw_out, sw_threads);
    if (fr->parsed()) return cmd_frontier(fr_results, fr_omega, fr_sigma, fr_out);
    if (cp->parsed()) return cmd_compare(cp_frontier, cp_a, cp_b, cp_omega, cp_out);
    if (er->parsed()) return cmd_example_run(er_config, er_trace, er_out);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
