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

#include "lolysim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "lolysim/text_format.hpp"

#include <json.hpp>

namespace lolysim {

using nlohmann::json;

std::vector<double> default_sigma_star_grid() {
  return {0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.1,  0.15, 0.2,  0.25, 0.3,
          0.35,  0.4,  0.45, 0.5,  0.55, 0.6,  0.65, 0.7,  0.75, 0.8,  0.85, 0.9,  0.95};
}

std::vector<double> default_omega_star_grid() {
  return {0.001, 0.005, 0.008, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06,
          0.07,  0.08,  0.09,  0.1,  0.15, 0.2,  0.3,  0.5};
}

std::vector<double> default_festive_alpha_grid() {
  return {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
}

std::vector<double> default_festive_p_grid() {
  return {0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
}

std::vector<int> default_festive_k_grid() {
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 40, 50};
}

std::vector<double> default_frontier_omega_thresholds() {
  return {0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
}

std::vector<double> default_frontier_sigma_grid() {
  return {0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1};
}

namespace {

std::string padded_index(std::size_t i) {
  std::string digits = std::to_string(i);
  return std::string(digits.size() >= 4 ? 0 : 4 - digits.size(), '0') + digits;
}

std::vector<SweepConfig> lolypop_configs(const std::vector<double>& sigma_grid,
                                         const std::vector<double>& omega_grid) {
  std::vector<SweepConfig> configs;
  std::size_t index = 0;
  for (double sigma_star : sigma_grid) {
    for (double omega_star : omega_grid) {
      SweepConfig cfg;
      cfg.id = "lolypop-" + padded_index(index++);
      cfg.algorithm = Algorithm::kLolypop;
      cfg.sigma_star = sigma_star;
      cfg.omega_star = omega_star;
      configs.push_back(std::move(cfg));
    }
  }
  return configs;
}

std::vector<SweepConfig> festive_configs(const std::vector<double>& alpha_grid,
                                         const std::vector<double>& p_grid,
                                         const std::vector<int>& k_grid) {
  std::vector<SweepConfig> configs;
  std::size_t index = 0;
  for (double alpha : alpha_grid) {
    for (double p : p_grid) {
      for (int k : k_grid) {
        SweepConfig cfg;
        cfg.id = "festive-" + padded_index(index++);
        cfg.algorithm = Algorithm::kFestive;
        cfg.alpha = alpha;
        cfg.p = p;
        cfg.k = k;
        configs.push_back(std::move(cfg));
      }
    }
  }
  return configs;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("sweep spec: ") + err.what());
  }
  if (!root.contains("sim")) throw ConfigError("sweep spec: missing 'sim' object");

  SweepSpec spec;
  const SessionSpec session = parse_session_spec(root["sim"].dump());
  spec.sim_template = session.sim;
  spec.catalog = session.catalog;
  spec.timeline = session.timeline;

  try {
    if (root.contains("lolypop")) {
      const json& grid = root["lolypop"];
      auto sigma = grid.contains("sigma_star")
                       ? grid["sigma_star"].get<std::vector<double>>()
                       : default_sigma_star_grid();
      auto omega = grid.contains("omega_star")
                       ? grid["omega_star"].get<std::vector<double>>()
                       : default_omega_star_grid();
      auto configs = lolypop_configs(sigma, omega);
      spec.configs.insert(spec.configs.end(), configs.begin(), configs.end());
    }
    if (root.contains("festive")) {
      const json& grid = root["festive"];
      auto alpha = grid.contains("alpha") ? grid["alpha"].get<std::vector<double>>()
                                          : default_festive_alpha_grid();
      auto p = grid.contains("p") ? grid["p"].get<std::vector<double>>()
                                  : default_festive_p_grid();
      auto k = grid.contains("k") ? grid["k"].get<std::vector<int>>()
                                  : default_festive_k_grid();
      auto configs = festive_configs(alpha, p, k);
      spec.configs.insert(spec.configs.end(), configs.begin(), configs.end());
    }
    if (root.value("lowest", false)) {
      SweepConfig cfg;
      cfg.id = "lowest-0000";
      cfg.algorithm = Algorithm::kLowest;
      spec.configs.push_back(std::move(cfg));
    }
  } catch (const json::exception& err) {
    throw ConfigError(std::string("sweep spec: ") + err.what());
  }
  if (spec.configs.empty()) {
    throw ConfigError("sweep spec: no algorithm grids given "
                      "(expected 'lolypop', 'festive' and/or 'lowest')");
  }
  return spec;
}

namespace {

SimConfig config_for(const SweepSpec& spec, const SweepConfig& cfg) {
  SimConfig sim = spec.sim_template;
  sim.algorithm = cfg.algorithm;
  if (cfg.sigma_star) sim.lolypop.sigma_star = *cfg.sigma_star;
  if (cfg.omega_star) sim.lolypop.omega_star = *cfg.omega_star;
  if (cfg.alpha) sim.festive.alpha = *cfg.alpha;
  if (cfg.p) sim.festive.p = *cfg.p;
  if (cfg.k) sim.festive.k = *cfg.k;
  return sim;
}

SweepRow row_skeleton(const SweepConfig& cfg, const std::string& trace_id) {
  SweepRow row;
  row.config_id = cfg.id;
  row.trace_id = trace_id;
  row.algorithm = algorithm_name(cfg.algorithm);
  row.sigma_star = cfg.sigma_star;
  row.omega_star = cfg.omega_star;
  row.alpha = cfg.alpha;
  row.p = cfg.p;
  row.k = cfg.k;
  return row;
}

void fill_row(SweepRow& row, const SessionReport& report) {
  row.status = "ok";
  row.sigma = report.sigma;
  row.omega = report.omega;
  row.mean_repr = report.mean_repr;
  row.mean_mmbr_bps = report.mean_mmbr_bps;
  row.startup_delay_s = report.startup_delay_s;
  row.wasted_bits = report.wasted_bits;
  row.n_accounted = report.n_accounted;
  row.n_played = report.n_played;
  row.n_skipped = report.n_skipped;
  row.n_transitions = report.n_transitions;
}

SweepRow mean_row(const SweepConfig& cfg, std::span<const SweepRow> trace_rows) {
  SweepRow row = row_skeleton(cfg, SweepRow::kMeanTraceId);
  double sigma = 0, omega = 0, repr = 0, mmbr = 0, wasted = 0;
  double startup = 0;
  long long n_startup = 0;
  long long ok_rows = 0;
  for (const auto& r : trace_rows) {
    if (!r.ok()) continue;
    ++ok_rows;
    sigma += r.sigma.value_or(0.0);
    omega += r.omega.value_or(0.0);
    // A session that played nothing contributes the lowest quality.
    repr += r.mean_repr.value_or(0.0);
    mmbr += r.mean_mmbr_bps.value_or(0.0);
    wasted += r.wasted_bits;
    if (r.startup_delay_s) {
      startup += *r.startup_delay_s;
      ++n_startup;
    }
    row.n_accounted += r.n_accounted;
    row.n_played += r.n_played;
    row.n_skipped += r.n_skipped;
    row.n_transitions += r.n_transitions;
  }
  if (ok_rows == 0) {
    row.status = "error: no successful runs";
    return row;
  }
  const auto n = static_cast<double>(ok_rows);
  row.sigma = sigma / n;
  row.omega = omega / n;
  row.mean_repr = repr / n;
  row.mean_mmbr_bps = mmbr / n;
  row.wasted_bits = wasted / n;
  if (n_startup > 0) row.startup_delay_s = startup / static_cast<double>(n_startup);
  return row;
}

}  // namespace

SweepTable run_sweep_loaded(const SweepSpec& spec, const std::vector<ThroughputTrace>& traces,
                            int n_threads) {
  const std::size_t n_configs = spec.configs.size();
  const std::size_t n_traces = traces.size();
  const std::size_t n_tasks = n_configs * n_traces;
  std::vector<SweepRow> per_task(n_tasks);

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) break;
      const SweepConfig& cfg = spec.configs[task / n_traces];
      const ThroughputTrace& trace = traces[task % n_traces];
      SweepRow row = row_skeleton(cfg, trace.id);
      try {
        const SimConfig sim = config_for(spec, cfg);
        const SessionReport report = run_session(trace, spec.catalog, spec.timeline, sim);
        fill_row(row, report);
      } catch (const std::exception& err) {
        row.status = std::string("error: ") + err.what();
      }
      per_task[task] = std::move(row);
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t pool =
      std::min<std::size_t>(n_threads > 0 ? static_cast<std::size_t>(n_threads) : hw,
                            std::max<std::size_t>(n_tasks, 1));
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  // Deterministic assembly: per config, trace rows sorted by id, then the
  // per-config mean over traces.
  SweepTable table;
  table.rows.reserve(n_tasks + n_configs);
  std::vector<std::size_t> trace_order(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) trace_order[i] = i;
  std::sort(trace_order.begin(), trace_order.end(), [&](std::size_t a, std::size_t b) {
    return traces[a].id < traces[b].id;
  });
  for (std::size_t c = 0; c < n_configs; ++c) {
    std::vector<SweepRow> trace_rows;
    trace_rows.reserve(n_traces);
    for (const std::size_t t : trace_order) {
      trace_rows.push_back(per_task[c * n_traces + t]);
    }
    SweepRow mean = mean_row(spec.configs[c], trace_rows);
    for (auto& row : trace_rows) table.rows.push_back(std::move(row));
    table.rows.push_back(std::move(mean));
  }
  return table;
}

SweepTable run_sweep(const SweepSpec& spec, const std::vector<std::string>& trace_paths,
                     int n_threads) {
  std::vector<ThroughputTrace> traces;
  std::vector<std::pair<std::string, std::string>> failures;  // (id, error)
  traces.reserve(trace_paths.size());
  for (const auto& path : trace_paths) {
    try {
      traces.push_back(load_trace(path));
    } catch (const std::exception& err) {
      // Same id convention as load_trace: file name without extension.
      std::string id = path;
      if (const auto slash = id.find_last_of("/\\"); slash != std::string::npos) {
        id = id.substr(slash + 1);
      }
      if (const auto dot = id.find_last_of('.'); dot != std::string::npos && dot > 0) {
        id = id.substr(0, dot);
      }
      failures.emplace_back(id, err.what());
    }
  }
  SweepTable table = run_sweep_loaded(spec, traces, n_threads);
  if (failures.empty()) return table;

  // Unloadable traces still get one flagged row per config, merged in
  // deterministic (config, trace) order.
  SweepTable merged;
  merged.rows.reserve(table.rows.size() + failures.size() * spec.configs.size());
  std::sort(failures.begin(), failures.end());
  std::size_t cursor = 0;
  for (const auto& cfg : spec.configs) {
    std::vector<SweepRow> rows;
    while (cursor < table.rows.size() && table.rows[cursor].config_id == cfg.id) {
      rows.push_back(std::move(table.rows[cursor++]));
    }
    // rows = sorted trace rows + mean row; inject failures, keep order.
    std::vector<SweepRow> combined;
    combined.reserve(rows.size() + failures.size());
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) combined.push_back(std::move(rows[i]));
    for (const auto& [id, what] : failures) {
      SweepRow row = row_skeleton(cfg, id);
      row.status = "error: " + what;
      combined.push_back(std::move(row));
    }
    std::sort(combined.begin(), combined.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.trace_id < b.trace_id; });
    combined.push_back(std::move(rows.back()));  // mean row stays last
    for (auto& row : combined) merged.rows.push_back(std::move(row));
  }
  return merged;
}

namespace {

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string opt_num(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

std::string sweep_to_csv(const SweepTable& table) {
  std::string out =
      "config_id,trace_id,algorithm,sigma_star,omega_star,alpha,p,k,status,sigma,omega,"
      "mean_repr,mean_mmbr_bps,startup_delay_s,wasted_bits,n_accounted,n_played,n_skipped,"
      "n_transitions\n";
  for (const auto& row : table.rows) {
    out += row.config_id;
    out += ',';
    out += csv_escape(row.trace_id);
    out += ',';
    out += row.algorithm;
    out += ',';
    out += opt_num(row.sigma_star);
    out += ',';
    out += opt_num(row.omega_star);
    out += ',';
    out += opt_num(row.alpha);
    out += ',';
    out += opt_num(row.p);
    out += ',';
    out += row.k ? format_number(*row.k) : std::string();
    out += ',';
    out += csv_escape(row.status);
    out += ',';
    out += opt_num(row.sigma);
    out += ',';
    out += opt_num(row.omega);
    out += ',';
    out += opt_num(row.mean_repr);
    out += ',';
    out += opt_num(row.mean_mmbr_bps);
    out += ',';
    out += opt_num(row.startup_delay_s);
    out += ',';
    out += format_number(row.wasted_bits);
    out += ',';
    out += format_number(row.n_accounted);
    out += ',';
    out += format_number(row.n_played);
    out += ',';
    out += format_number(row.n_skipped);
    out += ',';
    out += format_number(row.n_transitions);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

SweepTable parse_sweep_csv(const std::string& csv_text) {
  SweepTable table;
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep csv: empty file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 19) {
      throw ConfigError("sweep csv: expected 19 columns, got " + std::to_string(f.size()));
    }
    SweepRow row;
    row.config_id = f[0];
    row.trace_id = f[1];
    row.algorithm = f[2];
    row.sigma_star = parse_opt(f[3]);
    row.omega_star = parse_opt(f[4]);
    row.alpha = parse_opt(f[5]);
    row.p = parse_opt(f[6]);
    if (!f[7].empty()) row.k = std::stoi(f[7]);
    row.status = f[8];
    row.sigma = parse_opt(f[9]);
    row.omega = parse_opt(f[10]);
    row.mean_repr = parse_opt(f[11]);
    row.mean_mmbr_bps = parse_opt(f[12]);
    row.startup_delay_s = parse_opt(f[13]);
    row.wasted_bits = std::stod(f[14]);
    row.n_accounted = std::stoll(f[15]);
    row.n_played = std::stoll(f[16]);
    row.n_skipped = std::stoll(f[17]);
    row.n_transitions = std::stoll(f[18]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<OperatingPoint> operating_region(const SweepTable& table) {
  std::vector<OperatingPoint> points;
  for (const auto& row : table.rows) {
    if (!row.is_mean() || !row.ok()) continue;
    OperatingPoint pt;
    pt.sigma = row.sigma.value_or(0.0);
    pt.omega = row.omega.value_or(0.0);
    pt.mean_quality = row.mean_repr.value_or(0.0);
    pt.config_id = row.config_id;
    pt.trace_id = row.trace_id;
    points.push_back(std::move(pt));
  }
  return points;
}

std::string region_to_csv(std::span<const OperatingPoint> points) {
  std::string out = "config_id,sigma,omega,mean_quality\n";
  for (const auto& pt : points) {
    out += pt.config_id;
    out += ',';
    out += format_number(pt.sigma);
    out += ',';
    out += format_number(pt.omega);
    out += ',';
    out += format_number(pt.mean_quality);
    out += '\n';
  }
  return out;
}

namespace {

// Upper concave majorant of points sorted by x, evaluated back at the
// point abscissae (monotone-chain upper hull).
std::vector<double> upper_hull_values(const std::vector<CurvePoint>& pts) {
  std::vector<CurvePoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      // Drop b when it lies below segment a-p.
      const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  std::vector<double> values;
  values.reserve(pts.size());
  std::size_t seg = 0;
  for (const auto& p : pts) {
    while (seg + 1 < hull.size() && hull[seg + 1].x < p.x) ++seg;
    if (seg + 1 >= hull.size()) {
      values.push_back(hull.back().y);
      continue;
    }
    const auto& a = hull[seg];
    const auto& b = hull[seg + 1];
    if (b.x == a.x) {
      values.push_back(std::max(a.y, b.y));
      continue;
    }
    const double w = (p.x - a.x) / (b.x - a.x);
    values.push_back(a.y + w * (b.y - a.y));
  }
  return values;
}

}  // namespace

std::vector<FrontierCurve> quality_frontier(const SweepTable& table,
                                            std::span<const double> sigma_grid,
                                            std::span<const double> omega_thresholds) {
  // Candidate configurations: per-config means with successful runs.
  std::vector<const SweepRow*> means;
  std::set<std::string> algorithms;
  for (const auto& row : table.rows) {
    if (row.is_mean() && row.ok()) {
      means.push_back(&row);
      algorithms.insert(row.algorithm);
    }
  }

  std::vector<FrontierCurve> curves;
  for (const auto& algorithm : algorithms) {
    for (const double omega_thr : omega_thresholds) {
      FrontierCurve curve;
      curve.algorithm = algorithm;
      curve.omega_threshold = omega_thr;
      for (const double sigma : sigma_grid) {
        const SweepRow* best = nullptr;
        for (const SweepRow* row : means) {
          if (row->algorithm != algorithm) continue;
          if (row->sigma.value_or(0.0) > sigma) continue;
          if (row->omega.value_or(0.0) > omega_thr) continue;
          if (!best) {
            best = row;
            continue;
          }
          const double q = row->mean_repr.value_or(0.0);
          const double bq = best->mean_repr.value_or(0.0);
          if (q > bq) {
            best = row;
          } else if (q == bq) {
            const auto key = [](const SweepRow* r) {
              return std::make_tuple(r->sigma.value_or(0.0), r->omega.value_or(0.0),
                                     r->config_id);
            };
            if (key(row) < key(best)) best = row;
          }
        }
        if (!best) continue;  // no feasible configuration at this grid point
        FrontierPoint pt;
        pt.sigma = sigma;
        pt.quality_raw = best->mean_repr.value_or(0.0);
        pt.config_id = best->config_id;
        pt.achieved_sigma = best->sigma.value_or(0.0);
        pt.achieved_omega = best->omega.value_or(0.0);
        curve.points.push_back(std::move(pt));
      }
      std::vector<CurvePoint> raw;
      raw.reserve(curve.points.size());
      for (const auto& pt : curve.points) raw.push_back({pt.sigma, pt.quality_raw});
      const auto hull = upper_hull_values(raw);
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        curve.points[i].quality_hull = hull[i];
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

std::string frontier_to_csv(std::span<const FrontierCurve> curves) {
  std::string out =
      "algorithm,omega_threshold,sigma,quality_raw,quality_hull,config_id,achieved_sigma,"
      "achieved_omega\n";
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      out += curve.algorithm;
      out += ',';
      out += format_number(curve.omega_threshold);
      out += ',';
      out += format_number(pt.sigma);
      out += ',';
      out += format_number(pt.quality_raw);
      out += ',';
      out += format_number(pt.quality_hull);
      out += ',';
      out += pt.config_id;
      out += ',';
      out += format_number(pt.achieved_sigma);
      out += ',';
      out += format_number(pt.achieved_omega);
      out += '\n';
    }
  }
  return out;
}

std::vector<FrontierCurve> parse_frontier_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("frontier csv: empty file");
  std::map<std::pair<std::string, double>, FrontierCurve> curves;
  std::vector<std::pair<std::string, double>> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw ConfigError("frontier csv: expected 8 columns, got " + std::to_string(f.size()));
    }
    const std::pair<std::string, double> key{f[0], std::stod(f[1])};
    auto [it, inserted] = curves.try_emplace(key);
    if (inserted) {
      it->second.algorithm = f[0];
      it->second.omega_threshold = std::stod(f[1]);
      order.push_back(key);
    }
    FrontierPoint pt;
    pt.sigma = std::stod(f[2]);
    pt.quality_raw = std::stod(f[3]);
    pt.quality_hull = std::stod(f[4]);
    pt.config_id = f[5];
    pt.achieved_sigma = std::stod(f[6]);
    pt.achieved_omega = std::stod(f[7]);
    it->second.points.push_back(std::move(pt));
  }
  std::vector<FrontierCurve> out;
  out.reserve(order.size());
  for (const auto& key : order) out.push_back(std::move(curves[key]));
  return out;
}

std::string compare_outcome_name(CompareOutcome outcome) {
  switch (outcome) {
    case CompareOutcome::kAGreater: return "A-greater";
    case CompareOutcome::kBGreater: return "B-greater";
    case CompareOutcome::kEqual: return "equal";
    case CompareOutcome::kIncomparable: return "incomparable";
  }
  return "?";
}

namespace {

double interpolate(std::span<const CurvePoint> curve, double x) {
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (x >= curve[i].x && x <= curve[i + 1].x) {
      const double w = (x - curve[i].x) / (curve[i + 1].x - curve[i].x);
      return curve[i].y + w * (curve[i + 1].y - curve[i].y);
    }
  }
  if (!curve.empty()) {
    if (x <= curve.front().x) return curve.front().y;
    return curve.back().y;
  }
  return 0.0;
}

double trapezoid(std::span<const CurvePoint> curve, double lo, double hi) {
  std::vector<double> xs{lo, hi};
  for (const auto& p : curve) {
    if (p.x > lo && p.x < hi) xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double ya = interpolate(curve, xs[i]);
    const double yb = interpolate(curve, xs[i + 1]);
    integral += 0.5 * (ya + yb) * (xs[i + 1] - xs[i]);
  }
  return integral;
}

}  // namespace

IntegralComparison integral_compare(std::span<const CurvePoint> a,
                                    std::span<const CurvePoint> b) {
  IntegralComparison result;
  if (a.empty() || b.empty()) return result;
  const double lo = std::max(a.front().x, b.front().x);
  const double hi = std::min(a.back().x, b.back().x);
  if (!(lo < hi)) return result;  // empty or degenerate intersection
  result.range_lo = lo;
  result.range_hi = hi;
  result.integral_a = trapezoid(a, lo, hi);
  result.integral_b = trapezoid(b, lo, hi);
  const double tol = 1e-9;
  if (std::abs(result.integral_a - result.integral_b) <= tol) {
    result.outcome = CompareOutcome::kEqual;
  } else if (result.integral_a > result.integral_b) {
    result.outcome = CompareOutcome::kAGreater;
  } else {
    result.outcome = CompareOutcome::kBGreater;
  }
  return result;
}

ExampleRunBundle emit_example_run(const SessionReport& report, const ThroughputTrace& trace,
                                  const MediaCatalog& catalog, const Timeline& timeline) {
  ExampleRunBundle bundle;

  // Per-second trace rate with the MMBR of the segment playing at t.
  std::map<long long, const SegmentEvent*> by_segment;
  for (const auto& ev : report.events) by_segment[ev.segment] = &ev;
  bundle.throughput_csv = "t,trace_rate_bps,segment_mmbr_bps\n";
  for (auto t = static_cast<long long>(std::floor(report.t_start));
       t < static_cast<long long>(std::floor(report.t_end)); ++t) {
    bundle.throughput_csv += format_number(t);
    bundle.throughput_csv += ',';
    if (t >= 0 && static_cast<double>(t) < trace.duration_s()) {
      bundle.throughput_csv += format_number(trace.samples[static_cast<std::size_t>(t)]);
    }
    bundle.throughput_csv += ',';
    // Segment playing at t: playback of i covers [deadline(i), deadline(i)+tau).
    const auto playing = static_cast<long long>(
        std::floor((static_cast<double>(t) - timeline.delta_p) / catalog.tau));
    if (const auto it = by_segment.find(playing);
        it != by_segment.end() && !it->second->skipped) {
      bundle.throughput_csv += format_number(catalog.mmbr_bps(playing, it->second->repr));
    }
    bundle.throughput_csv += '\n';
  }

  bundle.selections_csv = "segment,repr,running_mean_repr\n";
  double repr_sum = 0.0;
  long long played = 0;
  for (const auto& ev : report.events) {
    bundle.selections_csv += format_number(ev.segment);
    bundle.selections_csv += ',';
    if (!ev.skipped) {
      repr_sum += ev.repr;
      ++played;
      bundle.selections_csv += format_number(ev.repr);
    }
    bundle.selections_csv += ',';
    if (played > 0) {
      bundle.selections_csv += format_number(repr_sum / static_cast<double>(played));
    }
    bundle.selections_csv += '\n';
  }

  bundle.buffer_csv = "segment,buffer_at_deadline_s\n";
  for (const auto& ev : report.events) {
    bundle.buffer_csv += format_number(ev.segment);
    bundle.buffer_csv += ',';
    // A skipped segment is plotted at zero.
    const double level = ev.skipped ? 0.0 : ev.buffer_at_deadline.value_or(0.0);
    bundle.buffer_csv += format_number(level);
    bundle.buffer_csv += '\n';
  }
  return bundle;
}

}  // namespace lolysim
