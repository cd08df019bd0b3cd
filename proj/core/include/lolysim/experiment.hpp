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

#ifndef LOLYSIM_EXPERIMENT_HPP_
#define LOLYSIM_EXPERIMENT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lolysim/simulation.hpp"

namespace lolysim {

/// Default configuration grids explored in the evaluation: 26 x 17 = 442
/// LOLYPOP configurations and 16 x 12 x 15 = 2880 FESTIVE configurations.
std::vector<double> default_sigma_star_grid();
std::vector<double> default_omega_star_grid();
std::vector<double> default_festive_alpha_grid();
std::vector<double> default_festive_p_grid();
std::vector<int> default_festive_k_grid();

/// Omega thresholds the frontier curves are computed for by default.
std::vector<double> default_frontier_omega_thresholds();
/// Sigma grid the frontier curves are evaluated on by default.
std::vector<double> default_frontier_sigma_grid();

/// One algorithm configuration inside a sweep.
struct SweepConfig {
  std::string id;  // "<algorithm>-<grid index>", stable and sortable
  Algorithm algorithm = Algorithm::kLolypop;
  std::optional<double> sigma_star, omega_star;  // LOLYPOP
  std::optional<double> alpha, p;                // FESTIVE
  std::optional<int> k;                          // FESTIVE
};

/// Sweep definition: algorithm grids plus the shared session template
/// (catalog, timeline, predictor, session length, ...).
struct SweepSpec {
  SimConfig sim_template;
  MediaCatalog catalog;
  Timeline timeline;
  std::vector<SweepConfig> configs;
};

/// Parses a sweep spec JSON document: a "sim" object in the session-spec
/// schema plus optional "lolypop" {sigma_star[], omega_star[]},
/// "festive" {alpha[], p[], k[]} and "lowest" entries. Grids left empty
/// fall back to the defaults above.
SweepSpec parse_sweep_spec(const std::string& json_text);

/// One line of the sweep result table. trace_id is the trace name or
/// "mean-over-traces" for the per-config aggregate row.
struct SweepRow {
  std::string config_id;
  std::string trace_id;
  std::string algorithm;
  std::optional<double> sigma_star, omega_star, alpha, p;
  std::optional<int> k;
  std::string status = "ok";  // or "error: ..."
  std::optional<double> sigma, omega, mean_repr, mean_mmbr_bps, startup_delay_s;
  double wasted_bits = 0.0;
  long long n_accounted = 0, n_played = 0, n_skipped = 0, n_transitions = 0;

  bool ok() const { return status == "ok"; }
  bool is_mean() const { return trace_id == kMeanTraceId; }

  static constexpr const char* kMeanTraceId = "mean-over-traces";
};

struct SweepTable {
  std::vector<SweepRow> rows;  // per-trace rows then the mean row, per config
};

/// Runs every (config, trace) session, share-nothing in parallel, and
/// aggregates per-config means. Individual failures (unloadable trace,
/// invalid session) are recorded in their rows and never abort the sweep.
/// Output is byte-deterministic regardless of thread count.
SweepTable run_sweep(const SweepSpec& spec, const std::vector<std::string>& trace_paths,
                     int n_threads = 0);

/// As above with traces already in memory.
SweepTable run_sweep_loaded(const SweepSpec& spec,
                            const std::vector<ThroughputTrace>& traces, int n_threads = 0);

std::string sweep_to_csv(const SweepTable& table);
SweepTable parse_sweep_csv(const std::string& csv_text);

/// Achieved mean (sigma, omega) per configuration, for region scatter
/// plots. Quality is the mean representation index.
struct OperatingPoint {
  double sigma = 0.0;
  double omega = 0.0;
  double mean_quality = 0.0;
  std::string config_id;
  std::string trace_id;
};

std::vector<OperatingPoint> operating_region(const SweepTable& table);
std::string region_to_csv(std::span<const OperatingPoint> points);

/// One frontier sample: the best feasible configuration at a sigma grid
/// point, plus the concave-majorant value at that abscissa.
struct FrontierPoint {
  double sigma = 0.0;         // grid abscissa
  double quality_raw = 0.0;   // best feasible mean quality
  double quality_hull = 0.0;  // upper concave majorant at this abscissa
  std::string config_id;
  double achieved_sigma = 0.0;
  double achieved_omega = 0.0;
};

struct FrontierCurve {
  std::string algorithm;
  double omega_threshold = 0.0;
  std::vector<FrontierPoint> points;  // ascending sigma; infeasible grid points absent
};

/// For each algorithm in the table and each omega threshold: at every
/// sigma grid point pick the configuration maximizing mean quality
/// subject to mean sigma <= grid sigma and mean omega <= threshold (ties:
/// lower achieved sigma, then lower achieved omega, then config id), then
/// overlay the upper concave hull of the resulting curve.
std::vector<FrontierCurve> quality_frontier(const SweepTable& table,
                                            std::span<const double> sigma_grid,
                                            std::span<const double> omega_thresholds);

std::string frontier_to_csv(std::span<const FrontierCurve> curves);
std::vector<FrontierCurve> parse_frontier_csv(const std::string& csv_text);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

enum class CompareOutcome { kAGreater, kBGreater, kEqual, kIncomparable };
std::string compare_outcome_name(CompareOutcome outcome);

struct IntegralComparison {
  CompareOutcome outcome = CompareOutcome::kIncomparable;
  double integral_a = 0.0;
  double integral_b = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
};

/// Trapezoidal integrals over the common x-range of both curves
/// (interpolating at the range ends); equality within 1e-9. Curves with
/// empty intersection are incomparable.
IntegralComparison integral_compare(std::span<const CurvePoint> a,
                                    std::span<const CurvePoint> b);

/// Plot-ready series of one session: per-second trace rate with the MMBR
/// of the segment playing at that time, per-segment selections with the
/// running mean, and the buffer level at each deadline (0 for skips).
struct ExampleRunBundle {
  std::string throughput_csv;  // t, trace_rate_bps, segment_mmbr_bps
  std::string selections_csv;  // segment, repr, running_mean_repr
  std::string buffer_csv;      // segment, buffer_at_deadline_s
};

ExampleRunBundle emit_example_run(const SessionReport& report, const ThroughputTrace& trace,
                                  const MediaCatalog& catalog, const Timeline& timeline);

}  // namespace lolysim

#endif  // LOLYSIM_EXPERIMENT_HPP_
