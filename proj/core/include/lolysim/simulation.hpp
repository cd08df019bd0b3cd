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

#ifndef LOLYSIM_SIMULATION_HPP_
#define LOLYSIM_SIMULATION_HPP_

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lolysim/adaptation.hpp"
#include "lolysim/predictors.hpp"
#include "lolysim/trace.hpp"

namespace lolysim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Representation ladder and per-segment sizes. Representation rates are
/// strictly increasing; sizes are in bits and the per-representation mean
/// of s_ij / tau stays within 10% of the nominal rate.
struct MediaCatalog {
  double tau = 2.0;  // seconds of content per segment
  std::vector<double> representation_rates;       // bits/s, increasing in j
  std::vector<std::vector<double>> segment_sizes;  // [segment][repr], bits

  std::size_t n_segments() const { return segment_sizes.size(); }
  std::size_t n_representations() const { return representation_rates.size(); }
  double size_bits(long long segment, int repr) const;
  double mmbr_bps(long long segment, int repr) const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Live timeline constants. Segment i becomes available at (i+1)*tau and
/// must start playback at i*tau + delta_p.
struct Timeline {
  double delta_p = 5.0;  // upper bound on the live latency, seconds
};

double segment_availability(const MediaCatalog& catalog, long long segment);
double segment_deadline(const MediaCatalog& catalog, const Timeline& timeline,
                        long long segment);

/// One contiguous transfer: `bits` delivered over [t_start, t_end].
/// Aborted downloads enter with the bits actually delivered.
struct TransferRecord {
  double t_start = 0.0;
  double t_end = 0.0;
  double bits = 0.0;
};

/// Time-ordered, non-overlapping transfer records of one session
/// (downloads are sequential).
class ThroughputMeter {
 public:
  void add(const TransferRecord& record);
  std::span<const TransferRecord> records() const { return records_; }

 private:
  std::vector<TransferRecord> records_;
};

/// Mean application-layer throughput over [t1, t2]: delivered bits are
/// apportioned uniformly inside each record, idle time between records is
/// excluded. nullopt when no record overlaps the window.
std::optional<double> measure_throughput(std::span<const TransferRecord> records, double t1,
                                         double t2);
std::optional<double> measure_throughput(const ThroughputMeter& meter, double t1, double t2);

struct DownloadResult {
  double end_time = 0.0;        // completion time, or the deadline on abort
  double bits_delivered = 0.0;  // size_bits when completed
  bool completed = false;
};

/// Downloads `size_bits` starting at t_start over the trace's
/// piecewise-constant rate. The transfer is severed exactly at the
/// deadline when it cannot finish in time.
DownloadResult simulate_download(const ThroughputTrace& trace, double t_start,
                                 double size_bits, double deadline);

/// A finished segment: completion time and playback deadline, both
/// increasing over a session.
struct SegmentCompletion {
  double t_c = 0.0;
  double t_p = 0.0;
};

/// Playback buffer level at time t: max{t_p : t_c <= t} + tau - t.
/// nullopt before the first completed segment.
std::optional<double> buffer_level(std::span<const SegmentCompletion> completions, double tau,
                                   double t);

enum class Algorithm { kLolypop, kFestive, kLowest };
Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algorithm);

/// Virtual-time session configuration. The prediction/error pipeline
/// knobs (t_max, rho_min, min_samples, age window) are read from
/// `lolypop` for every algorithm so reports stay comparable.
struct SimConfig {
  Algorithm algorithm = Algorithm::kLolypop;
  LolypopConfig lolypop;
  FestiveConfig festive;
  PredictorSpec predictor;  // default SMA:1:ar
  double session_length_s = 300.0;
  std::optional<double> tune_in_offset_s;  // default: tau (earliest possible)
  unsigned long long seed = 1;  // for synthetic randomness; sessions themselves
                                // are deterministic and never draw from it
};

/// Outcome of one segment within a session. Never-requested segments
/// whose deadlines elapsed carry NaN request fields.
struct SegmentEvent {
  long long segment = 0;
  int repr = -1;  // -1 when the segment was never requested
  double t_r = std::numeric_limits<double>::quiet_NaN();
  double t_c = std::numeric_limits<double>::quiet_NaN();
  bool skipped = false;
  std::optional<double> buffer_at_deadline;
  double omega_at_request = std::numeric_limits<double>::quiet_NaN();
  double wasted_bits = 0.0;
};

struct BufferSample {
  long long t = 0;
  double level_s = 0.0;
};

/// QoE outcome of one simulated session.
struct SessionReport {
  std::string trace_id;
  std::string algorithm;
  double t_start = 0.0;
  double t_end = 0.0;
  long long first_segment = 0;
  long long n_accounted = 0;  // segments whose deadlines elapsed in-session
  long long n_played = 0;
  long long n_skipped = 0;
  long long n_transitions = 0;
  double sigma = 0.0;  // n_skipped / n_accounted
  double omega = 0.0;  // n_transitions / n_played
  std::optional<double> mean_repr;
  std::optional<double> mean_mmbr_bps;
  std::optional<double> startup_delay_s;
  double wasted_bits = 0.0;
  std::vector<SegmentEvent> events;
  std::vector<BufferSample> buffer_series;
};

/// Runs one deterministic virtual-time streaming session.
SessionReport run_session(const ThroughputTrace& trace, const MediaCatalog& catalog,
                          const Timeline& timeline, const SimConfig& config);

/// The evaluation ladder: 101, 194, 377, 730, 1415, 2743, 5319, 10314 and
/// 20000 kbps, in bits/s.
std::vector<double> default_representation_ladder();

/// Catalog with sizes s_ij = rate_j * tau * m_i, where m_i is 1 for
/// variation_cv == 0 and otherwise lognormal with unit mean and the given
/// coefficient of variation, shared across representations per segment.
MediaCatalog build_synthetic_catalog(const std::vector<double>& rates_bps,
                                     std::size_t n_segments, double tau, double variation_cv,
                                     unsigned long long seed);

/// Session spec as stored in JSON config files: simulation parameters
/// plus the catalog/timeline definition.
struct SessionSpec {
  SimConfig sim;
  MediaCatalog catalog;
  Timeline timeline;
};

/// Parses a session spec. The `catalog` object either lists
/// {tau, delta_p, rates_bps[], n_segments, variation_cv, seed} for a
/// synthetic catalog or {tau, delta_p, rates_bps[], segment_sizes_bits[][]}
/// with explicit sizes. Throws ConfigError with context on bad input.
SessionSpec parse_session_spec(const std::string& json_text);

/// Serializes a report (including the event log and buffer series) as a
/// deterministic JSON document.
std::string report_to_json(const SessionReport& report);

/// Flat event-log CSV: segment, repr, t_r, t_c, skipped, buffer_at_deadline.
std::string events_to_csv(const SessionReport& report);

}  // namespace lolysim

#endif  // LOLYSIM_SIMULATION_HPP_
