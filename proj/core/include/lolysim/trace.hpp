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

#ifndef LOLYSIM_TRACE_HPP_
#define LOLYSIM_TRACE_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lolysim {

/// Error raised when a trace file cannot be parsed or violates the format
/// contract. The message carries the offending file and line number.
class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A measured downstream throughput trace. One sample per 1-second
/// interval, in bits per second. The trace defines a piecewise-constant
/// rate function: rate(t) = samples[floor(t)] for t in [0, duration).
struct ThroughputTrace {
  std::string id;
  std::vector<double> samples;  // bits/s, all >= 0

  double duration_s() const { return static_cast<double>(samples.size()); }

  /// Instantaneous rate at time t (bits/s). Requires 0 <= t < duration.
  double rate_at(double t) const;

  /// Bits deliverable over [t1, t2] under the piecewise-constant rate.
  double integrate_bits(double t1, double t2) const;

  /// Arithmetic mean rate over [t1, t2]; both bounds inside [0, duration].
  double mean_rate(double t1, double t2) const;
};

/// Summary statistics of a (possibly resampled) throughput series.
/// CV uses the population standard deviation. Autocorrelation fields are
/// absent when the respective series has zero variance; CV is absent when
/// the mean is zero.
struct TraceStats {
  double mean_bps = 0.0;
  std::optional<double> cv;
  std::optional<double> autocorr_lag1;
  std::optional<double> diff_autocorr_lag1;
  int sampling_interval_s = 1;
};

/// Minimum number of 1-second samples a trace must have to be usable.
inline constexpr std::size_t kMinTraceSamples = 60;

/// Parses a trace file: UTF-8 text, '#' comment lines, otherwise one
/// decimal number (bits/s) per line. Throws TraceFormatError on malformed
/// numbers, negative rates, or fewer than kMinTraceSamples data rows.
ThroughputTrace load_trace(const std::string& path);

/// Same as load_trace but reading from an in-memory buffer; `id` names the
/// trace in error messages and in the returned object.
ThroughputTrace parse_trace(const std::string& text, const std::string& id);

/// Averages consecutive non-overlapping windows of `interval_s` samples.
/// A trailing partial window is dropped. Throws std::invalid_argument when
/// no complete window fits.
std::vector<double> resample(const ThroughputTrace& trace, int interval_s);

/// Mean, CV, lag-1 autocorrelation and lag-1 autocorrelation of the first
/// difference for a resampled series. Requires series.size() >= 3.
TraceStats compute_stats(const std::vector<double>& series, int interval_s);

/// Keeps traces whose CV at 1 s sampling is >= threshold (boundary kept),
/// preserving input order. A non-positive threshold keeps everything.
std::vector<ThroughputTrace> filter_by_cv(const std::vector<ThroughputTrace>& traces,
                                          double threshold);

}  // namespace lolysim

#endif  // LOLYSIM_TRACE_HPP_
