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

#include "lolysim/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lolysim {

double ThroughputTrace::rate_at(double t) const {
  const auto idx = static_cast<std::size_t>(t);
  return samples.at(idx);
}

double ThroughputTrace::integrate_bits(double t1, double t2) const {
  if (t2 <= t1) return 0.0;
  double bits = 0.0;
  double t = t1;
  while (t < t2) {
    const auto cell = static_cast<std::size_t>(t);
    if (cell >= samples.size()) break;  // zero rate beyond the trace
    const double cell_end = std::min(static_cast<double>(cell + 1), t2);
    bits += samples[cell] * (cell_end - t);
    t = cell_end;
  }
  return bits;
}

double ThroughputTrace::mean_rate(double t1, double t2) const {
  return integrate_bits(t1, t2) / (t2 - t1);
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

ThroughputTrace parse_trace(const std::string& text, const std::string& id) {
  ThroughputTrace trace;
  trace.id = id;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || line.front() == '#') continue;
    char* end = nullptr;
    const double value = std::strtod(line.c_str(), &end);
    const bool fully_consumed =
        end != line.c_str() &&
        std::all_of(static_cast<const char*>(end), line.c_str() + line.size(),
                    [](unsigned char c) { return std::isspace(c); });
    if (!fully_consumed || !std::isfinite(value)) {
      throw TraceFormatError(id + ":" + std::to_string(line_no) +
                             ": malformed throughput value '" + line + "'");
    }
    if (value < 0.0) {
      throw TraceFormatError(id + ":" + std::to_string(line_no) +
                             ": negative throughput " + line);
    }
    trace.samples.push_back(value);
  }
  if (trace.samples.size() < kMinTraceSamples) {
    throw TraceFormatError(id + ": trace too short, " +
                           std::to_string(trace.samples.size()) + " samples (need >= " +
                           std::to_string(kMinTraceSamples) + ")");
  }
  return trace;
}

ThroughputTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceFormatError(path + ": cannot open trace file");
  std::ostringstream buf;
  buf << in.rdbuf();
  // Trace id = file name without directory and extension.
  std::string id = path;
  if (const auto slash = id.find_last_of("/\\"); slash != std::string::npos) {
    id = id.substr(slash + 1);
  }
  if (const auto dot = id.find_last_of('.'); dot != std::string::npos && dot > 0) {
    id = id.substr(0, dot);
  }
  return parse_trace(buf.str(), id);
}

std::vector<double> resample(const ThroughputTrace& trace, int interval_s) {
  if (interval_s < 1) throw std::invalid_argument("resample: interval must be >= 1");
  const std::size_t n = trace.samples.size();
  const auto window = static_cast<std::size_t>(interval_s);
  if (window > n) {
    throw std::invalid_argument("resample: interval " + std::to_string(interval_s) +
                                " s exceeds trace duration " + std::to_string(n) + " s");
  }
  std::vector<double> out;
  out.reserve(n / window);
  for (std::size_t k = 0; k + window <= n; k += window) {
    double sum = 0.0;
    for (std::size_t i = k; i < k + window; ++i) sum += trace.samples[i];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

namespace {

std::optional<double> lag1_autocorr(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = x[t] - mean;
    den += d * d;
    if (t + 1 < n) num += d * (x[t + 1] - mean);
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

TraceStats compute_stats(const std::vector<double>& series, int interval_s) {
  if (series.size() < 3) {
    throw std::invalid_argument("compute_stats: need at least 3 values");
  }
  TraceStats stats;
  stats.sampling_interval_s = interval_s;

  const auto n = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  stats.mean_bps = mean;

  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= n;  // population variance
  if (mean > 0.0) stats.cv = std::sqrt(var) / mean;

  stats.autocorr_lag1 = lag1_autocorr(series);

  std::vector<double> diff(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) diff[i] = series[i + 1] - series[i];
  if (diff.size() >= 2) stats.diff_autocorr_lag1 = lag1_autocorr(diff);

  return stats;
}

std::vector<ThroughputTrace> filter_by_cv(const std::vector<ThroughputTrace>& traces,
                                          double threshold) {
  std::vector<ThroughputTrace> kept;
  for (const auto& trace : traces) {
    if (threshold <= 0.0) {
      kept.push_back(trace);
      continue;
    }
    const TraceStats stats = compute_stats(trace.samples, 1);
    if (stats.cv && *stats.cv >= threshold) kept.push_back(trace);
  }
  return kept;
}

}  // namespace lolysim
