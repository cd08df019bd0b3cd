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

#ifndef LOLYSIM_ERROR_MODEL_HPP_
#define LOLYSIM_ERROR_MODEL_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "lolysim/predictors.hpp"

namespace lolysim {

/// Floor applied to predicted and measured rates before forming relative
/// errors, so near-zero measurements do not distort the statistics.
inline constexpr double kDefaultRhoMinBps = 10e3;  // 10 kbps

/// |clamped prediction - clamped measurement| / clamped measurement.
double rel_error(double rho_hat, double rho, double rho_min = kDefaultRhoMinBps);

/// Same without the absolute value; negative values are underestimations.
/// Always > -1 thanks to the rho_min clamping.
double signed_rel_error(double rho_hat, double rho, double rho_min = kDefaultRhoMinBps);

/// One signed relative prediction error, observed at the end of the
/// window [t - horizon, t].
struct SignedRelError {
  long long t = 0;  // window end, integer seconds
  int horizon = 1;  // T, seconds
  double value = 0.0;
};

/// Sentinel handed to the adaptation layer when no success-probability
/// estimate is available for a segment.
inline constexpr double kNoEstimate = -1.0;

/// Per-horizon store of signed relative prediction errors. Entries older
/// than `age_window_s` (when set) are invisible to queries made at a given
/// current time; the ECDF additionally requires `min_samples` retained
/// entries before it reports anything.
class ErrorHistory {
 public:
  ErrorHistory(int t_max, std::optional<double> age_window_s = std::nullopt,
               int min_samples = 3)
      : age_window_s_(age_window_s), min_samples_(min_samples),
        per_horizon_(static_cast<std::size_t>(t_max)) {}

  /// Appends one error sample; `value` must be > -1 and `t` non-decreasing
  /// per horizon.
  void record(long long t, int horizon, double value);

  /// Number of entries visible at time `now` for this horizon.
  std::size_t retained_count(int horizon, double now) const;

  /// Fraction of retained entries that are underestimations (value < 0).
  /// Zero errors count as overestimations. nullopt when nothing retained.
  std::optional<double> underestimation_frequency(int horizon, double now) const;

  /// Right-continuous ECDF of retained signed errors, P[e <= x]. nullopt
  /// when fewer than min_samples entries are retained.
  std::optional<double> signed_ecdf(int horizon, double now, double x) const;

  /// Fraction of consecutive retained pairs whose sign classes differ
  /// (underestimation vs. overestimation, zero counting as over).
  /// nullopt with fewer than 2 retained entries.
  std::optional<double> alternation_probability(int horizon, double now) const;

  /// Retained signed error values, in recording order.
  std::vector<double> retained_values(int horizon, double now) const;

  int min_samples() const { return min_samples_; }
  std::optional<double> age_window_s() const { return age_window_s_; }
  int t_max() const { return static_cast<int>(per_horizon_.size()); }

 private:
  // First visible index at `now` (entries are time-ordered).
  std::size_t first_retained(const std::vector<SignedRelError>& entries, double now) const;
  const std::vector<SignedRelError>& entries_for(int horizon) const;

  std::optional<double> age_window_s_;
  int min_samples_;
  std::vector<std::vector<SignedRelError>> per_horizon_;
};

/// Smallest prediction interval [t_pi, t_pi + T*] covering [t_r, t_p].
struct PredictionInterval {
  long long t_pi = 0;
  int horizon = 1;       // T*
  double rho_hat = 0.0;  // prediction stored at (t_pi, T*)
};

/// Finds the shortest available prediction interval containing
/// [t_r, t_p]: minimal T*, and among equal T* the most recent t_pi.
/// Returns nullopt when no available record qualifies.
std::optional<PredictionInterval> select_prediction_interval(const PredictionLog& log,
                                                             double t_r, double t_p);

/// Estimated probability that `size_bits` arrive within [t_r, t_p] given
/// the prediction and the signed-error ECDF for its horizon - the ECDF
/// evaluated at rho_hat*(t_p - t_r)/size_bits - 1. Returns kNoEstimate
/// when the ECDF has too few samples.
double success_probability(const ErrorHistory& history, const PredictionInterval& interval,
                           double size_bits, double t_r, double t_p);

}  // namespace lolysim

#endif  // LOLYSIM_ERROR_MODEL_HPP_
