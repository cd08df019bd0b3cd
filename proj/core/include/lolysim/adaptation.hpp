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

#ifndef LOLYSIM_ADAPTATION_HPP_
#define LOLYSIM_ADAPTATION_HPP_

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "lolysim/error_model.hpp"

namespace lolysim {

/// LOLYPOP tuning knobs. sigma_star bounds the acceptable per-segment
/// deadline-miss probability, omega_star the fraction of segments played
/// in a different quality than their predecessor.
struct LolypopConfig {
  double sigma_star = 0.05;
  double omega_star = 0.1;
  int t_max = 10;                          // prediction horizon bound, seconds
  double rho_min_bps = kDefaultRhoMinBps;  // clamp for relative errors
  int min_samples = 3;                     // ECDF availability threshold
  std::optional<double> age_window_s;      // error-history age limit
};

/// Snapshot of everything the per-segment quality decision needs.
struct DecisionContext {
  double t_r = 0.0;  // request time
  double t_p = 0.0;  // playback deadline
  double omega_t = 0.0;  // fraction of quality transitions so far
  std::optional<int> j_prev;  // repr. of last successfully downloaded segment
  std::vector<double> p_success;  // per representation, or kNoEstimate
};

/// Picks the representation for the next segment: the highest one whose
/// estimated deadline-miss probability stays within sigma_star, demoted to
/// min(j', j_prev) while the transition budget omega_star is exhausted.
/// With no estimates at all the lowest representation is chosen.
/// Downward moves are never blocked.
int lolypop_select(const DecisionContext& ctx, const LolypopConfig& cfg);

/// Oldest segment whose playback deadline is at least tau ahead of `t` and
/// that is already available for download:
///   i0 = min{ i >= 0 : (i+1)*tau <= t  and  i*tau + delta_p >= t + tau }.
/// The first segment is always fetched in the lowest representation; the
/// same rule is re-applied after every skip. Returns nullopt when no
/// published segment qualifies at exactly `t` (the caller waits for the
/// next availability instant). Throws when delta_p < 2*tau, in which case
/// no time can ever satisfy both conditions.
std::optional<long long> tune_in(double t, double tau, double delta_p);

/// Reconstructed FESTIVE baseline configuration. alpha weighs efficiency
/// against stability, p is the bandwidth safety margin, k the minimum
/// number of segments between upward switches.
struct FestiveConfig {
  double alpha = 12.0;
  double p = 0.85;
  int k = 5;
  int bw_window = 20;             // harmonic-mean window, segments
  int stability_window = 10;      // switch-count window, segments
};

/// Per-session FESTIVE state: recent per-segment throughputs, the recent
/// switch pattern, and the delayed-update counter.
class FestiveState {
 public:
  /// Records a finished segment download made at representation `j` with
  /// measured per-segment throughput `rho_bps`.
  void on_download(int j, double rho_bps, const FestiveConfig& cfg);

  int current() const { return current_; }
  bool has_download() const { return !throughput_.empty(); }
  double bandwidth_estimate() const;  // harmonic mean; 0 with any zero sample
  int switches_in_window() const;
  long long segments_since_upswitch() const { return segments_since_upswitch_; }

 private:
  std::deque<double> throughput_;
  std::deque<bool> switch_flags_;
  int current_ = 0;
  bool any_download_ = false;
  long long segments_since_upswitch_ = 1LL << 40;  // gate open at start
};

/// One FESTIVE decision. Moves at most one representation step per call:
/// the delayed-update candidate (one step towards the highest rate within
/// p * estimate) is compared with the current level via
///   score(j) = 2^(switches in window) + [j != current]
///            + alpha * |rate_j / min(estimate, rate_candidate) - 1|
/// and ties keep the current level. Upward candidates additionally
/// require at least k segments since the previous upward switch.
int festive_select(const FestiveState& state, const std::vector<double>& representation_rates,
                   const FestiveConfig& cfg);

/// Baseline that always selects the lowest representation.
int lowest_select(std::size_t n_representations);

}  // namespace lolysim

#endif  // LOLYSIM_ADAPTATION_HPP_
