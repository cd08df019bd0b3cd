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

#include "lolysim/adaptation.hpp"

#include <cmath>
#include <stdexcept>

namespace lolysim {

int lolypop_select(const DecisionContext& ctx, const LolypopConfig& cfg) {
  if (ctx.p_success.empty()) {
    throw std::invalid_argument("lolypop_select: empty success-probability vector");
  }
  if (!(ctx.t_r < ctx.t_p) || ctx.t_p > ctx.t_r + static_cast<double>(cfg.t_max)) {
    throw std::logic_error("lolypop_select: deadline outside (t_r, t_r + T_max]");
  }

  bool any_estimate = false;
  for (double p : ctx.p_success) {
    if (p != kNoEstimate) {
      any_estimate = true;
      break;
    }
  }
  if (!any_estimate) return 0;

  // Highest representation whose miss probability stays within sigma_star.
  int j_feasible = 0;
  for (int j = static_cast<int>(ctx.p_success.size()) - 1; j >= 0; --j) {
    const double p = ctx.p_success[static_cast<std::size_t>(j)];
    if (p != kNoEstimate && 1.0 - p <= cfg.sigma_star) {
      j_feasible = j;
      break;
    }
  }

  if (ctx.omega_t <= cfg.omega_star) return j_feasible;
  const int j_prev = ctx.j_prev.value_or(0);
  return std::min(j_feasible, j_prev);
}

std::optional<long long> tune_in(double t, double tau, double delta_p) {
  if (tau <= 0.0) throw std::invalid_argument("tune_in: tau must be > 0");
  if (delta_p < 2.0 * tau) {
    throw std::invalid_argument("tune_in: delta_p < 2*tau, no segment can ever be both "
                                "available and at least tau ahead of its deadline");
  }
  if (t < tau) return std::nullopt;  // nothing published yet
  // Availability: (i+1)*tau <= t. Deadline margin: i*tau + delta_p >= t + tau.
  // Index arithmetic tolerates fp noise from times assembled as k*tau.
  constexpr double kIndexSlack = 1e-9;
  const auto newest = static_cast<long long>(std::floor(t / tau + kIndexSlack)) - 1;
  const double min_index = (t + tau - delta_p) / tau;
  const auto oldest =
      static_cast<long long>(std::ceil(std::max(min_index - kIndexSlack, 0.0)));
  if (oldest > newest) return std::nullopt;
  return oldest;
}

void FestiveState::on_download(int j, double rho_bps, const FestiveConfig& cfg) {
  throughput_.push_back(rho_bps);
  while (static_cast<int>(throughput_.size()) > cfg.bw_window) throughput_.pop_front();

  const bool switched = any_download_ && j != current_;
  switch_flags_.push_back(switched);
  while (static_cast<int>(switch_flags_.size()) > cfg.stability_window) {
    switch_flags_.pop_front();
  }

  if (any_download_ && j > current_) {
    segments_since_upswitch_ = 0;
  } else if (segments_since_upswitch_ < (1LL << 40)) {
    ++segments_since_upswitch_;
  }
  current_ = j;
  any_download_ = true;
}

double FestiveState::bandwidth_estimate() const {
  if (throughput_.empty()) return 0.0;
  double inv_sum = 0.0;
  for (double v : throughput_) {
    if (v <= 0.0) return 0.0;
    inv_sum += 1.0 / v;
  }
  return static_cast<double>(throughput_.size()) / inv_sum;
}

int FestiveState::switches_in_window() const {
  int count = 0;
  for (bool s : switch_flags_) count += s ? 1 : 0;
  return count;
}

int festive_select(const FestiveState& state, const std::vector<double>& representation_rates,
                   const FestiveConfig& cfg) {
  if (representation_rates.empty()) {
    throw std::invalid_argument("festive_select: empty representation set");
  }
  if (!state.has_download()) return 0;

  const int top = static_cast<int>(representation_rates.size()) - 1;
  const int j_cur = state.current();
  const double estimate = state.bandwidth_estimate();
  if (estimate <= 0.0) return std::max(j_cur - 1, 0);  // outage: step down
  const double target_rate = cfg.p * estimate;

  int j_target = 0;
  for (int j = top; j >= 0; --j) {
    if (representation_rates[static_cast<std::size_t>(j)] <= target_rate) {
      j_target = j;
      break;
    }
  }

  int candidate = j_cur;
  if (j_target > j_cur && state.segments_since_upswitch() >= cfg.k) {
    candidate = std::min(j_cur + 1, top);
  } else if (j_target < j_cur) {
    candidate = j_cur - 1;
  }
  if (candidate == j_cur) return j_cur;

  // Both scores share the stability base 2^n; the hypothetical switch adds
  // one. Efficiency is measured against min(estimate, candidate rate).
  const double base = std::ldexp(1.0, state.switches_in_window());
  const double denom =
      std::min(estimate, representation_rates[static_cast<std::size_t>(candidate)]);
  const auto score = [&](int j) {
    const double switch_penalty = j != j_cur ? 1.0 : 0.0;
    const double efficiency =
        std::abs(representation_rates[static_cast<std::size_t>(j)] / denom - 1.0);
    return base + switch_penalty + cfg.alpha * efficiency;
  };

  return score(candidate) < score(j_cur) ? candidate : j_cur;
}

int lowest_select(std::size_t n_representations) {
  if (n_representations == 0) {
    throw std::invalid_argument("lowest_select: empty representation set");
  }
  return 0;
}

}  // namespace lolysim
