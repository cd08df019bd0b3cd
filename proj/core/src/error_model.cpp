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

#include "lolysim/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lolysim {

double rel_error(double rho_hat, double rho, double rho_min) {
  if (rho_min <= 0.0) throw std::invalid_argument("rel_error: rho_min must be > 0");
  const double hat = std::max(rho_hat, rho_min);
  const double meas = std::max(rho, rho_min);
  return std::abs(hat - meas) / meas;
}

double signed_rel_error(double rho_hat, double rho, double rho_min) {
  if (rho_min <= 0.0) throw std::invalid_argument("signed_rel_error: rho_min must be > 0");
  const double hat = std::max(rho_hat, rho_min);
  const double meas = std::max(rho, rho_min);
  return (hat - meas) / meas;
}

void ErrorHistory::record(long long t, int horizon, double value) {
  if (horizon < 1 || horizon > t_max()) {
    throw std::out_of_range("ErrorHistory: horizon outside [1, T_max]");
  }
  if (!(value > -1.0)) {
    throw std::invalid_argument("ErrorHistory: signed error must be > -1");
  }
  auto& entries = per_horizon_[static_cast<std::size_t>(horizon - 1)];
  if (!entries.empty() && entries.back().t > t) {
    throw std::invalid_argument("ErrorHistory: timestamps must be non-decreasing");
  }
  entries.push_back({t, horizon, value});
}

const std::vector<SignedRelError>& ErrorHistory::entries_for(int horizon) const {
  if (horizon < 1 || horizon > t_max()) {
    throw std::out_of_range("ErrorHistory: horizon outside [1, T_max]");
  }
  return per_horizon_[static_cast<std::size_t>(horizon - 1)];
}

std::size_t ErrorHistory::first_retained(const std::vector<SignedRelError>& entries,
                                         double now) const {
  if (!age_window_s_) return 0;
  const double cutoff = now - *age_window_s_;
  // Entries are time-ordered; find the first with t >= cutoff.
  const auto it = std::lower_bound(entries.begin(), entries.end(), cutoff,
                                   [](const SignedRelError& e, double c) {
                                     return static_cast<double>(e.t) < c;
                                   });
  return static_cast<std::size_t>(it - entries.begin());
}

std::size_t ErrorHistory::retained_count(int horizon, double now) const {
  const auto& entries = entries_for(horizon);
  return entries.size() - first_retained(entries, now);
}

std::optional<double> ErrorHistory::underestimation_frequency(int horizon, double now) const {
  const auto& entries = entries_for(horizon);
  const std::size_t begin = first_retained(entries, now);
  const std::size_t n = entries.size() - begin;
  if (n == 0) return std::nullopt;
  std::size_t under = 0;
  for (std::size_t i = begin; i < entries.size(); ++i) {
    if (entries[i].value < 0.0) ++under;
  }
  return static_cast<double>(under) / static_cast<double>(n);
}

std::optional<double> ErrorHistory::signed_ecdf(int horizon, double now, double x) const {
  const auto& entries = entries_for(horizon);
  const std::size_t begin = first_retained(entries, now);
  const std::size_t n = entries.size() - begin;
  if (n < static_cast<std::size_t>(min_samples_)) return std::nullopt;
  std::size_t below = 0;
  for (std::size_t i = begin; i < entries.size(); ++i) {
    if (entries[i].value <= x) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(n);
}

std::optional<double> ErrorHistory::alternation_probability(int horizon, double now) const {
  const auto& entries = entries_for(horizon);
  const std::size_t begin = first_retained(entries, now);
  const std::size_t n = entries.size() - begin;
  if (n < 2) return std::nullopt;
  std::size_t alternations = 0;
  for (std::size_t i = begin; i + 1 < entries.size(); ++i) {
    const bool under_a = entries[i].value < 0.0;
    const bool under_b = entries[i + 1].value < 0.0;
    if (under_a != under_b) ++alternations;
  }
  return static_cast<double>(alternations) / static_cast<double>(n - 1);
}

std::vector<double> ErrorHistory::retained_values(int horizon, double now) const {
  const auto& entries = entries_for(horizon);
  const std::size_t begin = first_retained(entries, now);
  std::vector<double> values;
  values.reserve(entries.size() - begin);
  for (std::size_t i = begin; i < entries.size(); ++i) values.push_back(entries[i].value);
  return values;
}

std::optional<PredictionInterval> select_prediction_interval(const PredictionLog& log,
                                                             double t_r, double t_p) {
  if (!(t_r < t_p)) throw std::invalid_argument("select_prediction_interval: need t_r < t_p");
  const auto t_r_floor = static_cast<long long>(std::floor(t_r));
  for (int horizon = 1; horizon <= log.t_max(); ++horizon) {
    // Need t_pi <= t_r and t_pi + T >= t_p; scan the most recent first.
    const auto low = static_cast<long long>(std::ceil(t_p)) - horizon;
    for (long long t_pi = t_r_floor; t_pi >= low; --t_pi) {
      if (static_cast<double>(t_pi) + horizon < t_p) break;
      if (const auto rho = log.lookup(t_pi, horizon)) {
        return PredictionInterval{t_pi, horizon, *rho};
      }
    }
  }
  return std::nullopt;
}

double success_probability(const ErrorHistory& history, const PredictionInterval& interval,
                           double size_bits, double t_r, double t_p) {
  if (size_bits <= 0.0) throw std::invalid_argument("success_probability: size must be > 0");
  if (!(t_r < t_p)) throw std::invalid_argument("success_probability: need t_r < t_p");
  const double x = interval.rho_hat * (t_p - t_r) / size_bits - 1.0;
  const auto phi = history.signed_ecdf(interval.horizon, t_r, x);
  if (!phi) return kNoEstimate;
  return *phi;
}

}  // namespace lolysim
