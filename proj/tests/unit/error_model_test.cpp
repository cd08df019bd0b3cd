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
#include <random>
#include <stdexcept>

#include <doctest.h>

using namespace lolysim;

TEST_CASE("rel_error follows the clamped formula") {
  CHECK(rel_error(5e6, 4e6, 10e3) == doctest::Approx(0.25));
  // Both sides clamp to rho_min.
  CHECK(rel_error(-1.0, 5e3, 10e3) == doctest::Approx(0.0));
  CHECK(rel_error(7e6, 7e6, 10e3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rel_error(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("signed_rel_error keeps the sign and matches rel_error in magnitude") {
  CHECK(signed_rel_error(2e6, 4e6) == doctest::Approx(-0.5));
  CHECK(signed_rel_error(6e6, 4e6) == doctest::Approx(0.5));
  CHECK(signed_rel_error(4e6, 8e6) == doctest::Approx(-0.5));
  CHECK(std::abs(signed_rel_error(4e6, 8e6)) == doctest::Approx(rel_error(4e6, 8e6)));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-1e6, 30e6);
  for (int i = 0; i < 500; ++i) {
    const double hat = value(rng);
    const double meas = value(rng);
    CHECK(std::abs(signed_rel_error(hat, meas)) == doctest::Approx(rel_error(hat, meas)));
    CHECK(signed_rel_error(hat, meas) > -1.0);
  }
}

TEST_CASE("ErrorHistory applies the age window to queries") {
  ErrorHistory history(10, 300.0, 1);
  history.record(0, 1, -0.5);
  history.record(400, 1, 0.25);
  CHECK(history.retained_count(1, 400.0) == 1);
  CHECK(*history.underestimation_frequency(1, 400.0) == doctest::Approx(0.0));

  ErrorHistory unlimited(10, std::nullopt, 1);
  unlimited.record(0, 1, -0.5);
  unlimited.record(400, 1, 0.25);
  CHECK(unlimited.retained_count(1, 400.0) == 2);

  // One entry: underestimation frequency matches its sign.
  ErrorHistory one(10, std::nullopt, 1);
  one.record(5, 2, -0.1);
  CHECK(*one.underestimation_frequency(2, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("signed_ecdf is the right-continuous ECDF of retained errors") {
  ErrorHistory history(10, std::nullopt, 3);
  for (const double v : {-0.2, -0.2, 0.25, 0.25}) history.record(10, 3, v);
  CHECK(*history.signed_ecdf(3, 10.0, 0.0) == doctest::Approx(0.5));
  CHECK(*history.signed_ecdf(3, 10.0, 0.25) == doctest::Approx(1.0));
  CHECK(*history.signed_ecdf(3, 10.0, -0.25) == doctest::Approx(0.0));
  CHECK(*history.signed_ecdf(3, 10.0, -0.1) == doctest::Approx(0.5));
}

TEST_CASE("signed_ecdf availability respects min_samples") {
  ErrorHistory one(10, std::nullopt, 1);
  one.record(0, 1, 0.3);
  CHECK(*one.signed_ecdf(1, 0.0, 0.3) == doctest::Approx(1.0));
  CHECK(*one.signed_ecdf(1, 0.0, 0.29) == doctest::Approx(0.0));

  ErrorHistory empty(10, std::nullopt, 1);
  CHECK_FALSE(empty.signed_ecdf(1, 0.0, 0.0).has_value());

  ErrorHistory three(10, std::nullopt, 3);
  three.record(0, 1, 0.1);
  three.record(1, 1, 0.2);
  CHECK_FALSE(three.signed_ecdf(1, 1.0, 0.0).has_value());
  three.record(2, 1, 0.3);
  CHECK(three.signed_ecdf(1, 2.0, 0.0).has_value());
}

TEST_CASE("signed_ecdf is monotone with values in [0,1]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> value(-0.9, 3.0);
  ErrorHistory history(4, std::nullopt, 1);
  for (int i = 0; i < 300; ++i) history.record(i, 2, value(rng));
  double prev = 0.0;
  for (double x = -1.0; x <= 3.2; x += 0.01) {
    const double phi = *history.signed_ecdf(2, 300.0, x);
    CHECK(phi >= prev);
    CHECK(phi >= 0.0);
    CHECK(phi <= 1.0);
    prev = phi;
  }
}

TEST_CASE("signed_ecdf decomposes into under/over components") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> value(-0.95, 4.0);
  std::uniform_real_distribution<double> query(-1.2, 4.2);
  ErrorHistory history(4, std::nullopt, 1);
  std::vector<double> entries;
  for (int i = 0; i < 400; ++i) {
    const double v = value(rng);
    entries.push_back(v);
    history.record(i, 1, v);
  }
  std::vector<double> under, over;
  for (const double v : entries) (v < 0.0 ? under : over).push_back(v);
  const double p_u = static_cast<double>(under.size()) / static_cast<double>(entries.size());
  CHECK(*history.underestimation_frequency(1, 400.0) == doctest::Approx(p_u));

  for (int i = 0; i < 200; ++i) {
    const double x = query(rng);
    const double direct = *history.signed_ecdf(1, 400.0, x);
    double expected;
    if (x < 0.0) {
      // P_u times the fraction of underestimation magnitudes >= |x|.
      const auto count = std::count_if(under.begin(), under.end(),
                                       [&](double v) { return std::abs(v) >= std::abs(x); });
      expected = under.empty() ? 0.0
                               : p_u * static_cast<double>(count) /
                                     static_cast<double>(under.size());
    } else {
      const auto count =
          std::count_if(over.begin(), over.end(), [&](double v) { return v <= x; });
      expected = p_u + (1.0 - p_u) * (over.empty()
                                          ? 0.0
                                          : static_cast<double>(count) /
                                                static_cast<double>(over.size()));
    }
    CHECK(direct == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("success_probability evaluates the ECDF at the normalized budget") {
  ErrorHistory history(10, std::nullopt, 3);
  for (const double v : {-0.2, -0.2, 0.25, 0.25}) history.record(10, 3, v);
  PredictionInterval interval{10, 3, 10e6};

  // x = rho_hat * budget / size - 1 = 30/24 - 1 = 0.25 -> ECDF 1.0.
  CHECK(success_probability(history, interval, 24e6, 10.0, 13.0) == doctest::Approx(1.0));
  // x = 30/40 - 1 = -0.25 -> ECDF 0.0.
  CHECK(success_probability(history, interval, 40e6, 10.0, 13.0) == doctest::Approx(0.0));

  ErrorHistory empty(10, std::nullopt, 3);
  CHECK(success_probability(empty, interval, 24e6, 10.0, 13.0) == kNoEstimate);
  CHECK_THROWS_AS(success_probability(history, interval, 0.0, 10.0, 13.0),
                  std::invalid_argument);
}

TEST_CASE("success_probability is non-increasing in the segment size") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> value(-0.8, 2.0);
  ErrorHistory history(10, std::nullopt, 3);
  for (int i = 0; i < 100; ++i) history.record(i, 2, value(rng));
  PredictionInterval interval{100, 2, 8e6};
  double prev = 1.0;
  for (double size = 1e6; size <= 40e6; size += 1e6) {
    const double p = success_probability(history, interval, size, 100.0, 101.5);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

namespace {

PredictionLog log_with(const std::vector<std::pair<long long, int>>& available, int t_max,
                       long long first_t, long long last_t) {
  PredictionLog log(t_max);
  for (long long t = first_t; t <= last_t; ++t) {
    std::vector<PredictionRecord> records;
    for (int T = 1; T <= t_max; ++T) {
      PredictionRecord rec;
      rec.t = t;
      rec.horizon = T;
      rec.available = std::find(available.begin(), available.end(),
                                std::make_pair(t, T)) != available.end();
      rec.rho_hat = rec.available ? 1e6 * static_cast<double>(T) : 0.0;
      records.push_back(rec);
    }
    log.add(records);
  }
  return log;
}

}  // namespace

TEST_CASE("select_prediction_interval picks the shortest covering interval") {
  // Everything available: smallest T* covering [10.4, 12] is (10, 2).
  std::vector<std::pair<long long, int>> all;
  for (long long t = 1; t <= 10; ++t) {
    for (int T = 1; T <= 10; ++T) all.emplace_back(t, T);
  }
  const auto log = log_with(all, 10, 1, 10);
  const auto interval = select_prediction_interval(log, 10.4, 12.0);
  REQUIRE(interval.has_value());
  CHECK(interval->t_pi == 10);
  CHECK(interval->horizon == 2);

  // Drop every record at t = 10: the best becomes (9, 3).
  std::vector<std::pair<long long, int>> missing_ten;
  for (const auto& [t, T] : all) {
    if (t != 10) missing_ten.emplace_back(t, T);
  }
  const auto fallback = select_prediction_interval(log_with(missing_ten, 10, 1, 10), 10.4,
                                                   12.0);
  REQUIRE(fallback.has_value());
  CHECK(fallback->t_pi == 9);
  CHECK(fallback->horizon == 3);

  // No records at all.
  const auto none = select_prediction_interval(log_with({}, 10, 1, 10), 10.4, 12.0);
  CHECK_FALSE(none.has_value());
}

TEST_CASE("alternation_probability counts sign-class flips") {
  const auto with_signs = [](const std::vector<double>& values) {
    ErrorHistory history(4, std::nullopt, 1);
    long long t = 0;
    for (const double v : values) history.record(t++, 1, v);
    return history;
  };
  CHECK(*with_signs({-0.1, 0.1, -0.1, 0.1}).alternation_probability(1, 10.0) ==
        doctest::Approx(1.0));
  CHECK(*with_signs({0.1, 0.2, 0.3}).alternation_probability(1, 10.0) ==
        doctest::Approx(0.0));
  CHECK(*with_signs({-0.1, 0.1, 0.2, -0.2}).alternation_probability(1, 10.0) ==
        doctest::Approx(2.0 / 3.0));
  // Zero errors count as overestimations.
  CHECK(*with_signs({-0.1, 0.0}).alternation_probability(1, 10.0) == doctest::Approx(1.0));
  CHECK_FALSE(with_signs({0.5}).alternation_probability(1, 10.0).has_value());
}

TEST_CASE("ErrorHistory validates inputs") {
  ErrorHistory history(4, std::nullopt, 3);
  CHECK_THROWS_AS(history.record(0, 0, 0.1), std::out_of_range);
  CHECK_THROWS_AS(history.record(0, 5, 0.1), std::out_of_range);
  CHECK_THROWS_AS(history.record(0, 1, -1.0), std::invalid_argument);
  history.record(5, 1, 0.1);
  CHECK_THROWS_AS(history.record(4, 1, 0.1), std::invalid_argument);
}
