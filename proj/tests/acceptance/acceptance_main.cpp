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

// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit
// code is the number of failed criteria. Expected values come from
// independent oracles implemented in this file, not from the library.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lolysim/adaptation.hpp"
#include "lolysim/distribution_fit.hpp"
#include "lolysim/error_model.hpp"
#include "lolysim/experiment.hpp"
#include "lolysim/predictors.hpp"
#include "lolysim/simulation.hpp"
#include "lolysim/trace.hpp"

#include "support/synthetic.hpp"

namespace {

using namespace lolysim;

struct CriterionResult {
  bool passed = true;
  std::string detail;

  void fail(const std::string& message) {
    passed = false;
    if (!detail.empty()) detail += "; ";
    if (detail.size() < 400) detail += message;
  }
  void expect(bool condition, const std::string& message) {
    if (!condition) fail(message);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// ---------------------------------------------------------------------
// 1. Predictor oracle equivalence.

double oracle_arithmetic(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double oracle_geometric(const std::vector<double>& x) {
  double p = 1.0;
  for (double v : x) p *= std::pow(v, 1.0 / static_cast<double>(x.size()));
  return p;
}

double oracle_harmonic(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += 1.0 / v;
  return static_cast<double>(x.size()) / s;
}

// Regression of x on abscissae 1..n via the raw normal equations.
double oracle_linext(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sum_i = 0.0, sum_ii = 0.0, sum_x = 0.0, sum_ix = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    sum_i += i;
    sum_ii += i * i;
    sum_x += x[k];
    sum_ix += i * x[k];
  }
  const double slope = (n * sum_ix - sum_i * sum_x) / (n * sum_ii - sum_i * sum_i);
  const double intercept = (sum_x - slope * sum_i) / n;
  return intercept + slope * (n + 1.0);
}

// Full grid replay, ties to the smallest (alpha, beta).
double oracle_hw(const std::vector<double>& x) {
  double best_mse = std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (int ia = 0; ia <= 20; ++ia) {
    for (int ib = 0; ib <= 20; ++ib) {
      const double alpha = static_cast<double>(ia) / 20.0;
      const double beta = static_cast<double>(ib) / 20.0;
      double a = x[1], b = x[1] - x[0], sq = 0.0;
      for (std::size_t k = 2; k < x.size(); ++k) {
        const double f = a + b;
        sq += (x[k] - f) * (x[k] - f);
        const double a_prev = a;
        a = alpha * x[k] + (1.0 - alpha) * f;
        b = beta * (a - a_prev) + (1.0 - beta) * b;
      }
      const double mse = sq / static_cast<double>(x.size() - 2);
      if (mse < best_mse) {
        best_mse = mse;
        best = a + b;
      }
    }
  }
  return best;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

CriterionResult criterion_predictor_oracles() {
  CriterionResult result;
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> len(3, 50);
  std::uniform_real_distribution<double> value(1e3, 25e6);
  for (int round = 0; round < 1000; ++round) {
    std::vector<double> x(len(rng));
    for (auto& v : x) v = value(rng);

    const double ar = *sma_predict(x, MeanType::kArithmetic);
    const double gm = *sma_predict(x, MeanType::kGeometric);
    const double hm = *sma_predict(x, MeanType::kHarmonic);
    result.expect(close_rel(ar, oracle_arithmetic(x), 1e-9), "SMA ar mismatch");
    result.expect(close_rel(gm, oracle_geometric(x), 1e-9), "SMA gm mismatch");
    result.expect(close_rel(hm, oracle_harmonic(x), 1e-9), "SMA hm mismatch");
    result.expect(close_rel(linext_predict(x), oracle_linext(x), 1e-9), "LinExt mismatch");
    if (hw_predict(x) != oracle_hw(x)) {
      result.fail("HW grid-replay mismatch at round " + std::to_string(round));
    }
    if (!result.passed) break;
  }
  return result;
}

// ---------------------------------------------------------------------
// 2. Error-model calibration against an enumerable error distribution.

CriterionResult criterion_error_model_calibration() {
  CriterionResult result;
  // Known 5-point distribution of the relative deviation e, where the
  // realized throughput is prediction * (1 + e).
  const std::vector<std::pair<double, double>> atoms{
      {-0.40, 0.15}, {-0.10, 0.25}, {0.00, 0.10}, {0.15, 0.30}, {0.50, 0.20}};
  const double rho_hat = 10e6;
  const int horizon = 3;

  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ErrorHistory history(10, std::nullopt, 3);
  const int n_samples = 2000;
  for (int i = 0; i < n_samples; ++i) {
    const double u = uniform(rng);
    double acc = 0.0;
    double e = atoms.back().first;
    for (const auto& [value, mass] : atoms) {
      acc += mass;
      if (u <= acc) {
        e = value;
        break;
      }
    }
    const double realized = rho_hat * (1.0 + e);
    history.record(i, horizon, signed_rel_error(rho_hat, realized));
  }

  const PredictionInterval interval{n_samples, horizon, rho_hat};
  const double t_r = static_cast<double>(n_samples);
  // Off-atom thresholds: sizes and budgets chosen so s/(rho_hat*budget)-1
  // never coincides with an atom of e.
  for (const double budget : {1.3, 2.1, 3.0}) {
    for (double size = 3.3e6; size <= 47e6; size += 2.3e6) {
      const double estimated =
          success_probability(history, interval, size, t_r, t_r + budget);
      // Oracle: P[e >= s / (rho_hat * budget) - 1].
      const double threshold = size / (rho_hat * budget) - 1.0;
      double truth = 0.0;
      for (const auto& [value, mass] : atoms) {
        if (value >= threshold) truth += mass;
      }
      if (std::abs(estimated - truth) > 0.05) {
        result.fail("size " + fmt(size) + " budget " + fmt(budget) + ": est " +
                    fmt(estimated) + " vs true " + fmt(truth));
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------
// 3. Lomax fit recovery.

CriterionResult criterion_lomax_recovery() {
  CriterionResult result;
  const double alpha = 1.5, lambda = 0.4;
  const auto samples = sample_lomax(alpha, lambda, 5000, 13);

  const auto lomax = fit_truncated(samples, ErrorSide::kOver, DistFamily::kLomax);
  if (lomax.status != FitStatus::kOk) {
    result.fail("lomax fit unavailable");
    return result;
  }
  result.expect(std::abs(lomax.dist.params[0] - alpha) <= 0.15 * alpha,
                "alpha " + fmt(lomax.dist.params[0]) + " off by more than 15%");
  result.expect(std::abs(lomax.dist.params[1] - lambda) <= 0.15 * lambda,
                "lambda " + fmt(lomax.dist.params[1]) + " off by more than 15%");

  for (const auto family :
       {DistFamily::kExponential, DistFamily::kNormal, DistFamily::kLogistic}) {
    const auto other = fit_truncated(samples, ErrorSide::kOver, family);
    if (other.status != FitStatus::kOk) {
      result.fail(dist_family_name(family) + " fit unavailable");
      continue;
    }
    result.expect(lomax.dist.l2_distance <= other.dist.l2_distance,
                  "lomax L2 " + fmt(lomax.dist.l2_distance) + " > " +
                      dist_family_name(family) + " L2 " + fmt(other.dist.l2_distance));
  }
  return result;
}

// ---------------------------------------------------------------------
// 4. LOLYPOP contract over the full configuration grids.

CriterionResult criterion_lolypop_contract() {
  CriterionResult result;
  const auto catalog =
      build_synthetic_catalog(default_representation_ladder(), 200, 2.0, 0.1, 42);
  const Timeline timeline{5.0};
  const double tau = catalog.tau;

  std::vector<ThroughputTrace> traces;
  for (unsigned long long seed = 1; seed <= 20; ++seed) {
    traces.push_back(testing::bursty_trace(seed, 340));
  }
  const auto sigma_grid = default_sigma_star_grid();
  const auto omega_grid = default_omega_star_grid();

  struct Task {
    double sigma_star, omega_star;
    const ThroughputTrace* trace;
  };
  std::vector<Task> tasks;
  for (const double sigma_star : sigma_grid) {
    for (const double omega_star : omega_grid) {
      for (const auto& trace : traces) tasks.push_back({sigma_star, omega_star, &trace});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<long long> violations{0};
  std::atomic<long long> startup_violations{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      SimConfig config;
      config.algorithm = Algorithm::kLolypop;
      config.lolypop.sigma_star = task.sigma_star;
      config.lolypop.omega_star = task.omega_star;
      config.session_length_s = 300.0;
      const auto report = run_session(*task.trace, catalog, timeline, config);

      std::optional<int> prev;
      for (const auto& ev : report.events) {
        if (ev.skipped) continue;
        if (prev && ev.repr > *prev &&
            !(ev.omega_at_request <= task.omega_star + 1e-12)) {
          ++violations;
        }
        prev = ev.repr;
      }
      if (!report.events.empty() && !report.events.front().skipped) {
        const double delay = report.startup_delay_s.value_or(-1.0);
        if (!(delay >= tau - 1e-9 && delay <= timeline.delta_p - tau + 1e-9)) {
          ++startup_violations;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_threads = std::max(2u, std::thread::hardware_concurrency());
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  result.expect(violations.load() == 0,
                std::to_string(violations.load()) + " upward transitions above omega*");
  result.expect(startup_violations.load() == 0,
                std::to_string(startup_violations.load()) + " startup delays out of bounds");
  result.detail = std::to_string(tasks.size()) + " sessions";
  return result;
}

// ---------------------------------------------------------------------
// 5. Constant-trace convergence.

CriterionResult criterion_constant_trace() {
  CriterionResult result;
  const auto trace = testing::constant_trace(10e6, 320);
  const auto catalog = build_synthetic_catalog({1e6, 2e6, 4e6, 8e6, 16e6}, 200, 2.0, 0.0, 1);
  SimConfig config;
  config.algorithm = Algorithm::kLolypop;
  config.lolypop.sigma_star = 0.05;
  config.lolypop.omega_star = 0.5;
  config.session_length_s = 300.0;

  const auto report = run_session(trace, catalog, Timeline{5.0}, config);
  result.expect(report.n_skipped == 0, "skips on a constant trace");
  for (const auto& ev : report.events) {
    if (ev.segment >= report.first_segment + 10) {
      if (ev.skipped || ev.repr != 3) {
        result.fail("segment " + std::to_string(ev.segment) + " not at the 8 Mbps rung");
        break;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------
// 6. Throughput meter vs millisecond-discretized oracle.

CriterionResult criterion_meter_oracle() {
  CriterionResult result;
  std::mt19937_64 rng(6006);
  std::uniform_int_distribution<long long> gap_ms(0, 2500);
  std::uniform_int_distribution<long long> dur_ms(1, 5000);
  std::uniform_real_distribution<double> bits(0.0, 50e6);
  for (int round = 0; round < 500; ++round) {
    std::vector<TransferRecord> records;
    long long t_ms = gap_ms(rng);
    const int n_records = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n_records; ++i) {
      const long long end_ms = t_ms + dur_ms(rng);
      records.push_back({static_cast<double>(t_ms) / 1000.0,
                         static_cast<double>(end_ms) / 1000.0, bits(rng)});
      t_ms = end_ms + gap_ms(rng);
    }
    std::uniform_int_distribution<long long> query_ms(0, t_ms + 1000);
    for (int q = 0; q < 4; ++q) {
      long long a = query_ms(rng);
      long long b = query_ms(rng);
      if (a == b) b = a + 1;
      if (a > b) std::swap(a, b);

      double oracle_bits = 0.0;
      long long active_ms = 0;
      for (long long ms = a; ms < b; ++ms) {
        for (const auto& rec : records) {
          const long long rs = std::llround(rec.t_start * 1000.0);
          const long long re = std::llround(rec.t_end * 1000.0);
          if (ms >= rs && ms < re) {
            oracle_bits += rec.bits / static_cast<double>(re - rs);
            ++active_ms;
          }
        }
      }
      const auto measured = measure_throughput(
          records, static_cast<double>(a) / 1000.0, static_cast<double>(b) / 1000.0);
      if (active_ms == 0) {
        result.expect(!measured.has_value(), "defined measurement over idle window");
        continue;
      }
      const double oracle = oracle_bits / (static_cast<double>(active_ms) / 1000.0);
      if (!measured) {
        result.fail("undefined measurement over active window");
      } else if (std::abs(*measured - oracle) > 1e-3 * std::max(1.0, oracle)) {
        result.fail("meter " + fmt(*measured) + " vs oracle " + fmt(oracle));
      }
    }
    if (!result.passed) break;
  }
  return result;
}

// ---------------------------------------------------------------------
// 7. FESTIVE baseline invariants.

CriterionResult criterion_festive_invariants() {
  CriterionResult result;
  const auto catalog =
      build_synthetic_catalog(default_representation_ladder(), 200, 2.0, 0.1, 7);
  const Timeline timeline{5.0};
  for (unsigned long long seed = 31; seed <= 40; ++seed) {
    const auto trace = testing::bursty_trace(seed, 340);
    for (const double p : {0.5, 0.7, 0.95}) {
      for (const int k : {1, 5, 20}) {
        SimConfig config;
        config.algorithm = Algorithm::kFestive;
        config.festive.p = p;
        config.festive.k = k;
        config.session_length_s = 300.0;
        const auto report = run_session(trace, catalog, timeline, config);

        // Selection sequence = representations of attempted segments.
        std::optional<int> prev;
        long long since_up = 1 << 20;
        for (const auto& ev : report.events) {
          if (ev.repr < 0) continue;  // never-requested gap segment
          if (prev) {
            if (std::abs(ev.repr - *prev) > 1) {
              result.fail("step of " + std::to_string(ev.repr - *prev) + " at segment " +
                          std::to_string(ev.segment));
            }
            if (ev.repr > *prev) {
              if (since_up < k) {
                result.fail("upward switch after " + std::to_string(since_up) +
                            " segments with k=" + std::to_string(k));
              }
              since_up = 0;
            } else {
              ++since_up;
            }
          }
          prev = ev.repr;
        }
        if (!result.passed) return result;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------
// 8. Qualitative direction: LOLYPOP frontier dominates FESTIVE's at a
//    low transition budget on a bursty synthetic family.

CriterionResult criterion_direction() {
  CriterionResult result;
  SweepSpec spec;
  spec.catalog = build_synthetic_catalog(default_representation_ladder(), 200, 2.0, 0.1, 9);
  spec.timeline = Timeline{5.0};
  spec.sim_template.session_length_s = 300.0;

  std::size_t index = 0;
  for (const double sigma_star : {0.01, 0.03, 0.05, 0.1, 0.2, 0.4}) {
    for (const double omega_star : {0.01, 0.03, 0.05, 0.1}) {
      SweepConfig cfg;
      cfg.id = "lolypop-" + std::to_string(1000 + index++);
      cfg.algorithm = Algorithm::kLolypop;
      cfg.sigma_star = sigma_star;
      cfg.omega_star = omega_star;
      spec.configs.push_back(cfg);
    }
  }
  index = 0;
  for (const double alpha : {8.0, 12.0, 16.0}) {
    for (const double p : {0.4, 0.6, 0.8, 0.95}) {
      for (const int k : {1, 5, 10, 20, 50}) {
        SweepConfig cfg;
        cfg.id = "festive-" + std::to_string(1000 + index++);
        cfg.algorithm = Algorithm::kFestive;
        cfg.alpha = alpha;
        cfg.p = p;
        cfg.k = k;
        spec.configs.push_back(cfg);
      }
    }
  }

  // Heterogeneous family: per-seed high/low levels, phase lengths and
  // noise, each trace starting in its low phase.
  std::vector<ThroughputTrace> traces;
  for (int i = 0; i < 10; ++i) {
    const auto seed = 500ULL + static_cast<unsigned long long>(i);
    std::mt19937_64 params(seed);
    std::uniform_real_distribution<double> hi_dist(8e6, 16e6);
    std::uniform_real_distribution<double> ratio(0.25, 0.55);
    std::uniform_int_distribution<std::size_t> phase(20, 45);
    std::uniform_real_distribution<double> cv(0.15, 0.3);
    const double hi = hi_dist(params);
    const double lo = hi * ratio(params);
    traces.push_back(
        testing::bursty_trace(seed, 340, hi, lo, phase(params), cv(params), true));
  }

  const auto table = run_sweep_loaded(spec, traces, 0);
  const auto sigma_grid = default_frontier_sigma_grid();
  const std::vector<double> omega_thresholds{0.05};
  const auto curves = quality_frontier(table, sigma_grid, omega_thresholds);

  const FrontierCurve* lolypop = nullptr;
  const FrontierCurve* festive = nullptr;
  for (const auto& curve : curves) {
    if (curve.algorithm == "lolypop") lolypop = &curve;
    if (curve.algorithm == "festive") festive = &curve;
  }
  if (lolypop == nullptr || lolypop->points.empty()) {
    result.fail("no feasible LOLYPOP frontier at omega 0.05");
    return result;
  }
  if (festive == nullptr || festive->points.empty()) {
    result.fail("no feasible FESTIVE frontier at omega 0.05");
    return result;
  }
  std::vector<CurvePoint> a, b;
  for (const auto& pt : lolypop->points) a.push_back({pt.sigma, pt.quality_hull});
  for (const auto& pt : festive->points) b.push_back({pt.sigma, pt.quality_hull});
  const auto cmp = integral_compare(a, b);
  result.expect(cmp.outcome == CompareOutcome::kAGreater,
                "expected LOLYPOP frontier integral above FESTIVE's, got " +
                    compare_outcome_name(cmp.outcome) + " (" + fmt(cmp.integral_a) + " vs " +
                    fmt(cmp.integral_b) + ")");
  result.detail = "integrals " + fmt(cmp.integral_a) + " vs " + fmt(cmp.integral_b);
  return result;
}

// ---------------------------------------------------------------------
// 9. Sweep determinism.

CriterionResult criterion_determinism() {
  CriterionResult result;
  SweepSpec spec;
  spec.catalog = build_synthetic_catalog({1e6, 2e6, 4e6, 8e6}, 120, 2.0, 0.1, 5);
  spec.timeline = Timeline{5.0};
  spec.sim_template.session_length_s = 120.0;
  std::size_t index = 0;
  for (const double sigma_star : {0.05, 0.2}) {
    for (const double omega_star : {0.05, 0.3}) {
      SweepConfig cfg;
      cfg.id = "lolypop-" + std::to_string(index++);
      cfg.algorithm = Algorithm::kLolypop;
      cfg.sigma_star = sigma_star;
      cfg.omega_star = omega_star;
      spec.configs.push_back(cfg);
    }
  }
  std::vector<ThroughputTrace> traces;
  for (unsigned long long seed = 71; seed <= 74; ++seed) {
    traces.push_back(testing::bursty_trace(seed, 200));
  }

  const auto write_outputs = [&](int n_threads, const std::string& tag) {
    const auto table = run_sweep_loaded(spec, traces, n_threads);
    const auto results_path = testing::write_temp_file("det-results-" + tag + ".csv",
                                                       sweep_to_csv(table));
    const auto region = operating_region(table);
    const auto region_path =
        testing::write_temp_file("det-region-" + tag + ".csv", region_to_csv(region));
    const auto curves = quality_frontier(table, default_frontier_sigma_grid(),
                                         default_frontier_omega_thresholds());
    const auto frontier_path =
        testing::write_temp_file("det-frontier-" + tag + ".csv", frontier_to_csv(curves));
    std::vector<std::string> contents;
    for (const auto& path : {results_path, region_path, frontier_path}) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      contents.push_back(buf.str());
    }
    return contents;
  };

  const auto first = write_outputs(1, "a");
  const auto second = write_outputs(2, "b");
  const auto third = write_outputs(2, "c");
  result.expect(first == second, "thread count changed output bytes");
  result.expect(second == third, "re-run changed output bytes");
  return result;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<CriterionResult()> run;
  };
  const std::vector<Entry> criteria{
      {1, "predictor oracle equivalence", criterion_predictor_oracles},
      {2, "error-model calibration", criterion_error_model_calibration},
      {3, "Lomax fit recovery", criterion_lomax_recovery},
      {4, "LOLYPOP contract over the configuration grids", criterion_lolypop_contract},
      {5, "constant-trace convergence", criterion_constant_trace},
      {6, "throughput meter vs discretized oracle", criterion_meter_oracle},
      {7, "FESTIVE one-step and k-gate invariants", criterion_festive_invariants},
      {8, "LOLYPOP frontier dominates FESTIVE at omega 0.05", criterion_direction},
      {9, "sweep determinism", criterion_determinism},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = entry.run();
    } catch (const std::exception& err) {
      result.passed = false;
      result.detail = std::string("exception: ") + err.what();
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    std::printf("%s [%d] %s (%lld ms)%s%s\n", result.passed ? "PASS" : "FAIL", entry.id,
                entry.name, static_cast<long long>(elapsed),
                result.detail.empty() ? "" : " - ", result.detail.c_str());
    std::fflush(stdout);
    if (!result.passed) ++failures;
  }
  return failures;
}
