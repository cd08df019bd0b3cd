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

#ifndef LOLYSIM_PREDICTORS_HPP_
#define LOLYSIM_PREDICTORS_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lolysim {

enum class PredictorMethod { kSma, kLinExt, kHoltWinters };
enum class MeanType { kArithmetic, kGeometric, kHarmonic };

/// Grid of (alpha, beta) smoothing parameters searched when tuning
/// Holt-Winters per prediction. Values 0.0, 0.05, ..., 1.0 on both axes;
/// ties resolved towards the smallest alpha, then the smallest beta.
struct HoltWintersGrid {
  int steps = 21;  // inclusive endpoints, spacing 1/(steps-1)

  double value(int index) const {
    return static_cast<double>(index) / static_cast<double>(steps - 1);
  }
};

/// One-step-ahead predictor configuration, written "TYPE:n:params",
/// e.g. "SMA:1:ar", "SMA:3:hm", "LinExt:4", "HW:6:mse".
struct PredictorSpec {
  PredictorMethod method = PredictorMethod::kSma;
  int n = 1;  // number of past values consumed
  MeanType mean_type = MeanType::kArithmetic;  // SMA only
  HoltWintersGrid grid;                        // HW only

  std::string to_string() const;
};

/// Parses the "TYPE:n:params" abbreviation. Throws std::invalid_argument
/// on unknown method names, bad counts (SMA n>=1, LinExt n>=2, HW n>=3),
/// or unknown mean types.
PredictorSpec parse_predictor_spec(const std::string& text);

/// Mean of the last n measurements. Geometric and harmonic means are
/// undefined when any value is non-positive; nullopt marks that case.
std::optional<double> sma_predict(std::span<const double> history, MeanType mean_type);

/// Least-squares line through (1, x1)..(n, xn) evaluated at n+1. The
/// result may be negative; consumers clamp via rho_min.
double linext_predict(std::span<const double> history);

/// Double exponential smoothing with per-call (alpha, beta) tuning over
/// `grid` by minimizing the in-sample one-step MSE
///   1/(n-2) * sum_{k=3..n} (x_k - (a_{k-1}+b_{k-1}))^2
/// with a_2 = x_2, b_2 = x_2 - x_1. Requires history.size() >= 3.
double hw_predict(std::span<const double> history, const HoltWintersGrid& grid = {});

/// Chosen grid point alongside the prediction, for diagnostics.
struct HoltWintersFit {
  double alpha = 0.0;
  double beta = 0.0;
  double mse = 0.0;
  double prediction = 0.0;
};
HoltWintersFit hw_fit(std::span<const double> history, const HoltWintersGrid& grid = {});

/// One prediction, made at integer second `t` for the window [t, t+T].
/// Horizons run over the integers [1, T_max], T_max defaulting to 10.
struct PredictionRecord {
  long long t = 0;
  int horizon = 1;       // T, seconds
  double rho_hat = 0.0;  // bits/s, meaningful only when available
  bool available = false;
};

/// Measured mean throughput over [t1, t2], or nullopt when undefined
/// (e.g. no transfer activity inside the window).
using MeterView = std::function<std::optional<double>(double t1, double t2)>;

/// Computes the one-step-ahead prediction for every horizon T in
/// [1, t_max] at integer time t. For horizon T the predictor consumes the
/// n back-to-back window averages over [t-iT, t-(i-1)T], i = n..1; if any
/// of them is undefined (or the mean itself is undefined for the history),
/// the record for that horizon is marked unavailable.
std::vector<PredictionRecord> predict_all_scales(const MeterView& meter, long long t,
                                                 const PredictorSpec& spec, int t_max);

/// Dense per-second store of prediction records, queried by (t, T).
class PredictionLog {
 public:
  explicit PredictionLog(int t_max) : t_max_(t_max) {}

  void add(const std::vector<PredictionRecord>& records);

  /// rho_hat of the available record at (t, horizon), if any.
  std::optional<double> lookup(long long t, int horizon) const;

  int t_max() const { return t_max_; }
  bool empty() const { return slots_.empty(); }

 private:
  int t_max_;
  long long first_t_ = 0;
  // slot[t - first_t][T - 1]; NaN marks unavailable.
  std::vector<std::vector<double>> slots_;
};

}  // namespace lolysim

#endif  // LOLYSIM_PREDICTORS_HPP_
