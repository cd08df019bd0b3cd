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

#ifndef LOLYSIM_DISTRIBUTION_FIT_HPP_
#define LOLYSIM_DISTRIBUTION_FIT_HPP_

#include <span>
#include <string>
#include <vector>

namespace lolysim {

enum class DistFamily { kExponential, kNormal, kLogistic, kLomax };
enum class ErrorSide { kUnder, kOver };

DistFamily parse_dist_family(const std::string& name);
std::string dist_family_name(DistFamily family);

/// Truncation window [a, b] the ECDF is restricted to before fitting:
/// [0.1, 1.0] for underestimation errors, [0.1, 5.0] for overestimations.
struct TruncationWindow {
  double lo = 0.1;
  double hi = 5.0;
};
TruncationWindow truncation_window(ErrorSide side);

/// A parametric distribution fitted to truncated error magnitudes.
/// Parameter layout by family:
///   exponential: {rate}
///   normal:      {mu, sigma}
///   logistic:    {mu, scale}
///   lomax:       {alpha, lambda}, CDF 1 - (1 + x/lambda)^(-alpha)
struct FittedDistribution {
  DistFamily family = DistFamily::kLomax;
  std::vector<double> params;
  double l2_distance = 0.0;   // RMS distance between truncated CDF and ECDF
  double ks_statistic = 0.0;  // sup distance over the truncated samples
  std::size_t n_samples = 0;  // samples inside the truncation window
  TruncationWindow window;
};

enum class FitStatus { kOk, kInsufficientSamples, kDegenerate };

struct FitResult {
  FitStatus status = FitStatus::kOk;
  FittedDistribution dist;  // meaningful only when status == kOk

  explicit operator bool() const { return status == FitStatus::kOk; }
};

/// Untruncated CDF of a family at `x` for the given parameters.
double dist_cdf(DistFamily family, std::span<const double> params, double x);

/// CDF renormalized to the window: (F(x) - F(a)) / (F(b) - F(a)).
double truncated_cdf(DistFamily family, std::span<const double> params,
                     const TruncationWindow& window, double x);

/// Minimum number of in-window samples required before fitting.
inline constexpr std::size_t kMinFitSamples = 30;

/// Fits `family` to the error magnitudes restricted to the side's
/// truncation window by minimizing the summed squared distance between the
/// truncated CDF and the truncated ECDF at the sample points. Degenerate
/// (zero-variance) windows and windows with fewer than kMinFitSamples
/// samples are reported through the status instead of a fit.
FitResult fit_truncated(std::span<const double> magnitudes, ErrorSide side,
                        DistFamily family);

/// Objective value (sum of squared CDF-ECDF distances) for explicit
/// parameters on the given in-window sorted samples; exposed for
/// grid-validation of the optimizer.
double fit_objective(DistFamily family, std::span<const double> params,
                     std::span<const double> sorted_window_samples,
                     const TruncationWindow& window);

/// Draws `n` Lomax(alpha, lambda) variates by inversion from a
/// deterministic uniform stream (seeded), for synthetic calibration data.
std::vector<double> sample_lomax(double alpha, double lambda, std::size_t n,
                                 unsigned long long seed);

}  // namespace lolysim

#endif  // LOLYSIM_DISTRIBUTION_FIT_HPP_
