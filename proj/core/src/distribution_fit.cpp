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

#include "lolysim/distribution_fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lolysim {

DistFamily parse_dist_family(const std::string& name) {
  if (name == "exponential" || name == "exp") return DistFamily::kExponential;
  if (name == "normal") return DistFamily::kNormal;
  if (name == "logistic") return DistFamily::kLogistic;
  if (name == "lomax") return DistFamily::kLomax;
  throw std::invalid_argument("unknown distribution family '" + name + "'");
}

std::string dist_family_name(DistFamily family) {
  switch (family) {
    case DistFamily::kExponential: return "exponential";
    case DistFamily::kNormal: return "normal";
    case DistFamily::kLogistic: return "logistic";
    case DistFamily::kLomax: return "lomax";
  }
  return "?";
}

TruncationWindow truncation_window(ErrorSide side) {
  return side == ErrorSide::kUnder ? TruncationWindow{0.1, 1.0} : TruncationWindow{0.1, 5.0};
}

double dist_cdf(DistFamily family, std::span<const double> params, double x) {
  switch (family) {
    case DistFamily::kExponential: {
      const double rate = params[0];
      if (x <= 0.0) return 0.0;
      return 1.0 - std::exp(-rate * x);
    }
    case DistFamily::kNormal: {
      const double mu = params[0];
      const double sigma = params[1];
      return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
    }
    case DistFamily::kLogistic: {
      const double mu = params[0];
      const double s = params[1];
      return 1.0 / (1.0 + std::exp(-(x - mu) / s));
    }
    case DistFamily::kLomax: {
      const double alpha = params[0];
      const double lambda = params[1];
      if (x <= 0.0) return 0.0;
      return 1.0 - std::pow(1.0 + x / lambda, -alpha);
    }
  }
  return 0.0;
}

double truncated_cdf(DistFamily family, std::span<const double> params,
                     const TruncationWindow& window, double x) {
  const double f_lo = dist_cdf(family, params, window.lo);
  const double f_hi = dist_cdf(family, params, window.hi);
  const double denom = f_hi - f_lo;
  if (denom <= 0.0) return x < window.lo ? 0.0 : 1.0;
  return (dist_cdf(family, params, x) - f_lo) / denom;
}

double fit_objective(DistFamily family, std::span<const double> params,
                     std::span<const double> sorted_window_samples,
                     const TruncationWindow& window) {
  const std::size_t m = sorted_window_samples.size();
  double sum = 0.0;
  std::size_t i = 0;
  while (i < m) {
    // Advance over ties so the ECDF value is the count of samples <= x.
    std::size_t j = i;
    while (j + 1 < m && sorted_window_samples[j + 1] == sorted_window_samples[i]) ++j;
    const double ecdf = static_cast<double>(j + 1) / static_cast<double>(m);
    const double model = truncated_cdf(family, params, window, sorted_window_samples[i]);
    const double d = model - ecdf;
    // Each tied sample point contributes one squared term.
    sum += d * d * static_cast<double>(j - i + 1);
    i = j + 1;
  }
  return sum;
}

namespace {

// Families with positivity constraints are searched in log space; the
// location parameter of normal/logistic stays linear.
std::vector<double> to_unconstrained(DistFamily family, const std::vector<double>& p) {
  switch (family) {
    case DistFamily::kExponential: return {std::log(p[0])};
    case DistFamily::kNormal:
    case DistFamily::kLogistic: return {p[0], std::log(p[1])};
    case DistFamily::kLomax: return {std::log(p[0]), std::log(p[1])};
  }
  return {};
}

std::vector<double> to_constrained(DistFamily family, const std::vector<double>& u) {
  switch (family) {
    case DistFamily::kExponential: return {std::exp(u[0])};
    case DistFamily::kNormal:
    case DistFamily::kLogistic: return {u[0], std::exp(u[1])};
    case DistFamily::kLomax: return {std::exp(u[0]), std::exp(u[1])};
  }
  return {};
}

// Moment-based starting parameters from the in-window samples.
std::vector<double> initial_params(DistFamily family, std::span<const double> samples) {
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(samples.size());
  const double sd = std::sqrt(var);
  switch (family) {
    case DistFamily::kExponential: return {1.0 / mean};
    case DistFamily::kNormal: return {mean, sd};
    case DistFamily::kLogistic: return {mean, sd * std::sqrt(3.0) / std::numbers::pi};
    case DistFamily::kLomax: {
      const double cv2 = var / (mean * mean);
      double alpha = cv2 > 1.0 ? 2.0 * cv2 / (cv2 - 1.0) : 3.0;
      alpha = std::clamp(alpha, 0.2, 50.0);
      const double lambda = std::max(mean * std::max(alpha - 1.0, 0.5), 1e-3);
      return {alpha, lambda};
    }
  }
  return {};
}

// Compact Nelder-Mead on 1-2 dimensions. Deterministic; good enough for
// these smooth low-dimensional objectives.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double step, int max_iter) {
  const std::size_t dim = start.size();
  struct Vertex {
    std::vector<double> x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.push_back({start, f(start)});
  for (std::size_t d = 0; d < dim; ++d) {
    auto x = start;
    x[d] += step;
    simplex.push_back({x, f(x)});
  }
  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };

  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (std::abs(simplex.back().fx - simplex.front().fx) < 1e-14) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < simplex.size() - 1; ++v) {
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto point_at = [&](double coeff) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = centroid[d] + coeff * (simplex.back().x[d] - centroid[d]);
      }
      return x;
    };

    const auto reflected = point_at(-1.0);
    const double f_r = f(reflected);
    if (f_r < simplex.front().fx) {
      const auto expanded = point_at(-2.0);
      const double f_e = f(expanded);
      simplex.back() = f_e < f_r ? Vertex{expanded, f_e} : Vertex{reflected, f_r};
      continue;
    }
    if (f_r < simplex[simplex.size() - 2].fx) {
      simplex.back() = {reflected, f_r};
      continue;
    }
    // Outside contraction when the reflection at least beat the worst
    // vertex, inside contraction otherwise.
    const bool outside = f_r < simplex.back().fx;
    const auto contracted = point_at(outside ? -0.5 : 0.5);
    const double f_c = f(contracted);
    if (f_c < std::min(f_r, simplex.back().fx)) {
      simplex.back() = {contracted, f_c};
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[v].x[d] = simplex.front().x[d] + 0.5 * (simplex[v].x[d] - simplex.front().x[d]);
      }
      simplex[v].fx = f(simplex[v].x);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex.front().x;
}

double ks_statistic(DistFamily family, std::span<const double> params,
                    std::span<const double> sorted_window_samples,
                    const TruncationWindow& window) {
  const std::size_t m = sorted_window_samples.size();
  double ks = 0.0;
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && sorted_window_samples[j + 1] == sorted_window_samples[i]) ++j;
    const double model = truncated_cdf(family, params, window, sorted_window_samples[i]);
    const double ecdf_hi = static_cast<double>(j + 1) / static_cast<double>(m);
    const double ecdf_lo = static_cast<double>(i) / static_cast<double>(m);
    ks = std::max({ks, std::abs(model - ecdf_hi), std::abs(model - ecdf_lo)});
    i = j + 1;
  }
  return ks;
}

}  // namespace

FitResult fit_truncated(std::span<const double> magnitudes, ErrorSide side,
                        DistFamily family) {
  const TruncationWindow window = truncation_window(side);
  std::vector<double> in_window;
  in_window.reserve(magnitudes.size());
  for (double v : magnitudes) {
    if (v >= window.lo && v <= window.hi) in_window.push_back(v);
  }
  FitResult result;
  if (in_window.size() < kMinFitSamples) {
    result.status = FitStatus::kInsufficientSamples;
    return result;
  }
  std::sort(in_window.begin(), in_window.end());
  if (in_window.front() == in_window.back()) {
    result.status = FitStatus::kDegenerate;
    return result;
  }

  const auto objective_u = [&](const std::vector<double>& u) {
    const auto p = to_constrained(family, u);
    return fit_objective(family, p, in_window, window);
  };

  auto u = to_unconstrained(family, initial_params(family, in_window));
  u = nelder_mead(objective_u, u, 0.5, 400);
  u = nelder_mead(objective_u, u, 0.1, 400);  // restart from the optimum

  auto params = to_constrained(family, u);
  result.status = FitStatus::kOk;
  result.dist.family = family;
  result.dist.params = params;
  result.dist.n_samples = in_window.size();
  result.dist.window = window;
  const double obj = fit_objective(family, params, in_window, window);
  result.dist.l2_distance = std::sqrt(obj / static_cast<double>(in_window.size()));
  result.dist.ks_statistic = ks_statistic(family, params, in_window, window);
  return result;
}

std::vector<double> sample_lomax(double alpha, double lambda, std::size_t n,
                                 unsigned long long seed) {
  if (alpha <= 0.0 || lambda <= 0.0) {
    throw std::invalid_argument("sample_lomax: parameters must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Uniform in (0, 1); inversion of 1 - (1 + x/lambda)^(-alpha).
    const double u =
        (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    out.push_back(lambda * (std::pow(1.0 - u, -1.0 / alpha) - 1.0));
  }
  return out;
}

}  // namespace lolysim
