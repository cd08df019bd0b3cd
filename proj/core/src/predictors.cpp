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

#include "lolysim/predictors.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lolysim {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string PredictorSpec::to_string() const {
  switch (method) {
    case PredictorMethod::kSma: {
      const char* mt = mean_type == MeanType::kArithmetic  ? "ar"
                       : mean_type == MeanType::kGeometric ? "gm"
                                                           : "hm";
      return "SMA:" + std::to_string(n) + ":" + mt;
    }
    case PredictorMethod::kLinExt:
      return "LinExt:" + std::to_string(n);
    case PredictorMethod::kHoltWinters:
      return "HW:" + std::to_string(n) + ":mse";
  }
  return "?";
}

PredictorSpec parse_predictor_spec(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2) {
    throw std::invalid_argument("predictor spec '" + text + "': expected TYPE:n[:params]");
  }
  PredictorSpec spec;
  const std::string type = lower(parts[0]);
  try {
    spec.n = std::stoi(parts[1]);
  } catch (const std::exception&) {
    throw std::invalid_argument("predictor spec '" + text + "': bad count '" + parts[1] + "'");
  }
  if (type == "sma") {
    spec.method = PredictorMethod::kSma;
    if (spec.n < 1) throw std::invalid_argument("SMA needs n >= 1");
    std::string mt = parts.size() >= 3 ? lower(parts[2]) : "ar";
    if (mt == "ar") {
      spec.mean_type = MeanType::kArithmetic;
    } else if (mt == "gm") {
      spec.mean_type = MeanType::kGeometric;
    } else if (mt == "hm") {
      spec.mean_type = MeanType::kHarmonic;
    } else {
      throw std::invalid_argument("predictor spec '" + text + "': unknown mean type '" + mt + "'");
    }
  } else if (type == "linext") {
    spec.method = PredictorMethod::kLinExt;
    if (spec.n < 2) throw std::invalid_argument("LinExt needs n >= 2");
  } else if (type == "hw") {
    spec.method = PredictorMethod::kHoltWinters;
    if (spec.n < 3) throw std::invalid_argument("HW needs n >= 3");
    if (parts.size() >= 3 && lower(parts[2]) != "mse") {
      throw std::invalid_argument("predictor spec '" + text + "': unknown HW tuning '" +
                                  parts[2] + "'");
    }
  } else {
    throw std::invalid_argument("predictor spec '" + text + "': unknown method '" + parts[0] +
                                "'");
  }
  return spec;
}

std::optional<double> sma_predict(std::span<const double> history, MeanType mean_type) {
  if (history.empty()) throw std::invalid_argument("sma_predict: empty history");
  const auto n = static_cast<double>(history.size());
  switch (mean_type) {
    case MeanType::kArithmetic: {
      double sum = 0.0;
      for (double v : history) sum += v;
      return sum / n;
    }
    case MeanType::kGeometric: {
      double log_sum = 0.0;
      for (double v : history) {
        if (v <= 0.0) return std::nullopt;
        log_sum += std::log(v);
      }
      return std::exp(log_sum / n);
    }
    case MeanType::kHarmonic: {
      double inv_sum = 0.0;
      for (double v : history) {
        if (v <= 0.0) return std::nullopt;
        inv_sum += 1.0 / v;
      }
      return n / inv_sum;
    }
  }
  return std::nullopt;
}

double linext_predict(std::span<const double> history) {
  const std::size_t n = history.size();
  if (n < 2) throw std::invalid_argument("linext_predict: need at least 2 values");
  // Abscissae 1..n; closed-form least squares, evaluated at n+1.
  const double nd = static_cast<double>(n);
  const double x_mean = (nd + 1.0) / 2.0;
  double y_mean = 0.0;
  for (double v : history) y_mean += v;
  y_mean /= nd;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - x_mean;
    sxy += dx * (history[i] - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  return y_mean + slope * (nd + 1.0 - x_mean);
}

namespace {

struct HwRun {
  double a = 0.0;
  double b = 0.0;
  double sq_err_sum = 0.0;  // sum of (x_k - (a_{k-1}+b_{k-1}))^2, k = 3..n
};

HwRun hw_run(std::span<const double> x, double alpha, double beta) {
  HwRun r;
  r.a = x[1];
  r.b = x[1] - x[0];
  for (std::size_t k = 2; k < x.size(); ++k) {
    const double forecast = r.a + r.b;
    const double err = x[k] - forecast;
    r.sq_err_sum += err * err;
    const double a_prev = r.a;
    r.a = alpha * x[k] + (1.0 - alpha) * forecast;
    r.b = beta * (r.a - a_prev) + (1.0 - beta) * r.b;
  }
  return r;
}

}  // namespace

HoltWintersFit hw_fit(std::span<const double> history, const HoltWintersGrid& grid) {
  const std::size_t n = history.size();
  if (n < 3) throw std::invalid_argument("hw_predict: need at least 3 values");
  HoltWintersFit best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < grid.steps; ++ia) {
    const double alpha = grid.value(ia);
    for (int ib = 0; ib < grid.steps; ++ib) {
      const double beta = grid.value(ib);
      const HwRun run = hw_run(history, alpha, beta);
      const double mse = run.sq_err_sum / static_cast<double>(n - 2);
      if (mse < best_mse) {  // strict: ties keep the smaller (alpha, beta)
        best_mse = mse;
        best = {alpha, beta, mse, run.a + run.b};
      }
    }
  }
  return best;
}

double hw_predict(std::span<const double> history, const HoltWintersGrid& grid) {
  return hw_fit(history, grid).prediction;
}

std::vector<PredictionRecord> predict_all_scales(const MeterView& meter, long long t,
                                                 const PredictorSpec& spec, int t_max) {
  if (t < 1) throw std::invalid_argument("predict_all_scales: t must be >= 1");
  std::vector<PredictionRecord> records;
  records.reserve(static_cast<std::size_t>(t_max));
  std::vector<double> history(static_cast<std::size_t>(spec.n));
  for (int T = 1; T <= t_max; ++T) {
    PredictionRecord rec;
    rec.t = t;
    rec.horizon = T;
    bool ok = true;
    // Oldest window first: [t - nT, t - (n-1)T], ..., [t - T, t].
    for (int i = spec.n; i >= 1 && ok; --i) {
      const double t1 = static_cast<double>(t) - static_cast<double>(i) * T;
      const double t2 = t1 + T;
      const auto rho = meter(t1, t2);
      if (!rho) {
        ok = false;
      } else {
        history[static_cast<std::size_t>(spec.n - i)] = *rho;
      }
    }
    if (ok) {
      std::optional<double> rho_hat;
      switch (spec.method) {
        case PredictorMethod::kSma:
          rho_hat = sma_predict(history, spec.mean_type);
          break;
        case PredictorMethod::kLinExt:
          rho_hat = linext_predict(history);
          break;
        case PredictorMethod::kHoltWinters:
          rho_hat = hw_predict(history, spec.grid);
          break;
      }
      if (rho_hat) {
        rec.rho_hat = *rho_hat;
        rec.available = true;
      }
    }
    records.push_back(rec);
  }
  return records;
}

void PredictionLog::add(const std::vector<PredictionRecord>& records) {
  if (records.empty()) return;
  const long long t = records.front().t;
  if (slots_.empty()) first_t_ = t;
  const auto idx = static_cast<std::size_t>(t - first_t_);
  if (idx != slots_.size()) {
    throw std::logic_error("PredictionLog: records must be added one second at a time");
  }
  std::vector<double> row(static_cast<std::size_t>(t_max_),
                          std::numeric_limits<double>::quiet_NaN());
  for (const auto& rec : records) {
    if (rec.horizon < 1 || rec.horizon > t_max_) {
      throw std::out_of_range("PredictionLog: horizon outside [1, T_max]");
    }
    if (rec.available) row[static_cast<std::size_t>(rec.horizon - 1)] = rec.rho_hat;
  }
  slots_.push_back(std::move(row));
}

std::optional<double> PredictionLog::lookup(long long t, int horizon) const {
  if (horizon < 1 || horizon > t_max_) return std::nullopt;
  if (slots_.empty() || t < first_t_) return std::nullopt;
  const auto idx = static_cast<std::size_t>(t - first_t_);
  if (idx >= slots_.size()) return std::nullopt;
  const double v = slots_[idx][static_cast<std::size_t>(horizon - 1)];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace lolysim
