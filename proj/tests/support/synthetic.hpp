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

// Seeded synthetic traces and catalogs shared by the unit and acceptance
// suites.

#ifndef LOLYSIM_TESTS_SUPPORT_SYNTHETIC_HPP_
#define LOLYSIM_TESTS_SUPPORT_SYNTHETIC_HPP_

#include <random>
#include <string>
#include <vector>

#include "lolysim/trace.hpp"

namespace lolysim::testing {

inline ThroughputTrace make_trace(std::vector<double> samples, std::string id = "test") {
  ThroughputTrace trace;
  trace.id = std::move(id);
  trace.samples = std::move(samples);
  return trace;
}

inline ThroughputTrace constant_trace(double rate_bps, std::size_t seconds,
                                      std::string id = "const") {
  return make_trace(std::vector<double>(seconds, rate_bps), std::move(id));
}

/// Alternating high/low phases with multiplicative lognormal noise - a
/// compact stand-in for fluctuating wireless downstream throughput.
/// start_low selects which phase the trace begins in.
inline ThroughputTrace bursty_trace(unsigned long long seed, std::size_t seconds = 340,
                                    double high_bps = 12e6, double low_bps = 4e6,
                                    std::size_t phase_s = 20, double noise_cv = 0.3,
                                    bool start_low = false) {
  std::mt19937_64 rng(seed);
  const double sigma2 = std::log(1.0 + noise_cv * noise_cv);
  std::lognormal_distribution<double> noise(-sigma2 / 2.0, std::sqrt(sigma2));
  std::vector<double> samples(seconds);
  for (std::size_t t = 0; t < seconds; ++t) {
    const bool high = ((t / phase_s) % 2 == 0) != start_low;
    samples[t] = (high ? high_bps : low_bps) * noise(rng);
  }
  return make_trace(std::move(samples), "bursty-" + std::to_string(seed));
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/lolysim-test-" + name;
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw std::runtime_error("cannot write " + path);
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
  return path;
}

}  // namespace lolysim::testing

#endif  // LOLYSIM_TESTS_SUPPORT_SYNTHETIC_HPP_
