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

#include "lolysim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "lolysim/text_format.hpp"

#include <json.hpp>

namespace lolysim {

using nlohmann::json;

double MediaCatalog::size_bits(long long segment, int repr) const {
  return segment_sizes.at(static_cast<std::size_t>(segment)).at(static_cast<std::size_t>(repr));
}

double MediaCatalog::mmbr_bps(long long segment, int repr) const {
  return size_bits(segment, repr) / tau;
}

void MediaCatalog::validate() const {
  if (tau <= 0.0) throw ConfigError("catalog: tau must be > 0");
  if (representation_rates.empty()) throw ConfigError("catalog: no representations");
  for (std::size_t j = 1; j < representation_rates.size(); ++j) {
    if (representation_rates[j] <= representation_rates[j - 1]) {
      throw ConfigError("catalog: representation rates must be strictly increasing");
    }
  }
  if (segment_sizes.empty()) throw ConfigError("catalog: no segments");
  std::vector<double> mmbr_sum(representation_rates.size(), 0.0);
  for (const auto& row : segment_sizes) {
    if (row.size() != representation_rates.size()) {
      throw ConfigError("catalog: segment size row width != representation count");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] <= 0.0) throw ConfigError("catalog: segment sizes must be > 0");
      mmbr_sum[j] += row[j] / tau;
    }
  }
  for (std::size_t j = 0; j < representation_rates.size(); ++j) {
    const double mean_mmbr = mmbr_sum[j] / static_cast<double>(segment_sizes.size());
    if (std::abs(mean_mmbr - representation_rates[j]) > 0.10 * representation_rates[j]) {
      throw ConfigError("catalog: mean MMBR of representation " + std::to_string(j) +
                        " deviates more than 10% from its nominal rate");
    }
  }
}

double segment_availability(const MediaCatalog& catalog, long long segment) {
  return static_cast<double>(segment + 1) * catalog.tau;
}

double segment_deadline(const MediaCatalog& catalog, const Timeline& timeline,
                        long long segment) {
  return static_cast<double>(segment) * catalog.tau + timeline.delta_p;
}

void ThroughputMeter::add(const TransferRecord& record) {
  if (!(record.t_end > record.t_start)) {
    throw std::invalid_argument("ThroughputMeter: record must have positive duration");
  }
  if (record.bits < 0.0) throw std::invalid_argument("ThroughputMeter: negative bits");
  if (!records_.empty() && record.t_start < records_.back().t_end) {
    throw std::invalid_argument("ThroughputMeter: records must not overlap");
  }
  records_.push_back(record);
}

namespace {

void accumulate_overlap(const TransferRecord& rec, double t1, double t2, double& bits,
                        double& active_time) {
  const double lo = std::max(rec.t_start, t1);
  const double hi = std::min(rec.t_end, t2);
  if (hi <= lo) return;
  const double overlap = hi - lo;
  bits += rec.bits * (overlap / (rec.t_end - rec.t_start));
  active_time += overlap;
}

}  // namespace

std::optional<double> measure_throughput(std::span<const TransferRecord> records, double t1,
                                         double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("measure_throughput: need t1 < t2");
  double bits = 0.0;
  double active = 0.0;
  for (const auto& rec : records) accumulate_overlap(rec, t1, t2, bits, active);
  if (active <= 0.0) return std::nullopt;
  return bits / active;
}

std::optional<double> measure_throughput(const ThroughputMeter& meter, double t1, double t2) {
  return measure_throughput(meter.records(), t1, t2);
}

DownloadResult simulate_download(const ThroughputTrace& trace, double t_start,
                                 double size_bits, double deadline) {
  if (!(t_start < deadline)) {
    throw std::invalid_argument("simulate_download: need t_start < deadline");
  }
  if (deadline > trace.duration_s()) {
    throw std::invalid_argument("simulate_download: deadline beyond trace end");
  }
  if (size_bits <= 0.0) throw std::invalid_argument("simulate_download: size must be > 0");

  double remaining = size_bits;
  double t = t_start;
  while (t < deadline) {
    const auto cell = static_cast<std::size_t>(t);
    const double cell_end = std::min(static_cast<double>(cell + 1), deadline);
    const double rate = trace.samples[cell];
    const double cell_bits = rate * (cell_end - t);
    if (rate > 0.0 && cell_bits >= remaining) {
      return {t + remaining / rate, size_bits, true};
    }
    remaining -= cell_bits;
    t = cell_end;
  }
  return {deadline, size_bits - remaining, false};
}

std::optional<double> buffer_level(std::span<const SegmentCompletion> completions, double tau,
                                   double t) {
  // Completion and deadline times both increase; the newest completion at
  // or before t carries the largest deadline.
  const auto it = std::upper_bound(completions.begin(), completions.end(), t,
                                   [](double value, const SegmentCompletion& c) {
                                     return value < c.t_c;
                                   });
  if (it == completions.begin()) return std::nullopt;
  return std::prev(it)->t_p + tau - t;
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "lolypop") return Algorithm::kLolypop;
  if (name == "festive") return Algorithm::kFestive;
  if (name == "lowest") return Algorithm::kLowest;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kLolypop: return "lolypop";
    case Algorithm::kFestive: return "festive";
    case Algorithm::kLowest: return "lowest";
  }
  return "?";
}

namespace {

// Everything one virtual-time session mutates, driven by run_session.
class SessionEngine {
 public:
  SessionEngine(const ThroughputTrace& trace, const MediaCatalog& catalog,
                const Timeline& timeline, const SimConfig& config)
      : trace_(trace), catalog_(catalog), timeline_(timeline), config_(config),
        prediction_log_(config.lolypop.t_max),
        error_history_(config.lolypop.t_max, config.lolypop.age_window_s,
                       config.lolypop.min_samples) {}

  SessionReport run();

 private:
  double tau() const { return catalog_.tau; }
  double deadline(long long i) const { return segment_deadline(catalog_, timeline_, i); }
  double availability(long long i) const { return segment_availability(catalog_, i); }

  std::optional<double> metered(double t1, double t2,
                                const TransferRecord* in_flight) const {
    double bits = 0.0;
    double active = 0.0;
    for (const auto& rec : meter_.records()) accumulate_overlap(rec, t1, t2, bits, active);
    if (in_flight) accumulate_overlap(*in_flight, t1, t2, bits, active);
    if (active <= 0.0) return std::nullopt;
    return bits / active;
  }

  // Per-second work at integer time s: record realized prediction errors,
  // compute the new multi-scale predictions, sample the buffer level.
  void housekeep(long long s, const TransferRecord* in_flight) {
    const auto t_max = config_.lolypop.t_max;
    for (int T = 1; T <= t_max; ++T) {
      const auto rho_hat = prediction_log_.lookup(s - T, T);
      if (!rho_hat) continue;
      const auto rho = metered(static_cast<double>(s - T), static_cast<double>(s), in_flight);
      if (!rho) continue;
      error_history_.record(s, T,
                            signed_rel_error(*rho_hat, *rho, config_.lolypop.rho_min_bps));
    }
    const MeterView view = [this, in_flight](double t1, double t2) {
      return metered(t1, t2, in_flight);
    };
    prediction_log_.add(predict_all_scales(view, s, config_.predictor, t_max));
    if (const auto level = buffer_level(completions_, tau(), static_cast<double>(s))) {
      buffer_series_.push_back({s, *level});
    }
  }

  // Runs housekeeping for every integer second in (last_housekeep, t].
  void housekeep_through(double t, const TransferRecord* in_flight = nullptr) {
    const auto limit = static_cast<long long>(std::floor(t));
    for (long long s = last_housekeep_ + 1; s <= limit; ++s) {
      housekeep(s, in_flight);
      last_housekeep_ = s;
    }
  }

  double omega_now() const {
    return n_played_ > 0 ? static_cast<double>(n_transitions_) / static_cast<double>(n_played_)
                         : 0.0;
  }

  int decide(long long segment, double t_r, double t_p, bool tuning) {
    switch (config_.algorithm) {
      case Algorithm::kLowest:
        return lowest_select(catalog_.n_representations());
      case Algorithm::kFestive:
        return festive_select(festive_, catalog_.representation_rates, config_.festive);
      case Algorithm::kLolypop: {
        if (tuning) return 0;  // tune-in and post-skip resume use the lowest quality
        std::vector<double> p(catalog_.n_representations(), kNoEstimate);
        if (const auto interval = select_prediction_interval(prediction_log_, t_r, t_p)) {
          for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] = success_probability(error_history_, *interval,
                                       catalog_.size_bits(segment, static_cast<int>(j)), t_r,
                                       t_p);
          }
        }
        DecisionContext ctx;
        ctx.t_r = t_r;
        ctx.t_p = t_p;
        ctx.omega_t = omega_now();
        ctx.j_prev = last_played_repr_;
        ctx.p_success = std::move(p);
        return lolypop_select(ctx, config_.lolypop);
      }
    }
    throw std::logic_error("unreachable");
  }

  void record_played(long long segment, int repr, double t_r, double t_c, double omega_at_r) {
    SegmentEvent ev;
    ev.segment = segment;
    ev.repr = repr;
    ev.t_r = t_r;
    ev.t_c = t_c;
    ev.skipped = false;
    ev.omega_at_request = omega_at_r;
    events_[segment] = ev;
    completions_.push_back({t_c, deadline(segment)});
    if (last_played_repr_ && *last_played_repr_ != repr) ++n_transitions_;
    last_played_repr_ = repr;
    ++n_played_;
  }

  void record_skipped(long long segment, int repr, double t_r, double wasted,
                      double omega_at_r) {
    SegmentEvent ev;
    ev.segment = segment;
    ev.repr = repr;
    ev.t_r = t_r;
    ev.skipped = true;
    ev.omega_at_request = omega_at_r;
    ev.wasted_bits = wasted;
    events_[segment] = ev;
    wasted_bits_ += wasted;
  }

  const ThroughputTrace& trace_;
  const MediaCatalog& catalog_;
  const Timeline& timeline_;
  const SimConfig& config_;

  ThroughputMeter meter_;
  PredictionLog prediction_log_;
  ErrorHistory error_history_;
  FestiveState festive_;
  std::vector<SegmentCompletion> completions_;
  std::map<long long, SegmentEvent> events_;
  std::vector<BufferSample> buffer_series_;

  long long last_housekeep_ = 0;
  std::optional<int> last_played_repr_;
  long long n_played_ = 0;
  long long n_transitions_ = 0;
  double wasted_bits_ = 0.0;
};

SessionReport SessionEngine::run() {
  catalog_.validate();
  if (timeline_.delta_p < 2.0 * tau()) {
    throw ConfigError("timeline: delta_p must be >= 2*tau for tune-in to be feasible");
  }
  if (config_.session_length_s <= 0.0) {
    throw ConfigError("sim: session_length_s must be > 0");
  }
  if (config_.lolypop.t_max < 1) throw ConfigError("sim: t_max must be >= 1");
  if (timeline_.delta_p - tau() > static_cast<double>(config_.lolypop.t_max)) {
    throw ConfigError("sim: transport latency delta_p - tau exceeds the prediction "
                      "horizon T_max");
  }
  const double t_start = config_.tune_in_offset_s.value_or(tau());
  if (t_start < tau()) throw ConfigError("sim: tune-in before the first segment is published");
  const double t_end = t_start + config_.session_length_s;
  if (t_end > trace_.duration_s()) {
    throw ConfigError("sim: session extends beyond the trace (needs " +
                      std::to_string(t_end) + " s, trace has " +
                      std::to_string(trace_.duration_s()) + " s)");
  }
  // Last segment whose deadline can elapse within the session; resolved
  // with the same predicate the request gate uses so accounting and the
  // event loop agree for every representable tau.
  const auto in_session = [&](long long i) { return deadline(i) <= t_end; };
  auto last_accounted =
      static_cast<long long>(std::floor((t_end - timeline_.delta_p) / tau()));
  while (last_accounted >= 0 && !in_session(last_accounted)) --last_accounted;
  while (in_session(last_accounted + 1)) ++last_accounted;
  if (last_accounted >= 0 &&
      static_cast<std::size_t>(last_accounted) >= catalog_.n_segments()) {
    throw ConfigError("sim: catalog has too few segments for the session length");
  }

  last_housekeep_ = static_cast<long long>(std::floor(t_start));
  double t_now = t_start;
  bool tuning = true;
  long long segment = -1;
  std::optional<long long> first_segment;

  while (t_now < t_end) {
    if (tuning) {
      const auto tuned = tune_in(t_now, tau(), timeline_.delta_p);
      if (!tuned) {
        // Wait for the next availability instant, where a segment always
        // qualifies (delta_p >= 2*tau).
        double next = (std::floor(t_now / tau()) + 1.0) * tau();
        if (next <= t_now) next += tau();
        if (next >= t_end) break;
        housekeep_through(next);
        t_now = next;
        continue;
      }
      segment = *tuned;
    }
    const double t_p = deadline(segment);
    if (t_p > t_end) break;  // outcome could not be accounted in-session
    const double t_r = std::max(t_now, availability(segment));
    housekeep_through(t_r);
    if (!first_segment) first_segment = segment;

    if (t_p <= t_r) {
      // Already unmeetable; skip without issuing a request.
      record_skipped(segment, -1, std::numeric_limits<double>::quiet_NaN(), 0.0, omega_now());
      tuning = true;
      continue;
    }

    const double omega_at_r = omega_now();
    const int repr = decide(segment, t_r, t_p, tuning);
    const double size = catalog_.size_bits(segment, repr);
    const DownloadResult res = simulate_download(trace_, t_r, size, t_p);

    // Per-second work during the transfer sees the bits delivered so far.
    {
      const auto limit = static_cast<long long>(std::floor(res.end_time));
      for (long long s = last_housekeep_ + 1; s <= limit; ++s) {
        const TransferRecord partial{t_r, static_cast<double>(s),
                                     std::min(trace_.integrate_bits(t_r, static_cast<double>(s)),
                                              size)};
        housekeep(s, &partial);
        last_housekeep_ = s;
      }
    }
    meter_.add({t_r, res.end_time, res.bits_delivered});

    if (config_.algorithm == Algorithm::kFestive) {
      festive_.on_download(repr, res.bits_delivered / (res.end_time - t_r), config_.festive);
    }

    if (res.completed) {
      record_played(segment, repr, t_r, res.end_time, omega_at_r);
      tuning = false;
      ++segment;
    } else {
      record_skipped(segment, repr, t_r, res.bits_delivered, omega_at_r);
      tuning = true;
    }
    t_now = res.end_time;
  }
  housekeep_through(t_end);

  // Assemble the report over all segments whose deadlines elapsed.
  SessionReport report;
  report.trace_id = trace_.id;
  report.algorithm = algorithm_name(config_.algorithm);
  report.t_start = t_start;
  report.t_end = t_end;
  report.first_segment = first_segment.value_or(0);
  report.wasted_bits = wasted_bits_;
  report.buffer_series = std::move(buffer_series_);

  double repr_sum = 0.0;
  double mmbr_sum = 0.0;
  std::optional<long long> first_played;
  if (first_segment) {
    for (long long i = *first_segment; i <= last_accounted; ++i) {
      auto it = events_.find(i);
      SegmentEvent ev;
      if (it != events_.end()) {
        ev = it->second;
      } else {
        ev.segment = i;  // never requested: a re-tune jumped over it
        ev.skipped = true;
      }
      ev.buffer_at_deadline = buffer_level(completions_, tau(), deadline(i));
      if (ev.skipped) {
        ++report.n_skipped;
      } else {
        ++report.n_played;
        repr_sum += ev.repr;
        mmbr_sum += catalog_.mmbr_bps(i, ev.repr);
        if (!first_played) first_played = i;
      }
      ++report.n_accounted;
      report.events.push_back(ev);
    }
  }
  report.n_transitions = n_transitions_;
  if (report.n_accounted > 0) {
    report.sigma =
        static_cast<double>(report.n_skipped) / static_cast<double>(report.n_accounted);
  }
  if (report.n_played > 0) {
    report.omega =
        static_cast<double>(n_transitions_) / static_cast<double>(report.n_played);
    report.mean_repr = repr_sum / static_cast<double>(report.n_played);
    report.mean_mmbr_bps = mmbr_sum / static_cast<double>(report.n_played);
  }
  if (first_played) report.startup_delay_s = deadline(*first_played) - t_start;
  return report;
}

}  // namespace

SessionReport run_session(const ThroughputTrace& trace, const MediaCatalog& catalog,
                          const Timeline& timeline, const SimConfig& config) {
  SessionEngine engine(trace, catalog, timeline, config);
  return engine.run();
}

std::vector<double> default_representation_ladder() {
  return {101e3, 194e3, 377e3, 730e3, 1415e3, 2743e3, 5319e3, 10314e3, 20000e3};
}

MediaCatalog build_synthetic_catalog(const std::vector<double>& rates_bps,
                                     std::size_t n_segments, double tau, double variation_cv,
                                     unsigned long long seed) {
  for (std::size_t j = 1; j < rates_bps.size(); ++j) {
    if (rates_bps[j] <= rates_bps[j - 1]) {
      throw ConfigError("build_synthetic_catalog: rates must be strictly increasing");
    }
  }
  if (rates_bps.empty() || n_segments == 0 || tau <= 0.0 || variation_cv < 0.0) {
    throw ConfigError("build_synthetic_catalog: bad arguments");
  }
  MediaCatalog catalog;
  catalog.tau = tau;
  catalog.representation_rates = rates_bps;
  catalog.segment_sizes.resize(n_segments);

  std::mt19937_64 rng(seed);
  // Unit-mean lognormal: sigma^2 = ln(1 + cv^2), mu = -sigma^2 / 2.
  const double sigma2 = std::log(1.0 + variation_cv * variation_cv);
  std::lognormal_distribution<double> lognorm(-sigma2 / 2.0, std::sqrt(sigma2));
  for (auto& row : catalog.segment_sizes) {
    const double m = variation_cv > 0.0 ? lognorm(rng) : 1.0;
    row.reserve(rates_bps.size());
    for (const double rate : rates_bps) row.push_back(rate * tau * m);
  }
  return catalog;
}

namespace {

LolypopConfig lolypop_from_json(const json& j) {
  LolypopConfig cfg;
  cfg.sigma_star = j.value("sigma_star", cfg.sigma_star);
  cfg.omega_star = j.value("omega_star", cfg.omega_star);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.rho_min_bps = j.value("rho_min_bps", cfg.rho_min_bps);
  cfg.min_samples = j.value("min_samples", cfg.min_samples);
  if (j.contains("age_window_s") && !j["age_window_s"].is_null()) {
    cfg.age_window_s = j["age_window_s"].get<double>();
  }
  return cfg;
}

FestiveConfig festive_from_json(const json& j) {
  FestiveConfig cfg;
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.p = j.value("p", cfg.p);
  cfg.k = j.value("k", cfg.k);
  cfg.bw_window = j.value("bw_window", cfg.bw_window);
  cfg.stability_window = j.value("stability_window", cfg.stability_window);
  return cfg;
}

}  // namespace

SessionSpec parse_session_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("session spec: ") + err.what());
  }
  try {
    SessionSpec spec;
    spec.sim.algorithm = parse_algorithm(root.value("algorithm", "lolypop"));
    if (root.contains("lolypop")) spec.sim.lolypop = lolypop_from_json(root["lolypop"]);
    if (root.contains("festive")) spec.sim.festive = festive_from_json(root["festive"]);
    spec.sim.predictor = parse_predictor_spec(root.value("predictor", "SMA:1:ar"));
    spec.sim.session_length_s = root.value("session_length_s", 300.0);
    if (root.contains("tune_in_offset_s") && !root["tune_in_offset_s"].is_null()) {
      spec.sim.tune_in_offset_s = root["tune_in_offset_s"].get<double>();
    }
    spec.sim.seed = root.value("seed", 1ULL);

    if (!root.contains("catalog")) throw ConfigError("session spec: missing 'catalog'");
    const json& cat = root["catalog"];
    const double tau = cat.value("tau", 2.0);
    spec.timeline.delta_p = cat.value("delta_p", 5.0);
    std::vector<double> rates = cat.contains("rates_bps")
                                    ? cat["rates_bps"].get<std::vector<double>>()
                                    : default_representation_ladder();
    if (cat.contains("segment_sizes_bits")) {
      spec.catalog.tau = tau;
      spec.catalog.representation_rates = std::move(rates);
      spec.catalog.segment_sizes =
          cat["segment_sizes_bits"].get<std::vector<std::vector<double>>>();
    } else {
      const auto n_segments = cat.value("n_segments", std::size_t{200});
      const double variation_cv = cat.value("variation_cv", 0.0);
      const auto seed = cat.value("seed", 1ULL);
      spec.catalog = build_synthetic_catalog(rates, n_segments, tau, variation_cv, seed);
    }
    spec.catalog.validate();
    return spec;
  } catch (const json::exception& err) {
    throw ConfigError(std::string("session spec: ") + err.what());
  }
}

std::string report_to_json(const SessionReport& report) {
  json j;
  j["trace_id"] = report.trace_id;
  j["algorithm"] = report.algorithm;
  j["t_start"] = report.t_start;
  j["t_end"] = report.t_end;
  j["first_segment"] = report.first_segment;
  j["n_accounted"] = report.n_accounted;
  j["n_played"] = report.n_played;
  j["n_skipped"] = report.n_skipped;
  j["n_transitions"] = report.n_transitions;
  j["sigma"] = report.sigma;
  j["omega"] = report.omega;
  j["mean_repr"] = report.mean_repr ? json(*report.mean_repr) : json();
  j["mean_mmbr_bps"] = report.mean_mmbr_bps ? json(*report.mean_mmbr_bps) : json();
  j["startup_delay_s"] = report.startup_delay_s ? json(*report.startup_delay_s) : json();
  j["wasted_bits"] = report.wasted_bits;

  json events = json::array();
  for (const auto& ev : report.events) {
    json e;
    e["segment"] = ev.segment;
    e["skipped"] = ev.skipped;
    e["repr"] = ev.repr >= 0 ? json(ev.repr) : json();
    e["t_r"] = std::isnan(ev.t_r) ? json() : json(ev.t_r);
    e["t_c"] = std::isnan(ev.t_c) ? json() : json(ev.t_c);
    e["buffer_at_deadline"] = ev.buffer_at_deadline ? json(*ev.buffer_at_deadline) : json();
    e["omega_at_request"] = std::isnan(ev.omega_at_request) ? json() : json(ev.omega_at_request);
    e["wasted_bits"] = ev.wasted_bits;
    events.push_back(std::move(e));
  }
  j["events"] = std::move(events);

  json buffer = json::array();
  for (const auto& sample : report.buffer_series) {
    buffer.push_back(json::array({sample.t, sample.level_s}));
  }
  j["buffer_series"] = std::move(buffer);
  return j.dump(2) + "\n";
}

std::string events_to_csv(const SessionReport& report) {
  std::string out = "segment,repr,t_r,t_c,skipped,buffer_at_deadline\n";
  for (const auto& ev : report.events) {
    out += format_number(ev.segment);
    out += ',';
    if (ev.repr >= 0) out += format_number(ev.repr);
    out += ',';
    if (!std::isnan(ev.t_r)) out += format_number(ev.t_r);
    out += ',';
    if (!std::isnan(ev.t_c)) out += format_number(ev.t_c);
    out += ',';
    out += ev.skipped ? '1' : '0';
    out += ',';
    if (ev.buffer_at_deadline) out += format_number(*ev.buffer_at_deadline);
    out += '\n';
  }
  return out;
}

}  // namespace lolysim
