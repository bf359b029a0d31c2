#include "wigig/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "wigig/csv.hpp"
#include "wigig/random.hpp"

namespace wigig {

namespace {

double ratio(int num, int den) noexcept {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(int n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max(n, 1))));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&]() {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

constexpr std::uint64_t kSweepStream = 100;
constexpr std::uint64_t kDisruptionStream = 200;
constexpr std::uint64_t kTimingStream = 300;

}  // namespace

double AccuracyCell::a_p() const noexcept { return ratio(permanent_long_term, permanent_trials); }
double AccuracyCell::a_t() const noexcept { return ratio(transient_short_term, transient_trials); }
double AccuracyCell::a_nlos() const noexcept { return ratio(nlos_short_term, nlos_trials); }

const AccuracyCell& AccuracyTable::at(TimeMs t_drop, TimeMs t_recovery) const {
  for (const auto& r : rows) {
    if (r.t_drop_threshold_ms == t_drop && r.t_recovery_threshold_ms == t_recovery) return r;
  }
  throw std::out_of_range("no accuracy row for (" + std::to_string(t_drop) + ", " +
                          std::to_string(t_recovery) + ")");
}

void SweepConfig::validate() const {
  if (t_drop_thresholds_ms.empty() || t_recovery_thresholds_ms.empty()) {
    throw ConfigError("sweep: threshold lists must not be empty");
  }
  for (TimeMs v : t_drop_thresholds_ms) {
    if (v <= 0) throw ConfigError("sweep: t_D_th values must be > 0");
  }
  for (TimeMs v : t_recovery_thresholds_ms) {
    if (v <= 0) throw ConfigError("sweep: t_R_th values must be > 0");
  }
  if (trials_per_cell < 1) throw ConfigError("sweep: trials must be >= 1");
  if (!(distance_m > 0.0)) throw ConfigError("sweep: distance_m must be > 0");
  if (lead_in_ms < 0) throw ConfigError("sweep: lead_in_ms must be >= 0");
  distributions.validate();
  detector.validate();
}

Trace sweep_trial_trace(const SweepConfig& cfg, Scenario scenario, int trial) {
  Rng rng = make_rng(cfg.seed, kSweepStream + static_cast<std::uint64_t>(scenario_id(scenario)),
                     static_cast<std::uint64_t>(trial));
  LinkConfig link;
  link.distance_m = cfg.distance_m;
  link.environment = cfg.environment;
  const double q0 = baseline_quality(link).value();

  const EpisodeSampler sampler(cfg.distributions);
  const BlockageEpisode ep = sampler.sample(scenario, cfg.distance_m, rng, q0, cfg.lead_in_ms);

  const TimeMs max_drop =
      *std::max_element(cfg.t_drop_thresholds_ms.begin(), cfg.t_drop_thresholds_ms.end());
  const TimeMs max_rec =
      *std::max_element(cfg.t_recovery_thresholds_ms.begin(), cfg.t_recovery_thresholds_ms.end());
  // Long enough for the slowest cell to classify.
  const TimeMs needed = cfg.lead_in_ms + ep.drop_time_ms + max_drop + max_rec + 1000;

  const std::vector<Segment> segments{ep};
  RenderOptions opts;
  opts.duration_ms = needed;
  opts.spike_rate_per_s = cfg.distributions.spike_rate_per_s;
  opts.spike_units = cfg.distributions.spike_units;
  Trace trace = render_trace(segments, link, rng, opts);
  const auto keep = static_cast<std::size_t>(needed);
  if (trace.size() > keep) {
    trace.q.resize(keep);
    trace.throughput_mbps.resize(keep);
  }
  return trace;
}

std::optional<ClassificationResult> first_classification(const Trace& trace,
                                                         const DetectorConfig& detector) {
  BlockageDetector det(detector);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (const auto& e : det.step(trace.time_at(i), trace.q[i])) {
      if (e.kind == EventKind::Classified) return e.result;
    }
  }
  return std::nullopt;
}

AccuracyTable accuracy_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<DetectorConfig> cells;
  for (TimeMs td : cfg.t_drop_thresholds_ms) {
    for (TimeMs tr : cfg.t_recovery_thresholds_ms) {
      DetectorConfig d = cfg.detector;
      d.t_drop_threshold_ms = td;
      d.t_recovery_threshold_ms = tr;
      cells.push_back(d);
    }
  }
  const int n = cfg.trials_per_cell;
  // verdicts[(s * n + trial) * cells + c]: 0 none, 1 short-term, 2 long-term
  std::vector<unsigned char> verdicts(static_cast<std::size_t>(3 * n) * cells.size(), 0);
  parallel_for(3 * n, cfg.jobs, [&](int job) {
    const Scenario s = scenario_from_id(job / n + 1);
    const Trace trace = sweep_trial_trace(cfg, s, job % n);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto r = first_classification(trace, cells[c]);
      verdicts[static_cast<std::size_t>(job) * cells.size() + c] =
          !r ? 0 : (r->verdict == Verdict::ShortTermBlockage ? 1 : 2);
    }
  });

  AccuracyTable table;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    AccuracyCell row;
    row.t_drop_threshold_ms = cells[c].t_drop_threshold_ms;
    row.t_recovery_threshold_ms = cells[c].t_recovery_threshold_ms;
    for (int job = 0; job < 3 * n; ++job) {
      const unsigned char v = verdicts[static_cast<std::size_t>(job) * cells.size() + c];
      switch (job / n + 1) {
        case 1:
          ++row.transient_trials;
          row.transient_short_term += v == 1;
          break;
        case 2:
          ++row.permanent_trials;
          row.permanent_long_term += v == 2;
          break;
        default:
          ++row.nlos_trials;
          row.nlos_short_term += v == 1;
          break;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

DisruptionStats disruption_stats(int n_trials, double distance_m, std::uint64_t seed,
                                 const EpisodeDistributions& dists, unsigned jobs) {
  if (n_trials < 1) throw std::invalid_argument("disruption_stats: n_trials must be >= 1");
  DistanceBucket bucket;
  if (distance_m == 3.0) {
    bucket = DistanceBucket::Near3m;
  } else if (distance_m == 7.0) {
    bucket = DistanceBucket::Far7m;
  } else {
    throw std::invalid_argument("disruption_stats: distance " + format_number(distance_m) +
                                " m is not a calibrated bucket (3 or 7)");
  }
  const EpisodeSampler sampler(dists);
  LinkConfig link;
  link.distance_m = distance_m;
  constexpr TimeMs kLead = 1000;

  std::vector<double> durations(static_cast<std::size_t>(n_trials), 0.0);
  parallel_for(n_trials, jobs, [&](int trial) {
    Rng rng = make_rng(seed, kDisruptionStream + static_cast<std::uint64_t>(bucket),
                       static_cast<std::uint64_t>(trial));
    const double q0 = baseline_quality(link).value();
    const BlockageEpisode ep = sampler.sample(Scenario::Transient, distance_m, rng, q0, kLead);
    const std::vector<Segment> segments{ep};
    RenderOptions opts;
    opts.duration_ms = ep.end_ms() + kLead;
    const Trace trace = render_trace(segments, link, rng, opts);
    const double half = 0.5 * trace.throughput_mbps.front();
    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace.throughput_mbps[i] < half) {
        if (!first) first = i;
        last = i;
      }
    }
    durations[static_cast<std::size_t>(trial)] =
        first ? static_cast<double>(last - *first + 1) / 1000.0 : 0.0;
  });

  DisruptionStats st;
  st.distance_m = distance_m;
  for (double d : durations) {
    if (d > 0.0) st.durations_s.push_back(d);
  }
  std::sort(st.durations_s.begin(), st.durations_s.end());
  const auto m = st.durations_s.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum += st.durations_s[i];
    st.cdf.emplace_back(st.durations_s[i], static_cast<double>(i + 1) / static_cast<double>(m));
  }
  st.mean_s = m ? sum / static_cast<double>(m) : 0.0;
  return st;
}

ReplaySummary replay(const Trace& trace, const DetectorConfig& cfg) {
  BlockageDetector det(cfg);
  ReplaySummary out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (auto& e : det.step(trace.time_at(i), trace.q[i])) {
      if (e.kind == EventKind::BlockageIndication) ++out.indications;
      if (e.kind == EventKind::Classified) {
        (e.result->verdict == Verdict::ShortTermBlockage ? out.short_term : out.long_term) += 1;
      }
      out.events.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<TimingRow> timing_summary(int n_trials, std::uint64_t seed,
                                      const EpisodeDistributions& dists) {
  if (n_trials < 1) throw std::invalid_argument("timing_summary: n_trials must be >= 1");
  const EpisodeSampler sampler(dists);
  std::vector<TimingRow> rows;
  for (int sid = 1; sid <= 3; ++sid) {
    for (auto bucket : {DistanceBucket::Near3m, DistanceBucket::Far7m}) {
      const Scenario s = scenario_from_id(sid);
      Rng rng = make_rng(seed, kTimingStream + static_cast<std::uint64_t>(sid),
                         static_cast<std::uint64_t>(bucket));
      TimingRow row;
      row.scenario = s;
      row.bucket = bucket;
      row.trials = n_trials;
      double td_sum = 0.0;
      double tr_sum = 0.0;
      double dqd_sum = 0.0;
      double dqr_sum = 0.0;
      double tr_max = 0.0;
      bool has_tr = false;
      for (int i = 0; i < n_trials; ++i) {
        const BlockageEpisode ep = sampler.sample(s, bucket_distance_m(bucket), rng);
        const auto td = static_cast<double>(ep.drop_time_ms);
        td_sum += td;
        row.t_drop_max_ms = std::max(row.t_drop_max_ms, td);
        if (ep.recovery_time_ms) {
          has_tr = true;
          const auto tr = static_cast<double>(*ep.recovery_time_ms);
          tr_sum += tr;
          tr_max = std::max(tr_max, tr);
        }
        dqd_sum += ep.drop_delta();
        dqr_sum += ep.recovery_delta();
      }
      const auto n = static_cast<double>(n_trials);
      row.t_drop_mean_ms = td_sum / n;
      if (has_tr) {
        row.t_recovery_mean_ms = tr_sum / n;
        row.t_recovery_max_ms = tr_max;
      }
      row.dq_drop_mean = dqd_sum / n;
      row.dq_recovery_mean = dqr_sum / n;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string accuracy_to_csv(const AccuracyTable& table) {
  std::string out =
      "t_D_th_ms,t_R_th_ms,A_P,A_T,A_NLOS,permanent_trials,transient_trials,nlos_trials\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.t_drop_threshold_ms) + ',' + std::to_string(r.t_recovery_threshold_ms) +
           ',' + format_number(r.a_p(), 4) + ',' + format_number(r.a_t(), 4) + ',' +
           format_number(r.a_nlos(), 4) + ',' + std::to_string(r.permanent_trials) + ',' +
           std::to_string(r.transient_trials) + ',' + std::to_string(r.nlos_trials) + '\n';
  }
  return out;
}

std::string accuracy_to_json(const AccuracyTable& table, const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["trials_per_cell"] = cfg.trials_per_cell;
  j["distance_m"] = cfg.distance_m;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"t_D_th_ms", r.t_drop_threshold_ms},
                    {"t_R_th_ms", r.t_recovery_threshold_ms},
                    {"A_P", r.a_p()},
                    {"A_T", r.a_t()},
                    {"A_NLOS", r.a_nlos()}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string disruption_to_csv(const std::vector<DisruptionStats>& stats) {
  std::string out = "distance_m,duration_s,cdf\n";
  for (const auto& s : stats) {
    for (const auto& [d, p] : s.cdf) {
      out += format_number(s.distance_m) + ',' + format_number(d, 3) + ',' + format_number(p, 6) + '\n';
    }
  }
  return out;
}

std::string timing_to_csv(const std::vector<TimingRow>& rows) {
  std::string out =
      "scenario,distance_m,trials,t_D_mean_ms,t_D_max_ms,t_R_mean_ms,t_R_max_ms,dq_D_mean,dq_R_mean\n";
  for (const auto& r : rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v, 2) : "NA"; };
    out += std::to_string(scenario_id(r.scenario)) + ',' +
           format_number(bucket_distance_m(r.bucket)) + ',' + std::to_string(r.trials) + ',' +
           format_number(r.t_drop_mean_ms, 2) + ',' + format_number(r.t_drop_max_ms, 2) + ',' +
           opt(r.t_recovery_mean_ms) + ',' + opt(r.t_recovery_max_ms) + ',' +
           format_number(r.dq_drop_mean, 3) + ',' + format_number(r.dq_recovery_mean, 3) + '\n';
  }
  return out;
}

std::string replay_to_json(const ReplaySummary& summary) {
  nlohmann::ordered_json j;
  j["events"] = summary.events.size();
  j["blockage_indications"] = summary.indications;
  j["short_term"] = summary.short_term;
  j["long_term"] = summary.long_term;
  return j.dump(2) + "\n";
}

}  // namespace wigig
