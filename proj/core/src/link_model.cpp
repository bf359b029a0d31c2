#include "wigig/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wigig {

void LinkConfig::validate() const {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw ConfigError("link: distance_m must be > 0");
  }
  if (!(rate_cap_mbps > 0.0)) {
    throw ConfigError("link: rate_cap_mbps must be > 0");
  }
  if (!std::isfinite(boresight_offset_deg)) {
    throw ConfigError("link: boresight_offset_deg must be finite");
  }
}

double azimuth_gain(double offset_deg, const AntennaPattern& pattern) noexcept {
  if (!std::isfinite(offset_deg)) {
    return pattern.back_factor;
  }
  double off = std::fmod(offset_deg, 360.0);
  if (off < 0.0) off += 360.0;
  const double from_boresight = std::min(off, 360.0 - off);
  const double half_sector = pattern.main_sector_deg / 2.0;
  if (from_boresight <= half_sector) {
    return 1.0;
  }
  if (pattern.taper_deg <= 0.0 || from_boresight >= half_sector + pattern.taper_deg) {
    return pattern.back_factor;
  }
  const double t = (from_boresight - half_sector) / pattern.taper_deg;
  return 1.0 - (1.0 - pattern.back_factor) * t;
}

RangeProfile range_profile(Environment env) noexcept {
  switch (env) {
    case Environment::IndoorCorridor: return {9.0, 10.0, 2.0, 25.0, 32.0};
    case Environment::IndoorRoom: return {9.0, 8.0, 2.0, 16.0, 21.0};
    case Environment::OutdoorOpen: return {9.0, 6.0, 2.0, 14.0, 18.0};
  }
  return {9.0, 8.0, 2.0, 16.0, 21.0};
}

SignalQuality baseline_quality(const LinkConfig& cfg, const AntennaPattern& pattern) {
  const RangeProfile p = range_profile(cfg.environment);
  const double range = cfg.traffic_active ? p.max_range_traffic_m : p.max_range_idle_m;
  const double d = cfg.distance_m;
  if (d > range) {
    return SignalQuality{0.0};
  }
  double q = p.peak_q;
  if (d > p.knee_m) {
    q = p.peak_q - (p.peak_q - p.edge_q) * (d - p.knee_m) / (range - p.knee_m);
  }
  return SignalQuality::clamped(q * azimuth_gain(cfg.boresight_offset_deg, pattern));
}

double throughput_of(SignalQuality q, double cap_mbps) {
  const auto idx = static_cast<std::size_t>(std::clamp(std::floor(q.value()), 0.0, 10.0));
  return std::max(0.0, std::min(kThroughputTableMbps[idx], cap_mbps));
}

// ---------------------------------------------------------------------------

void BlockageEpisode::validate() const {
  auto in_range = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 10.0; };
  if (!in_range(q_initial) || !in_range(q_blocked) || !in_range(q_final)) {
    throw std::invalid_argument("episode: quality levels must lie in [0, 10]");
  }
  if (!(q_blocked <= q_final && q_final <= q_initial)) {
    throw std::invalid_argument("episode: need q_blocked <= q_final <= q_initial");
  }
  if (drop_time_ms <= 0) {
    throw std::invalid_argument("episode: drop_time_ms must be > 0");
  }
  if (dwell_ms < 0 || hold_ms < 0) {
    throw std::invalid_argument("episode: dwell_ms and hold_ms must be >= 0");
  }
  if (scenario == Scenario::PermanentNoNlos) {
    if (recovery_time_ms) {
      throw std::invalid_argument("episode: scenario 2 has no recovery");
    }
    if (q_final != q_blocked) {
      throw std::invalid_argument("episode: scenario 2 requires q_final == q_blocked");
    }
  } else if (!recovery_time_ms || *recovery_time_ms <= 0) {
    throw std::invalid_argument("episode: scenarios 1 and 3 need recovery_time_ms > 0");
  }
  if (disconnect_after_ms && *disconnect_after_ms <= 0) {
    throw std::invalid_argument("episode: disconnect_after_ms must be > 0");
  }
}

namespace {

std::size_t cell_index(Scenario s, DistanceBucket b) noexcept {
  return static_cast<std::size_t>(scenario_id(s) - 1) * 2 + static_cast<std::size_t>(b);
}

constexpr TimingStat kStanding{20000.0, 40000.0};

constexpr double kSustainedFloor = 0.5;

// Bottom dwell of a person walking through the beam.
constexpr TimingStat kTransientDwell3m{1060.0, 2120.0};
constexpr TimingStat kTransientDwell7m{500.0, 1000.0};

void check_timing(const TimingStat& t, const std::string& what) {
  if (!(t.mean_ms > 0.0) || !(t.max_ms >= t.mean_ms)) {
    throw ConfigError(what + ": need 0 < mean <= max");
  }
}

}  // namespace

EpisodeDistributions EpisodeDistributions::defaults() {
  EpisodeDistributions d;
  using S = Scenario;
  using B = DistanceBucket;
  d.at(S::Transient, B::Near3m) = {{197.0, 838.0}, TimingStat{3826.0, 5726.0}, 7.5, 7.32,
                                   kTransientDwell3m, std::nullopt};
  d.at(S::Transient, B::Far7m) = {{140.0, 513.0}, TimingStat{1648.0, 2434.0}, 7.72, 7.64,
                                  kTransientDwell7m, std::nullopt};
  d.at(S::PermanentNoNlos, B::Near3m) = {{232.0, 748.0}, std::nullopt, 7.20, 1.41, kStanding,
                                         std::nullopt};
  d.at(S::PermanentNoNlos, B::Far7m) = {{298.0, 952.0}, std::nullopt, 7.30, 1.56, kStanding,
                                        TimingStat{16329.0, 22000.0}};
  d.at(S::PermanentWithNlos, B::Near3m) = {{267.65, 707.0}, TimingStat{190.0, 376.0}, 3.40,
                                           1.13, kStanding, std::nullopt};
  d.at(S::PermanentWithNlos, B::Far7m) = {{411.0, 784.0}, TimingStat{136.0, 313.0}, 4.06, 1.20,
                                          kStanding, std::nullopt};
  return d;
}

EpisodeDistributions EpisodeDistributions::zero_noise() const {
  EpisodeDistributions d = *this;
  d.dq_sigma = 0.0;
  d.spike_rate_per_s = 0.0;
  d.timings_at_mean = true;
  return d;
}

BucketCalibration& EpisodeDistributions::at(Scenario s, DistanceBucket b) noexcept {
  return cells[cell_index(s, b)];
}

const BucketCalibration& EpisodeDistributions::at(Scenario s, DistanceBucket b) const noexcept {
  return cells[cell_index(s, b)];
}

void EpisodeDistributions::validate() const {
  for (int sid = 1; sid <= 3; ++sid) {
    for (auto b : {DistanceBucket::Near3m, DistanceBucket::Far7m}) {
      const Scenario s = scenario_from_id(sid);
      const auto& c = at(s, b);
      const std::string where = "distributions." + std::string(to_string(s)) + "." +
                                (b == DistanceBucket::Near3m ? "3m" : "7m");
      check_timing(c.drop, where + ".t_D");
      check_timing(c.dwell, where + ".dwell");
      if (c.recovery) check_timing(*c.recovery, where + ".t_R");
      if (c.disconnect) check_timing(*c.disconnect, where + ".t_DC");
      if ((s == Scenario::PermanentNoNlos) == c.recovery.has_value()) {
        throw ConfigError(where + ": t_R must be given for scenarios 1 and 3 only");
      }
      auto in_range = [](double v) { return v >= 0.0 && v <= 10.0; };
      if (!in_range(c.dq_drop_mean) || !in_range(c.dq_recovery_mean)) {
        throw ConfigError(where + ": centroid coordinates must lie in [0, 10]");
      }
    }
  }
  if (!(dq_sigma >= 0.0)) throw ConfigError("distributions: dq_sigma must be >= 0");
  if (!(dq_correlation >= -1.0 && dq_correlation <= 1.0)) {
    throw ConfigError("distributions: dq_correlation must lie in [-1, 1]");
  }
  if (!(spike_rate_per_s >= 0.0)) throw ConfigError("distributions: spike rate must be >= 0");
}

// ---------------------------------------------------------------------------

TimeMs sample_association_ms(double distance_m, Rng& rng) {
  const AssociationTiming* row = &kAssociationTimings[0];
  for (const auto& r : kAssociationTimings) {
    if (std::fabs(r.distance_m - distance_m) < std::fabs(row->distance_m - distance_m)) {
      row = &r;
    }
  }
  const double mode =
      std::clamp(3.0 * row->average_ms - row->best_ms - row->worst_ms, row->best_ms, row->worst_ms);
  const Triangular dist{row->best_ms, mode, row->worst_ms};
  return std::max<TimeMs>(1, std::llround(dist.sample(rng)));
}

TimeMs sample_realignment_ms(Rng& rng) {
  static const TruncatedNormal dist = TruncatedNormal::from_mean_max(kRealignmentMeanMs, kRealignmentMaxMs);
  return std::max<TimeMs>(1, std::llround(dist.sample(rng)));
}

EpisodeSampler::EpisodeSampler(EpisodeDistributions dists) : dists_(std::move(dists)) {
  dists_.validate();
  cells_.reserve(dists_.cells.size());
  for (const auto& c : dists_.cells) {
    CellSamplers s{TruncatedNormal::from_mean_max(c.drop.mean_ms, c.drop.max_ms), std::nullopt,
                   TruncatedNormal::from_mean_max(c.dwell.mean_ms, c.dwell.max_ms), std::nullopt};
    if (c.recovery) {
      s.recovery = TruncatedNormal::from_mean_max(c.recovery->mean_ms, c.recovery->max_ms);
    }
    if (c.disconnect) {
      s.disconnect = TruncatedNormal::from_mean_max(c.disconnect->mean_ms, c.disconnect->max_ms);
    }
    cells_.push_back(std::move(s));
  }
}

TimeMs EpisodeSampler::draw(const TruncatedNormal& d, const TimingStat& stat, Rng& rng) const {
  const double v = dists_.timings_at_mean ? stat.mean_ms : d.sample(rng);
  return std::max<TimeMs>(1, std::llround(v));
}

BlockageEpisode EpisodeSampler::sample(Scenario scenario, double distance_m, Rng& rng,
                                       double q_initial, TimeMs onset_ms) const {
  const DistanceBucket bucket = nearest_bucket(distance_m);
  const std::size_t idx = cell_index(scenario, bucket);
  const BucketCalibration& cal = dists_.cells[idx];
  const CellSamplers& smp = cells_[idx];

  BlockageEpisode ep;
  ep.scenario = scenario;
  ep.onset_ms = onset_ms;
  ep.q_initial = std::clamp(q_initial, 0.0, 10.0);
  ep.drop_time_ms = draw(smp.drop, cal.drop, rng);
  if (smp.recovery) {
    ep.recovery_time_ms = draw(*smp.recovery, *cal.recovery, rng);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  const double sigma = dists_.dq_sigma;
  const double rho = dists_.dq_correlation;
  double dq_drop = std::clamp(cal.dq_drop_mean + sigma * z1, 0.0, ep.q_initial);
  if (scenario == Scenario::PermanentNoNlos) {
    // The link stays up at the blocked level until the disconnect time.
    dq_drop = std::min(dq_drop, std::max(0.0, ep.q_initial - kSustainedFloor));
  }
  double dq_rec = 0.0;
  if (scenario != Scenario::PermanentNoNlos) {
    const double z = rho * z1 + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * z2;
    dq_rec = std::clamp(cal.dq_recovery_mean + sigma * z, 0.0, dq_drop);
  }
  ep.q_blocked = ep.q_initial - dq_drop;
  ep.q_final = ep.q_blocked + dq_rec;

  const TimeMs standing = draw(smp.dwell, cal.dwell, rng);
  switch (scenario) {
    case Scenario::Transient:
      ep.dwell_ms = standing;
      break;
    case Scenario::PermanentNoNlos:
      ep.dwell_ms = standing;
      break;
    case Scenario::PermanentWithNlos:
      ep.hold_ms = standing;
      break;
  }
  if (smp.disconnect) {
    ep.disconnect_after_ms = draw(*smp.disconnect, *cal.disconnect, rng);
  }
  return ep;
}

BlockageEpisode sample_episode(Scenario scenario, double distance_m, Rng& rng, double q_initial) {
  static const EpisodeSampler sampler{};
  return sampler.sample(scenario, distance_m, rng, q_initial);
}

BlockageEpisode sample_episode(int scenario_id, double distance_m, Rng& rng, double q_initial) {
  return sample_episode(scenario_from_id(scenario_id), distance_m, rng, q_initial);
}

// ---------------------------------------------------------------------------

std::vector<double> episode_profile(const BlockageEpisode& ep, Rng& rng,
                                    const RenderOptions& options) {
  ep.validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ep.duration_ms()));

  const double drop = ep.q_blocked - ep.q_initial;
  for (TimeMs k = 0; k < ep.drop_time_ms; ++k) {
    out.push_back(ep.q_initial + drop * static_cast<double>(k + 1) / static_cast<double>(ep.drop_time_ms));
  }
  const bool spiky = ep.scenario == Scenario::PermanentNoNlos && options.spike_rate_per_s > 0.0;
  std::bernoulli_distribution spike(std::min(1.0, options.spike_rate_per_s / 1000.0));
  for (TimeMs k = 0; k < ep.dwell_ms; ++k) {
    double v = ep.q_blocked;
    if (spiky && spike(rng)) {
      v = std::min(10.0, v + options.spike_units);
    }
    out.push_back(v);
  }
  if (ep.recovery_time_ms) {
    const TimeMs tr = *ep.recovery_time_ms;
    const double rise = ep.q_final - ep.q_blocked;
    for (TimeMs k = 0; k < tr; ++k) {
      out.push_back(ep.q_blocked + rise * static_cast<double>(k + 1) / static_cast<double>(tr));
    }
  }
  out.insert(out.end(), static_cast<std::size_t>(ep.hold_ms), ep.q_final);

  if (ep.disconnect_after_ms) {
    const auto from = static_cast<std::size_t>(*ep.disconnect_after_ms);
    for (std::size_t k = from; k < out.size(); ++k) {
      out[k] = 0.0;
    }
  }
  return out;
}

double association_level(double baseline, TimeMs k, TimeMs ramp_ms) noexcept {
  const double target = std::round(std::clamp(baseline, 0.0, 10.0));
  if (k >= ramp_ms || target < 1.0) {
    return target;
  }
  return 0.5 + (target - 1.0) * static_cast<double>(k) / static_cast<double>(ramp_ms);
}

TimeMs segment_start(const Segment& s) noexcept {
  return std::visit(
      [](const auto& seg) -> TimeMs {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, BlockageEpisode>) {
          return seg.onset_ms;
        } else {
          return seg.start_ms;
        }
      },
      s);
}

namespace {

struct Resolved {
  TimeMs start;
  TimeMs length;
  const Segment* seg;
};

}  // namespace

Trace render_trace(std::span<const Segment> segments, const LinkConfig& cfg, Rng& rng,
                   const RenderOptions& options) {
  cfg.validate();
  const double baseline = baseline_quality(cfg).value();

  std::vector<Resolved> resolved;
  resolved.reserve(segments.size());
  TimeMs prev_end = 0;
  std::optional<TimeMs> first_association;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const TimeMs start = segment_start(s);
    if (start < 0) {
      throw std::invalid_argument("segment " + std::to_string(i) + " starts before t=0");
    }
    if (i > 0 && start < prev_end) {
      throw std::invalid_argument("overlapping segments: segment " + std::to_string(i) +
                                  " starts at " + std::to_string(start) +
                                  " ms before the previous one ends at " +
                                  std::to_string(prev_end) + " ms");
    }
    TimeMs length = 0;
    if (const auto* st = std::get_if<SteadySegment>(&s)) {
      length = st->duration_ms;
    } else if (const auto* as = std::get_if<AssociationSegment>(&s)) {
      length = as->ramp_ms ? *as->ramp_ms : sample_association_ms(cfg.distance_m, rng);
      if (!first_association) first_association = start;
    } else if (const auto* ra = std::get_if<RealignmentSegment>(&s)) {
      length = ra->duration_ms ? *ra->duration_ms : sample_realignment_ms(rng);
    } else {
      const auto& ep = std::get<BlockageEpisode>(s);
      ep.validate();
      length = ep.duration_ms();
    }
    if (length < 0) {
      throw std::invalid_argument("segment " + std::to_string(i) + " has negative duration");
    }
    resolved.push_back({start, length, &s});
    prev_end = start + length;
  }

  const TimeMs total = std::max(options.duration_ms, prev_end);
  std::vector<double> level(static_cast<std::size_t>(total), baseline);
  if (first_association) {
    std::fill(level.begin(), level.begin() + *first_association, 0.0);
  }

  for (const Resolved& r : resolved) {
    auto at = [&](TimeMs k) -> double& { return level[static_cast<std::size_t>(r.start + k)]; };
    if (std::holds_alternative<SteadySegment>(*r.seg)) {
      for (TimeMs k = 0; k < r.length; ++k) at(k) = baseline;
    } else if (std::holds_alternative<AssociationSegment>(*r.seg)) {
      for (TimeMs k = 0; k < r.length; ++k) at(k) = association_level(baseline, k, r.length);
    } else if (const auto* ra = std::get_if<RealignmentSegment>(r.seg)) {
      const double n = static_cast<double>(r.length) + 1.0;
      for (TimeMs k = 0; k < r.length; ++k) {
        const double depth = 1.0 - std::fabs(2.0 * static_cast<double>(k + 1) / n - 1.0);
        at(k) = std::max(0.0, baseline - ra->dip_units * depth);
      }
    } else {
      const auto profile = episode_profile(std::get<BlockageEpisode>(*r.seg), rng, options);
      for (TimeMs k = 0; k < r.length; ++k) at(k) = profile[static_cast<std::size_t>(k)];
    }
  }

  Trace trace;
  trace.start_ms = 0;
  trace.q.reserve(level.size());
  trace.throughput_mbps.reserve(level.size());
  for (double v : level) {
    const SignalQuality q = SignalQuality::clamped(std::round(v));
    trace.q.push_back(q.quantized());
    trace.throughput_mbps.push_back(static_cast<int>(std::lround(throughput_of(q, cfg.rate_cap_mbps))));
  }
  return trace;
}

}  // namespace wigig
