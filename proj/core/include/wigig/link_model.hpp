#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wigig/random.hpp"
#include "wigig/types.hpp"

namespace wigig {

// ---------------------------------------------------------------------------
// Static link characteristics
// ---------------------------------------------------------------------------

struct LinkConfig {
  double distance_m = 3.0;
  Environment environment = Environment::IndoorRoom;
  bool traffic_active = true;
  double boresight_offset_deg = 0.0;
  double rate_cap_mbps = 1000.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Azimuth coverage of the consumer-grade 2x8 arrays: flat inside a 180 degree
/// main sector, a constant back-sector level outside, linear taper in between.
struct AntennaPattern {
  double main_sector_deg = 180.0;
  double taper_deg = 20.0;
  double back_factor = 0.2;
};

double azimuth_gain(double offset_deg, const AntennaPattern& pattern = {}) noexcept;

/// Quality-vs-distance profile for one environment. Quality is flat at
/// `peak_q` up to `knee_m`, then falls linearly to `edge_q` at the maximum
/// range and is zero (disconnected) beyond it.
struct RangeProfile {
  double peak_q;
  double knee_m;
  double edge_q;
  double max_range_traffic_m;
  double max_range_idle_m;
};

RangeProfile range_profile(Environment env) noexcept;

SignalQuality baseline_quality(const LinkConfig& cfg, const AntennaPattern& pattern = {});

/// Default q -> throughput step table (Mbps, before the rate cap), indexed by floor(q).
inline constexpr std::array<double, 11> kThroughputTableMbps = {
    0.0, 100.0, 250.0, 400.0, 550.0, 700.0, 770.0, 850.0, 900.0, 900.0, 950.0};

double throughput_of(SignalQuality q, double cap_mbps);

// ---------------------------------------------------------------------------
// Blockage episodes and their calibration tables
// ---------------------------------------------------------------------------

struct BlockageEpisode {
  Scenario scenario = Scenario::Transient;
  double q_initial = 9.0;
  double q_blocked = 1.0;
  double q_final = 9.0;
  TimeMs drop_time_ms = 1;
  std::optional<TimeMs> recovery_time_ms;  // absent for PermanentNoNlos
  TimeMs dwell_ms = 0;                     // time spent at q_blocked
  TimeMs hold_ms = 0;                      // time spent at q_final after recovery
  TimeMs onset_ms = 0;
  std::optional<TimeMs> disconnect_after_ms;  // link dies this long after onset

  double drop_delta() const noexcept { return q_initial - q_blocked; }
  double recovery_delta() const noexcept { return q_final - q_blocked; }
  TimeMs duration_ms() const noexcept {
    return drop_time_ms + dwell_ms + recovery_time_ms.value_or(0) + hold_ms;
  }
  TimeMs end_ms() const noexcept { return onset_ms + duration_ms(); }

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Mean and maximum of a measured duration.
struct TimingStat {
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

/// One (scenario, distance) cell of the measured blockage tables.
struct BucketCalibration {
  TimingStat drop;                     // t_D
  std::optional<TimingStat> recovery;  // t_R, NA for scenario 2
  double dq_drop_mean = 0.0;           // x_c
  double dq_recovery_mean = 0.0;       // y_c
  TimingStat dwell;                    // bottom dwell (S1) or standing time (S2, S3)
  std::optional<TimingStat> disconnect;  // t_DC
};

struct EpisodeDistributions {
  std::array<BucketCalibration, 6> cells{};

  double dq_sigma = 0.7;
  double dq_correlation = 0.8;
  double spike_rate_per_s = 0.05;  // scenario 2 ground-reflection spikes
  double spike_units = 2.0;
  /// Collapse every timing distribution onto its mean (used for noise-free checks).
  bool timings_at_mean = false;

  static EpisodeDistributions defaults();

  /// Copy with zero Δq spread, timings fixed at their means and no spikes.
  EpisodeDistributions zero_noise() const;

  BucketCalibration& at(Scenario s, DistanceBucket b) noexcept;
  const BucketCalibration& at(Scenario s, DistanceBucket b) const noexcept;

  /// Throws ConfigError.
  void validate() const;
};

/// Association time table (best / worst / average, ms) at 1, 4 and 10 m.
struct AssociationTiming {
  double distance_m;
  double best_ms;
  double worst_ms;
  double average_ms;
};

inline constexpr std::array<AssociationTiming, 3> kAssociationTimings = {{
    {1.0, 146.28, 386.14, 247.47},
    {4.0, 153.34, 375.56, 245.4},
    {10.0, 172.12, 324.58, 243.75},
}};

inline constexpr double kRealignmentMeanMs = 7.65;
inline constexpr double kRealignmentMaxMs = 15.0;

/// Association duration for the nearest measured distance row.
TimeMs sample_association_ms(double distance_m, Rng& rng);
TimeMs sample_realignment_ms(Rng& rng);

/// Samplers with the truncated-normal parameters solved once.
class EpisodeSampler {
 public:
  explicit EpisodeSampler(EpisodeDistributions dists = EpisodeDistributions::defaults());

  /// Draws one episode at `onset_ms`. `q_initial` is the pre-blockage quality.
  BlockageEpisode sample(Scenario scenario, double distance_m, Rng& rng, double q_initial = 9.0,
                         TimeMs onset_ms = 0) const;

  const EpisodeDistributions& distributions() const noexcept { return dists_; }

 private:
  struct CellSamplers {
    TruncatedNormal drop;
    std::optional<TruncatedNormal> recovery;
    TruncatedNormal dwell;
    std::optional<TruncatedNormal> disconnect;
  };

  TimeMs draw(const TruncatedNormal& d, const TimingStat& stat, Rng& rng) const;

  EpisodeDistributions dists_;
  std::vector<CellSamplers> cells_;
};

/// Convenience wrapper over EpisodeSampler with the default tables.
BlockageEpisode sample_episode(Scenario scenario, double distance_m, Rng& rng,
                               double q_initial = 9.0);
BlockageEpisode sample_episode(int scenario_id, double distance_m, Rng& rng,
                               double q_initial = 9.0);

// ---------------------------------------------------------------------------
// Trace rendering
// ---------------------------------------------------------------------------

/// Uniformly sampled quality trace, one entry per millisecond.
struct Trace {
  TimeMs start_ms = 0;
  std::vector<int> q;
  std::vector<int> throughput_mbps;  // empty when absent, else same length as q

  std::size_t size() const noexcept { return q.size(); }
  bool empty() const noexcept { return q.empty(); }
  TimeMs time_at(std::size_t i) const noexcept { return start_ms + static_cast<TimeMs>(i); }
  bool has_throughput() const noexcept { return !throughput_mbps.empty(); }
};

struct SteadySegment {
  TimeMs start_ms = 0;
  TimeMs duration_ms = 0;
};

/// Quality rises from the first registered value to the baseline. The ramp
/// length is sampled from the association-time table when not given.
struct AssociationSegment {
  TimeMs start_ms = 0;
  std::optional<TimeMs> ramp_ms;
};

struct RealignmentSegment {
  TimeMs start_ms = 0;
  std::optional<TimeMs> duration_ms;
  double dip_units = 4.0;
};

using Segment = std::variant<SteadySegment, AssociationSegment, RealignmentSegment, BlockageEpisode>;

struct RenderOptions {
  /// Trace length; extended to cover the last segment when shorter.
  TimeMs duration_ms = 0;
  double spike_rate_per_s = 0.05;
  double spike_units = 2.0;
};

/// Real-valued quality profile of one episode, one value per ms of
/// `episode.duration_ms()`, before quantization.
std::vector<double> episode_profile(const BlockageEpisode& episode, Rng& rng,
                                    const RenderOptions& options = {});

/// Association ramp value `k` ms after the first registered sample; reaches
/// the rounded baseline exactly at `ramp_ms`.
double association_level(double baseline, TimeMs k, TimeMs ramp_ms) noexcept;

TimeMs segment_start(const Segment& s) noexcept;

/// Throws std::invalid_argument when segments overlap or are out of order.
Trace render_trace(std::span<const Segment> segments, const LinkConfig& cfg, Rng& rng,
                   const RenderOptions& options = {});

}  // namespace wigig
