#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wigig/handoff_controller.hpp"
#include "wigig/link_model.hpp"
#include "wigig/random.hpp"

namespace wigig {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b) noexcept;

struct Waypoint {
  TimeMs t_ms = 0;
  Vec3 pos;
};

using Path = std::vector<Waypoint>;

/// Linear interpolation between waypoints, clamped at both ends.
/// Throws std::invalid_argument on an empty path.
Vec3 sta_position(std::span<const Waypoint> path, TimeMs t_ms);

/// Gap in a wall, as distances along the wall measured from its first endpoint.
struct Opening {
  double from_m = 0.0;
  double to_m = 0.0;
};

/// Vertical wall standing on the segment (x0, y0)-(x1, y1), floor to ceiling.
struct Wall {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  std::vector<Opening> openings;

  double length() const noexcept;
};

/// True when the horizontal projection of the STA-AP segment crosses a wall
/// outside every opening. Zero-length walls never occlude.
bool wall_occlusion(const Vec3& sta, const Vec3& ap, std::span<const Wall> walls);

enum class InterferenceGeometry { DeafScenario1, MutualSenseScenario2 };

std::string_view to_string(InterferenceGeometry g) noexcept;
InterferenceGeometry parse_interference_geometry(std::string_view text);

struct InterferenceModel {
  double deaf_alpha = 1.0;  // Beta(alpha, beta) throughput factor, mean 0.25
  double deaf_beta = 3.0;
  TimeMs resample_ms = 1000;
  double mutual_factor = 0.85;
};

/// Throughput factor for the primary link. Inactive interference gives 1.
double apply_interference(InterferenceGeometry geometry, bool interferer_active,
                          const InterferenceModel& model, Rng& rng);

struct ApConfig {
  ApId id = 1;
  Vec3 position;
  double boresight_deg = 0.0;
  Environment environment = Environment::IndoorRoom;
};

struct StaConfig {
  int id = 1;
  Path path;
  ApId initial_ap = 1;
};

struct BlockageEventConfig {
  int sta_id = 1;
  Scenario scenario = Scenario::Transient;
  TimeMs onset_ms = 0;
  /// Overrides the sampled dwell (scenarios 1, 2) or hold (scenario 3).
  std::optional<TimeMs> standing_ms;
};

struct AutoBlockageConfig {
  double mean_interval_ms = 30000.0;
  std::vector<Scenario> scenarios{Scenario::Transient, Scenario::PermanentNoNlos,
                                  Scenario::PermanentWithNlos};
};

struct InterferenceConfig {
  InterferenceGeometry geometry = InterferenceGeometry::DeafScenario1;
  int victim_sta = 1;
  TimeMs active_from_ms = 0;
  std::optional<TimeMs> active_until_ms;
  InterferenceModel model;

  bool active_at(TimeMs t) const noexcept {
    return t >= active_from_ms && (!active_until_ms || t < *active_until_ms);
  }
};

struct ScenarioConfig {
  TimeMs duration_ms = 10000;
  std::vector<ApConfig> aps;
  std::vector<StaConfig> stas;
  std::vector<Wall> walls;
  std::vector<BlockageEventConfig> blockage_events;
  std::optional<AutoBlockageConfig> auto_blockage;
  std::optional<InterferenceConfig> interference;
  std::uint64_t seed = 60;

  bool traffic_active = true;
  double rate_cap_mbps = 1000.0;
  /// Start associated at t=0; otherwise the run begins with an association ramp.
  bool start_associated = true;
  /// Pick detector centroids from the initial STA-AP distance bucket.
  bool centroids_by_distance = true;
  AntennaPattern antenna;
  EpisodeDistributions distributions = EpisodeDistributions::defaults();
  HandoffConfig handoff;

  /// Throws ConfigError with a description of the first problem found.
  void validate() const;
};

struct EpisodeLog {
  BlockageEpisode episode;
  ApId ap = 0;
  std::optional<TimeMs> t_dc_ms;  // onset to first zero-throughput tick on the blocked link
};

struct StaLog {
  int sta_id = 0;
  Trace trace;                  // quality and throughput of the serving link
  std::vector<int> serving_ap;  // -1 while not associated
  std::vector<DetectorEvent> events;
  std::vector<HandoffRecord> handoffs;
  std::vector<EpisodeLog> episodes;
  std::size_t ignored_samples = 0;
};

struct InterferenceSummary {
  int victim_sta = 0;
  double pre_mean_mbps = 0.0;
  double during_mean_mbps = 0.0;
};

struct SimLog {
  TimeMs duration_ms = 0;
  std::uint64_t seed = 0;
  std::vector<StaLog> stas;
  std::optional<InterferenceSummary> interference;

  std::vector<TimeMs> disconnection_times() const;
};

/// Quality of the unblocked STA-AP link, before quantization.
double link_quality(const ScenarioConfig& cfg, const ApConfig& ap, const Vec3& sta);

SimLog run(const ScenarioConfig& cfg);

std::string summary_json(const SimLog& log);

inline constexpr std::string_view kEpisodeHeader =
    "ap,scenario,onset_ms,t_D_ms,t_R_ms,dwell_ms,hold_ms,q_I,q_B,q_F,t_DC_ms";

/// Writes trace_<sta>.csv, link_<sta>.csv, events_<sta>.csv, handoffs_<sta>.csv,
/// episodes_<sta>.csv and summary.json into `dir`, creating it if needed.
void write_sim_log(const SimLog& log, const std::filesystem::path& dir);

}  // namespace wigig
