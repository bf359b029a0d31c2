#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wigig/eval_harness.hpp"
#include "wigig/handoff_controller.hpp"
#include "wigig/link_model.hpp"
#include "wigig/picocell_sim.hpp"

namespace wigig {

inline constexpr std::uint64_t kDefaultSeed = 60;

/// One entry of the `trace.segments` list. Blockage segments are sampled at
/// build time from the episode distributions.
struct TraceSegmentSpec {
  enum class Kind { Steady, Association, Realignment, Blockage };
  Kind kind = Kind::Steady;
  TimeMs start_ms = 0;
  std::optional<TimeMs> duration_ms;  // steady length, association ramp, realignment length
  Scenario scenario = Scenario::Transient;
  std::optional<TimeMs> standing_ms;
  double dip_units = 4.0;
};

struct TraceConfig {
  TimeMs duration_ms = 10000;
  std::vector<TraceSegmentSpec> segments;
};

struct AppConfig {
  std::uint64_t seed = kDefaultSeed;
  LinkConfig link;
  EpisodeDistributions distributions = EpisodeDistributions::defaults();
  DetectorConfig detector;
  HandoffConfig handoff;
  ScenarioConfig scenario;
  SweepConfig sweep;
  TraceConfig trace;
};

/// Parses and validates a configuration document. Unknown keys and type
/// mismatches are rejected. Throws ConfigError naming the offending key.
AppConfig config_from_json(const nlohmann::json& doc);

/// Reads a JSON file. Throws ConfigError when missing or malformed.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Applies `a.b.c=value`. The value is taken as JSON when it parses, else as a
/// string. Numeric path components index into arrays.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Samples blockage segments and returns the concrete segment list.
std::vector<Segment> build_segments(const TraceConfig& trace, const LinkConfig& link,
                                    const EpisodeDistributions& dists, Rng& rng);

}  // namespace wigig
