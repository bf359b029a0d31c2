#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wigig/blockage_detector.hpp"
#include "wigig/types.hpp"

namespace wigig {

struct HandoffConfig {
  TimeMs discovery_ms = 1500;
  TimeMs auth_ms = 400;
  TimeMs assoc_ms = 849;
  double corner_quality_floor = 2.0;
  bool corner_rule_enabled = true;
  bool blockage_handoff_enabled = true;
  DetectorConfig detector;

  /// t_H: discovery + authentication + association.
  TimeMs switch_duration_ms() const noexcept { return discovery_ms + auth_ms + assoc_ms; }

  /// Throws ConfigError.
  void validate() const;
};

/// t_s = t_D_th + t_R_th + t_dis + t_auth + t_as.
TimeMs total_switch_time(const HandoffConfig& cfg) noexcept;

enum class HandoffTrigger { LongTermBlockage, CornerEffect, Manual };

std::string_view to_string(HandoffTrigger t) noexcept;

struct HandoffRecord {
  HandoffTrigger trigger = HandoffTrigger::Manual;
  ApId from_ap = 0;
  ApId to_ap = 0;
  TimeMs t_start_ms = 0;
  TimeMs t_complete_ms = 0;
  TimeMs t_H_ms = 0;
  TimeMs t_s_ms = 0;

  friend bool operator==(const HandoffRecord&, const HandoffRecord&) = default;
};

inline constexpr std::string_view kHandoffHeader =
    "trigger,from_ap,to_ap,t_start_ms,t_complete_ms,t_H_ms,t_s_ms";

std::string handoff_row(const HandoffRecord& r);
std::string handoffs_to_csv(std::span<const HandoffRecord> records);

enum class StaMode { Disconnected, Associating, Associated, Characterizing, Switching };

std::string_view to_string(StaMode m) noexcept;

struct StaState {
  StaMode mode = StaMode::Disconnected;
  std::optional<ApId> current_ap;  // set iff Associated or Characterizing
  double last_q = 0.0;
};

struct ApCandidate {
  ApId id = 0;
  double predicted_q = 0.0;
};

/// Highest predicted quality, ties to the lowest id.
/// Throws std::invalid_argument on an empty list.
ApId select_target_ap(std::span<const ApCandidate> candidates);

/// Per-STA handoff state machine wrapping a BlockageDetector.
class HandoffController {
 public:
  /// Candidate APs other than `current` at time t.
  using CandidateFn = std::function<std::vector<ApCandidate>(TimeMs t, ApId current)>;
  /// Association ramp after the switch completes; 0 means immediate.
  using AssociationFn = std::function<TimeMs(ApId target)>;

  struct Output {
    std::vector<DetectorEvent> events;
    std::optional<HandoffRecord> record;
  };

  explicit HandoffController(HandoffConfig cfg, CandidateFn candidates = {},
                             AssociationFn association = {});

  /// Starts associating with `ap` at t. Only valid while Disconnected.
  void connect(TimeMs t, ApId ap, TimeMs association_ms = 0);

  /// Applies timed transitions (switch completion, end of association) up to t.
  std::optional<HandoffRecord> advance(TimeMs t);

  /// Feeds one quality sample of the serving link. Samples while Disconnected
  /// are counted and ignored; samples while Switching or Associating are ignored.
  Output on_sample(TimeMs t, double q);

  /// Reacts to a detector event. Throws InputError when the event is older than
  /// the last input.
  std::optional<HandoffRecord> on_detector_event(const DetectorEvent& event);

  /// Starts a switch regardless of link state. Returns false when not associated.
  bool start_manual_handoff(TimeMs t);

  const StaState& state() const noexcept { return state_; }
  const HandoffConfig& config() const noexcept { return cfg_; }
  const BlockageDetector& detector() const noexcept { return detector_; }
  std::size_t ignored_samples() const noexcept { return ignored_samples_; }
  std::optional<ApId> switch_target() const noexcept;

 private:
  void check_time(TimeMs t);
  bool begin_switch(TimeMs t, HandoffTrigger trigger);
  void enter_associated(ApId ap);

  HandoffConfig cfg_;
  CandidateFn candidates_;
  AssociationFn association_;
  BlockageDetector detector_;
  StaState state_;
  std::optional<TimeMs> last_t_;
  std::size_t ignored_samples_ = 0;

  struct PendingSwitch {
    HandoffTrigger trigger;
    ApId from;
    ApId to;
    TimeMs start;
    TimeMs complete;
  };
  std::optional<PendingSwitch> switching_;
  std::optional<ApId> associating_ap_;
  TimeMs association_end_ = 0;
};

}  // namespace wigig
