#pragma once

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wigig/types.hpp"

namespace wigig {

struct Centroid {
  int scenario_id = 1;
  double x_c = 0.0;  // mean Δq_D
  double y_c = 0.0;  // mean Δq_R
};

using CentroidSet = std::array<Centroid, 3>;

/// Measured cluster centres for one distance bucket.
CentroidSet centroids_for(DistanceBucket bucket) noexcept;

enum class DropWindowMode {
  Anchored,  // window opens at the first sample below the reference
  Tumbling,  // fixed back-to-back windows, trigger checked at window end
};

std::string_view to_string(DropWindowMode m) noexcept;
DropWindowMode parse_drop_window_mode(std::string_view text);

struct DetectorConfig {
  TimeMs t_drop_threshold_ms = 500;
  TimeMs t_recovery_threshold_ms = 3000;
  double drop_trigger_units = 2.0;
  TimeMs reference_window_ms = 500;
  DropWindowMode window_mode = DropWindowMode::Anchored;
  CentroidSet centroids = centroids_for(DistanceBucket::Far7m);
  TimeMs sample_period_ms = 1;

  /// Throws ConfigError.
  void validate() const;
};

struct BlockageFeatures {
  double x = 0.0;  // max Δq_D in the drop window
  double y = 0.0;  // max Δq_R in the recovery window
};

enum class Verdict { ShortTermBlockage, LongTermBlockage };

std::string_view to_string(Verdict v) noexcept;

struct ClassificationResult {
  std::array<double, 3> distances{};  // ED_1..ED_3, indexed by scenario id - 1
  int chosen = 1;
  Verdict verdict = Verdict::ShortTermBlockage;
};

double euclidean_distance(const BlockageFeatures& f, const Centroid& c) noexcept;

/// Nearest centroid; ties go to the lowest scenario id.
ClassificationResult classify(const BlockageFeatures& f, const CentroidSet& centroids);

enum class EventKind { BlockageIndication, NoBlockage, Classified };

std::string_view to_string(EventKind k) noexcept;

struct DetectorEvent {
  EventKind kind = EventKind::NoBlockage;
  TimeMs at_ms = 0;
  BlockageFeatures features;  // y is meaningful for Classified only
  std::optional<ClassificationResult> result;

  friend bool operator==(const DetectorEvent& a, const DetectorEvent& b) noexcept;
};

/// Streaming blockage characterization over 1 ms signal-quality samples.
///
/// Watch: track the reference level (max q over the last reference window).
/// Drop: for t_D_th ms, accumulate x, the largest fall below the reference.
///   BlockageIndication fires as soon as x exceeds the trigger; a window that
///   ends without it yields NoBlockage.
/// Recovery: until t_R_th ms after the minimum, accumulate y, the largest
///   rise above the minimum. Then Classified is emitted and the detector resets.
class BlockageDetector {
 public:
  enum class Phase { Watch, Drop, Recovery };

  explicit BlockageDetector(DetectorConfig cfg = {});

  /// Feeds one sample. Returns zero, one or two events stamped `t_ms`.
  /// Throws InputError when `t_ms` is not exactly one sample period after the
  /// previous sample or when q is outside [0, 10].
  std::vector<DetectorEvent> step(TimeMs t_ms, double q);

  void reset() noexcept;

  Phase phase() const noexcept { return phase_; }
  const DetectorConfig& config() const noexcept { return cfg_; }
  std::size_t buffered_samples() const noexcept { return reference_.size(); }
  std::optional<TimeMs> last_time() const noexcept { return last_t_; }

 private:
  struct RefSample {
    TimeMs t;
    double q;
  };

  void push_reference(TimeMs t, double q);
  std::optional<double> reference_level(TimeMs now);
  void open_window(TimeMs t, double q_ref);
  void track(TimeMs t, double q);
  void finish_drop_window(TimeMs t, std::vector<DetectorEvent>& out);
  void maybe_classify(TimeMs t, std::vector<DetectorEvent>& out);

  DetectorConfig cfg_;
  Phase phase_ = Phase::Watch;
  std::optional<TimeMs> last_t_;
  std::deque<RefSample> reference_;  // decreasing q, for the sliding maximum

  TimeMs window_end_ = 0;
  TimeMs recovery_end_ = 0;
  double q_ref_ = 0.0;
  double q_min_ = 0.0;
  TimeMs t_min_ = 0;
  double x_ = 0.0;
  double y_ = 0.0;
  bool indicated_ = false;
};

inline constexpr std::string_view kEventHeader = "at_ms,kind,x,y,ed1,ed2,ed3,chosen,verdict";

std::string event_row(const DetectorEvent& e);
std::string events_to_csv(std::span<const DetectorEvent> events);

}  // namespace wigig
