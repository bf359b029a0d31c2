#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wigig/blockage_detector.hpp"
#include "wigig/link_model.hpp"

namespace wigig {

struct AccuracyCell {
  TimeMs t_drop_threshold_ms = 0;
  TimeMs t_recovery_threshold_ms = 0;
  int permanent_trials = 0;     // scenario 2
  int permanent_long_term = 0;
  int transient_trials = 0;     // scenario 1
  int transient_short_term = 0;
  int nlos_trials = 0;          // scenario 3
  int nlos_short_term = 0;

  double a_p() const noexcept;
  double a_t() const noexcept;
  double a_nlos() const noexcept;

  friend bool operator==(const AccuracyCell&, const AccuracyCell&) = default;
};

struct AccuracyTable {
  std::vector<AccuracyCell> rows;

  /// Throws std::out_of_range when the pair was not swept.
  const AccuracyCell& at(TimeMs t_drop_threshold_ms, TimeMs t_recovery_threshold_ms) const;
};

struct SweepConfig {
  std::vector<TimeMs> t_drop_thresholds_ms{250, 500, 750};
  std::vector<TimeMs> t_recovery_thresholds_ms{1000, 3000, 6000};
  int trials_per_cell = 500;
  std::uint64_t seed = 60;
  double distance_m = 7.0;
  Environment environment = Environment::IndoorRoom;
  unsigned jobs = 1;
  TimeMs lead_in_ms = 1000;
  EpisodeDistributions distributions = EpisodeDistributions::defaults();
  /// Template for every cell; thresholds are overwritten per cell.
  DetectorConfig detector;

  /// Throws ConfigError.
  void validate() const;
};

/// Trace used for one sweep trial: steady lead-in, then one episode.
Trace sweep_trial_trace(const SweepConfig& cfg, Scenario scenario, int trial);

/// Verdict of the first Classified event, if any.
std::optional<ClassificationResult> first_classification(const Trace& trace,
                                                         const DetectorConfig& detector);

AccuracyTable accuracy_sweep(const SweepConfig& cfg);

struct DisruptionStats {
  double distance_m = 0.0;
  std::vector<double> durations_s;  // sorted ascending
  double mean_s = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (duration_s, P[D <= duration])
};

/// Transient-blockage throughput disruption: the span during which throughput
/// stays below half of its pre-blockage level. `distance_m` must be 3 or 7.
DisruptionStats disruption_stats(int n_trials, double distance_m, std::uint64_t seed,
                                 const EpisodeDistributions& dists = EpisodeDistributions::defaults(),
                                 unsigned jobs = 1);

struct ReplaySummary {
  std::vector<DetectorEvent> events;
  int indications = 0;
  int short_term = 0;
  int long_term = 0;
};

ReplaySummary replay(const Trace& trace, const DetectorConfig& cfg = {});

struct TimingRow {
  Scenario scenario = Scenario::Transient;
  DistanceBucket bucket = DistanceBucket::Near3m;
  int trials = 0;
  double t_drop_mean_ms = 0.0;
  double t_drop_max_ms = 0.0;
  std::optional<double> t_recovery_mean_ms;
  std::optional<double> t_recovery_max_ms;
  double dq_drop_mean = 0.0;
  double dq_recovery_mean = 0.0;

  friend bool operator==(const TimingRow&, const TimingRow&) = default;
};

std::vector<TimingRow> timing_summary(int n_trials, std::uint64_t seed,
                                      const EpisodeDistributions& dists = EpisodeDistributions::defaults());

std::string accuracy_to_csv(const AccuracyTable& table);
std::string accuracy_to_json(const AccuracyTable& table, const SweepConfig& cfg);
std::string disruption_to_csv(const std::vector<DisruptionStats>& stats);
std::string timing_to_csv(const std::vector<TimingRow>& rows);
std::string replay_to_json(const ReplaySummary& summary);

}  // namespace wigig
