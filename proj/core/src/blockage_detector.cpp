#include "wigig/blockage_detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wigig/csv.hpp"

namespace wigig {

CentroidSet centroids_for(DistanceBucket bucket) noexcept {
  if (bucket == DistanceBucket::Near3m) {
    return {{{1, 7.5, 7.32}, {2, 7.20, 1.41}, {3, 3.40, 1.13}}};
  }
  return {{{1, 7.72, 7.64}, {2, 7.30, 1.56}, {3, 4.06, 1.20}}};
}

std::string_view to_string(DropWindowMode m) noexcept {
  return m == DropWindowMode::Anchored ? "anchored" : "tumbling";
}

DropWindowMode parse_drop_window_mode(std::string_view text) {
  if (text == "anchored") return DropWindowMode::Anchored;
  if (text == "tumbling") return DropWindowMode::Tumbling;
  throw ConfigError("unknown drop window mode '" + std::string(text) +
                    "' (expected anchored or tumbling)");
}

void DetectorConfig::validate() const {
  if (t_drop_threshold_ms <= 0) throw ConfigError("detector: t_drop_threshold_ms must be > 0");
  if (t_recovery_threshold_ms <= 0) {
    throw ConfigError("detector: t_recovery_threshold_ms must be > 0");
  }
  if (!(drop_trigger_units > 0.0)) throw ConfigError("detector: drop_trigger_units must be > 0");
  if (reference_window_ms <= 0) throw ConfigError("detector: reference_window_ms must be > 0");
  if (sample_period_ms <= 0) throw ConfigError("detector: sample_period_ms must be > 0");
  std::array<bool, 3> seen{};
  for (const auto& c : centroids) {
    if (c.scenario_id < 1 || c.scenario_id > 3 || seen[c.scenario_id - 1]) {
      throw ConfigError("detector: centroids need ids 1, 2 and 3 exactly once");
    }
    seen[c.scenario_id - 1] = true;
    if (!(c.x_c >= 0.0 && c.x_c <= 10.0 && c.y_c >= 0.0 && c.y_c <= 10.0)) {
      throw ConfigError("detector: centroid coordinates must lie in [0, 10]");
    }
  }
}

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::ShortTermBlockage ? "short_term" : "long_term";
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::BlockageIndication: return "blockage_indication";
    case EventKind::NoBlockage: return "no_blockage";
    case EventKind::Classified: return "classified";
  }
  return "?";
}

double euclidean_distance(const BlockageFeatures& f, const Centroid& c) noexcept {
  return std::hypot(f.x - c.x_c, f.y - c.y_c);
}

ClassificationResult classify(const BlockageFeatures& f, const CentroidSet& centroids) {
  ClassificationResult r;
  r.distances.fill(INFINITY);
  for (const auto& c : centroids) {
    if (c.scenario_id < 1 || c.scenario_id > 3) {
      throw std::invalid_argument("centroid id out of range");
    }
    r.distances[c.scenario_id - 1] = euclidean_distance(f, c);
  }
  r.chosen = 1;
  for (int id = 2; id <= 3; ++id) {
    if (r.distances[id - 1] < r.distances[r.chosen - 1]) r.chosen = id;
  }
  r.verdict = r.chosen == 2 ? Verdict::LongTermBlockage : Verdict::ShortTermBlockage;
  return r;
}

bool operator==(const DetectorEvent& a, const DetectorEvent& b) noexcept {
  if (a.kind != b.kind || a.at_ms != b.at_ms || a.features.x != b.features.x ||
      a.features.y != b.features.y || a.result.has_value() != b.result.has_value()) {
    return false;
  }
  if (!a.result) return true;
  return a.result->distances == b.result->distances && a.result->chosen == b.result->chosen &&
         a.result->verdict == b.result->verdict;
}

// ---------------------------------------------------------------------------

BlockageDetector::BlockageDetector(DetectorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

void BlockageDetector::reset() noexcept {
  phase_ = Phase::Watch;
  last_t_.reset();
  reference_.clear();
  x_ = y_ = 0.0;
  indicated_ = false;
}

void BlockageDetector::push_reference(TimeMs t, double q) {
  while (!reference_.empty() && reference_.back().q <= q) reference_.pop_back();
  reference_.push_back({t, q});
}

std::optional<double> BlockageDetector::reference_level(TimeMs now) {
  while (!reference_.empty() && reference_.front().t < now - cfg_.reference_window_ms) {
    reference_.pop_front();
  }
  if (reference_.empty()) return std::nullopt;
  return reference_.front().q;
}

void BlockageDetector::open_window(TimeMs t, double q_ref) {
  phase_ = Phase::Drop;
  q_ref_ = q_ref;
  window_end_ = t + cfg_.t_drop_threshold_ms - cfg_.sample_period_ms;
  x_ = 0.0;
  y_ = 0.0;
  q_min_ = INFINITY;
  t_min_ = t;
  indicated_ = false;
}

void BlockageDetector::track(TimeMs t, double q) {
  if (q < q_min_) {
    q_min_ = q;
    if (phase_ == Phase::Drop) t_min_ = t;
    y_ = 0.0;
  } else {
    y_ = std::max(y_, q - q_min_);
  }
}

void BlockageDetector::finish_drop_window(TimeMs t, std::vector<DetectorEvent>& out) {
  if (!indicated_) {
    out.push_back({EventKind::NoBlockage, t, {x_, 0.0}, std::nullopt});
    phase_ = Phase::Watch;
    return;
  }
  phase_ = Phase::Recovery;
  recovery_end_ = t_min_ + cfg_.t_recovery_threshold_ms - cfg_.sample_period_ms;
  maybe_classify(t, out);
}

void BlockageDetector::maybe_classify(TimeMs t, std::vector<DetectorEvent>& out) {
  if (t < recovery_end_) return;
  const BlockageFeatures f{x_, y_};
  out.push_back({EventKind::Classified, t, f, classify(f, cfg_.centroids)});
  reset();
  last_t_ = t;
}

std::vector<DetectorEvent> BlockageDetector::step(TimeMs t, double q) {
  if (!std::isfinite(q) || q < 0.0 || q > 10.0) {
    throw InputError("detector: q=" + format_number(q) + " at t=" + std::to_string(t) +
                     " is outside [0, 10]");
  }
  if (last_t_ && t != *last_t_ + cfg_.sample_period_ms) {
    throw InputError("detector: sample at t=" + std::to_string(t) + " does not follow t=" +
                     std::to_string(*last_t_) + " by one sample period");
  }
  last_t_ = t;

  std::vector<DetectorEvent> out;
  if (phase_ == Phase::Watch) {
    const auto ref = reference_level(t);
    if (cfg_.window_mode == DropWindowMode::Anchored) {
      if (ref && q < *ref) {
        open_window(t, *ref);
      }
    } else {
      open_window(t, ref ? std::max(*ref, q) : q);
    }
  }

  if (phase_ == Phase::Drop) {
    push_reference(t, q);
    x_ = std::max(x_, q_ref_ - q);
    track(t, q);
    const bool trigger = x_ > cfg_.drop_trigger_units;
    if (trigger && !indicated_ && cfg_.window_mode == DropWindowMode::Anchored) {
      indicated_ = true;
      out.push_back({EventKind::BlockageIndication, t, {x_, 0.0}, std::nullopt});
    }
    if (t >= window_end_) {
      if (trigger && !indicated_) {
        indicated_ = true;
        out.push_back({EventKind::BlockageIndication, t, {x_, 0.0}, std::nullopt});
      }
      finish_drop_window(t, out);
    }
  } else if (phase_ == Phase::Recovery) {
    track(t, q);
    maybe_classify(t, out);
  } else {
    push_reference(t, q);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string event_row(const DetectorEvent& e) {
  std::string row = std::to_string(e.at_ms);
  row += ',';
  row += to_string(e.kind);
  row += ',';
  row += format_number(e.features.x);
  row += ',';
  if (e.result) {
    row += format_number(e.features.y);
    for (double d : e.result->distances) {
      row += ',';
      row += format_number(d);
    }
    row += ',';
    row += std::to_string(e.result->chosen);
    row += ',';
    row += to_string(e.result->verdict);
  } else {
    row += ",,,,,";
  }
  return row;
}

std::string events_to_csv(std::span<const DetectorEvent> events) {
  std::string out(kEventHeader);
  out += '\n';
  for (const auto& e : events) {
    out += event_row(e);
    out += '\n';
  }
  return out;
}

}  // namespace wigig
