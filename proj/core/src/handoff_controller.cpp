#include "wigig/handoff_controller.hpp"

#include <stdexcept>

namespace wigig {

void HandoffConfig::validate() const {
  if (discovery_ms < 0 || auth_ms < 0 || assoc_ms < 0) {
    throw ConfigError("handoff: phase durations must be >= 0");
  }
  if (!(corner_quality_floor >= 0.0 && corner_quality_floor <= 10.0)) {
    throw ConfigError("handoff: corner_quality_floor must lie in [0, 10]");
  }
  detector.validate();
}

TimeMs total_switch_time(const HandoffConfig& cfg) noexcept {
  return cfg.detector.t_drop_threshold_ms + cfg.detector.t_recovery_threshold_ms +
         cfg.switch_duration_ms();
}

std::string_view to_string(HandoffTrigger t) noexcept {
  switch (t) {
    case HandoffTrigger::LongTermBlockage: return "long_term_blockage";
    case HandoffTrigger::CornerEffect: return "corner_effect";
    case HandoffTrigger::Manual: return "manual";
  }
  return "?";
}

std::string_view to_string(StaMode m) noexcept {
  switch (m) {
    case StaMode::Disconnected: return "disconnected";
    case StaMode::Associating: return "associating";
    case StaMode::Associated: return "associated";
    case StaMode::Characterizing: return "characterizing";
    case StaMode::Switching: return "switching";
  }
  return "?";
}

std::string handoff_row(const HandoffRecord& r) {
  std::string row(to_string(r.trigger));
  for (TimeMs v : {TimeMs{r.from_ap}, TimeMs{r.to_ap}, r.t_start_ms, r.t_complete_ms, r.t_H_ms,
                   r.t_s_ms}) {
    row += ',';
    row += std::to_string(v);
  }
  return row;
}

std::string handoffs_to_csv(std::span<const HandoffRecord> records) {
  std::string out(kHandoffHeader);
  out += '\n';
  for (const auto& r : records) {
    out += handoff_row(r);
    out += '\n';
  }
  return out;
}

ApId select_target_ap(std::span<const ApCandidate> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_target_ap: no candidate APs");
  }
  const ApCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.predicted_q > best->predicted_q ||
        (c.predicted_q == best->predicted_q && c.id < best->id)) {
      best = &c;
    }
  }
  return best->id;
}

// ---------------------------------------------------------------------------

HandoffController::HandoffController(HandoffConfig cfg, CandidateFn candidates,
                                     AssociationFn association)
    : cfg_(std::move(cfg)),
      candidates_(std::move(candidates)),
      association_(std::move(association)),
      detector_((cfg_.validate(), cfg_.detector)) {}

std::optional<ApId> HandoffController::switch_target() const noexcept {
  if (switching_) return switching_->to;
  return associating_ap_;
}

void HandoffController::check_time(TimeMs t) {
  if (last_t_ && t < *last_t_) {
    throw InputError("handoff: input at t=" + std::to_string(t) + " is older than t=" +
                     std::to_string(*last_t_));
  }
  last_t_ = t;
}

void HandoffController::enter_associated(ApId ap) {
  state_.mode = StaMode::Associated;
  state_.current_ap = ap;
  associating_ap_.reset();
  detector_.reset();
}

void HandoffController::connect(TimeMs t, ApId ap, TimeMs association_ms) {
  check_time(t);
  if (state_.mode != StaMode::Disconnected) {
    throw std::logic_error("connect: STA is not disconnected");
  }
  if (association_ms <= 0) {
    enter_associated(ap);
    return;
  }
  state_.mode = StaMode::Associating;
  associating_ap_ = ap;
  association_end_ = t + association_ms;
}

std::optional<HandoffRecord> HandoffController::advance(TimeMs t) {
  check_time(t);
  std::optional<HandoffRecord> record;
  if (state_.mode == StaMode::Switching && t >= switching_->complete) {
    const PendingSwitch& s = *switching_;
    const TimeMs t_h = cfg_.switch_duration_ms();
    const TimeMs characterization =
        s.trigger == HandoffTrigger::LongTermBlockage
            ? cfg_.detector.t_drop_threshold_ms + cfg_.detector.t_recovery_threshold_ms
            : 0;
    record = HandoffRecord{s.trigger, s.from, s.to, s.start, s.complete, t_h,
                           characterization + t_h};
    const TimeMs ramp = association_ ? association_(s.to) : 0;
    associating_ap_ = s.to;
    association_end_ = s.complete + ramp;
    switching_.reset();
    state_.mode = StaMode::Associating;
  }
  if (state_.mode == StaMode::Associating && t >= association_end_) {
    enter_associated(*associating_ap_);
  }
  return record;
}

bool HandoffController::begin_switch(TimeMs t, HandoffTrigger trigger) {
  const ApId from = *state_.current_ap;
  std::vector<ApCandidate> candidates;
  if (candidates_) {
    for (const auto& c : candidates_(t, from)) {
      if (c.id != from) candidates.push_back(c);
    }
  }
  detector_.reset();
  state_.current_ap.reset();
  if (candidates.empty()) {
    state_.mode = StaMode::Disconnected;
    return false;
  }
  const ApId to = select_target_ap(candidates);
  switching_ = PendingSwitch{trigger, from, to, t, t + cfg_.switch_duration_ms()};
  state_.mode = StaMode::Switching;
  return true;
}

bool HandoffController::start_manual_handoff(TimeMs t) {
  check_time(t);
  if (!state_.current_ap) return false;
  begin_switch(t, HandoffTrigger::Manual);
  return true;
}

HandoffController::Output HandoffController::on_sample(TimeMs t, double q) {
  Output out;
  out.record = advance(t);
  state_.last_q = q;
  switch (state_.mode) {
    case StaMode::Disconnected:
      ++ignored_samples_;
      return out;
    case StaMode::Switching:
    case StaMode::Associating:
      return out;
    case StaMode::Associated:
    case StaMode::Characterizing:
      break;
  }
  if (cfg_.corner_rule_enabled && q < cfg_.corner_quality_floor) {
    begin_switch(t, HandoffTrigger::CornerEffect);
    return out;
  }
  const auto last = detector_.last_time();
  if (last && t != *last + cfg_.detector.sample_period_ms) {
    detector_.reset();
  }
  out.events = detector_.step(t, q);
  for (const auto& e : out.events) {
    on_detector_event(e);
  }
  return out;
}

std::optional<HandoffRecord> HandoffController::on_detector_event(const DetectorEvent& event) {
  check_time(event.at_ms);
  if (state_.mode != StaMode::Associated && state_.mode != StaMode::Characterizing) {
    return std::nullopt;
  }
  switch (event.kind) {
    case EventKind::NoBlockage:
      break;
    case EventKind::BlockageIndication:
      state_.mode = StaMode::Characterizing;
      break;
    case EventKind::Classified: {
      const bool long_term =
          event.result && event.result->verdict == Verdict::LongTermBlockage;
      if (long_term && cfg_.blockage_handoff_enabled) {
        begin_switch(event.at_ms, HandoffTrigger::LongTermBlockage);
      } else {
        state_.mode = StaMode::Associated;
        detector_.reset();
      }
      break;
    }
  }
  return std::nullopt;
}

}  // namespace wigig
