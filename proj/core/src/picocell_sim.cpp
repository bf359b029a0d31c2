#include "wigig/picocell_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wigig/csv.hpp"
#include "wigig/trace_io.hpp"

namespace wigig {

double distance(const Vec3& a, const Vec3& b) noexcept {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

Vec3 sta_position(std::span<const Waypoint> path, TimeMs t_ms) {
  if (path.empty()) {
    throw std::invalid_argument("sta_position: empty path");
  }
  if (t_ms <= path.front().t_ms) return path.front().pos;
  if (t_ms >= path.back().t_ms) return path.back().pos;
  const auto next = std::upper_bound(path.begin(), path.end(), t_ms,
                                     [](TimeMs t, const Waypoint& w) { return t < w.t_ms; });
  const Waypoint& b = *next;
  const Waypoint& a = *(next - 1);
  const double f = static_cast<double>(t_ms - a.t_ms) / static_cast<double>(b.t_ms - a.t_ms);
  return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y),
          a.pos.z + f * (b.pos.z - a.pos.z)};
}

double Wall::length() const noexcept { return std::hypot(x1 - x0, y1 - y0); }

bool wall_occlusion(const Vec3& sta, const Vec3& ap, std::span<const Wall> walls) {
  constexpr double kEps = 1e-12;
  const double px = sta.x;
  const double py = sta.y;
  const double rx = ap.x - sta.x;
  const double ry = ap.y - sta.y;
  for (const Wall& w : walls) {
    const double len = w.length();
    if (len < kEps) continue;
    const double sx = w.x1 - w.x0;
    const double sy = w.y1 - w.y0;
    const double denom = rx * sy - ry * sx;
    if (std::fabs(denom) < kEps) continue;
    const double qx = w.x0 - px;
    const double qy = w.y0 - py;
    const double s = (qx * sy - qy * sx) / denom;  // along the link
    const double u = (qx * ry - qy * rx) / denom;  // along the wall
    if (s < 0.0 || s > 1.0 || u < 0.0 || u > 1.0) continue;
    const double along = u * len;
    const bool in_opening = std::any_of(w.openings.begin(), w.openings.end(), [&](const Opening& o) {
      return along >= o.from_m && along <= o.to_m;
    });
    if (!in_opening) return true;
  }
  return false;
}

std::string_view to_string(InterferenceGeometry g) noexcept {
  return g == InterferenceGeometry::DeafScenario1 ? "deaf_scenario1" : "mutual_sense_scenario2";
}

InterferenceGeometry parse_interference_geometry(std::string_view text) {
  if (text == "deaf_scenario1" || text == "deaf") return InterferenceGeometry::DeafScenario1;
  if (text == "mutual_sense_scenario2" || text == "mutual") {
    return InterferenceGeometry::MutualSenseScenario2;
  }
  throw ConfigError("unknown interference geometry '" + std::string(text) + "'");
}

double apply_interference(InterferenceGeometry geometry, bool interferer_active,
                          const InterferenceModel& model, Rng& rng) {
  if (!interferer_active) return 1.0;
  if (geometry == InterferenceGeometry::MutualSenseScenario2) return model.mutual_factor;
  std::gamma_distribution<double> ga(model.deaf_alpha, 1.0);
  std::gamma_distribution<double> gb(model.deaf_beta, 1.0);
  const double a = ga(rng);
  const double b = gb(rng);
  return a + b > 0.0 ? a / (a + b) : 0.0;
}

// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (duration_ms <= 0) throw ConfigError("scenario: duration_ms must be > 0");
  if (aps.empty()) throw ConfigError("scenario: at least one AP is required");
  if (stas.empty()) throw ConfigError("scenario: at least one STA is required");
  if (!(rate_cap_mbps > 0.0)) throw ConfigError("scenario: rate_cap_mbps must be > 0");

  std::set<ApId> ap_ids;
  for (const auto& ap : aps) {
    if (!ap_ids.insert(ap.id).second) {
      throw ConfigError("scenario: duplicate AP id " + std::to_string(ap.id));
    }
    if (ap.id < 0) throw ConfigError("scenario: AP ids must be >= 0");
  }
  std::set<int> sta_ids;
  for (const auto& sta : stas) {
    const std::string where = "scenario: STA " + std::to_string(sta.id);
    if (!sta_ids.insert(sta.id).second) throw ConfigError("scenario: duplicate STA id " + std::to_string(sta.id));
    if (sta.path.empty()) throw ConfigError(where + " has an empty path");
    for (std::size_t i = 1; i < sta.path.size(); ++i) {
      if (sta.path[i].t_ms <= sta.path[i - 1].t_ms) {
        throw ConfigError(where + ": waypoint times must be strictly increasing");
      }
    }
    if (!ap_ids.count(sta.initial_ap)) {
      throw ConfigError(where + ": unknown initial_ap " + std::to_string(sta.initial_ap));
    }
  }
  for (const auto& ev : blockage_events) {
    if (!sta_ids.count(ev.sta_id)) {
      throw ConfigError("scenario: blockage event for unknown STA " + std::to_string(ev.sta_id));
    }
    if (ev.onset_ms < 0 || ev.onset_ms >= duration_ms) {
      throw ConfigError("scenario: blockage onset " + std::to_string(ev.onset_ms) +
                        " outside the run");
    }
    if (ev.standing_ms && *ev.standing_ms < 0) {
      throw ConfigError("scenario: standing_ms must be >= 0");
    }
  }
  if (auto_blockage) {
    if (!(auto_blockage->mean_interval_ms > 0.0) || auto_blockage->scenarios.empty()) {
      throw ConfigError("scenario: auto_blockage needs mean_interval_ms > 0 and scenarios");
    }
  }
  for (const auto& w : walls) {
    for (const auto& o : w.openings) {
      if (o.from_m > o.to_m) throw ConfigError("scenario: wall opening with from > to");
    }
  }
  if (interference) {
    if (!sta_ids.count(interference->victim_sta)) {
      throw ConfigError("scenario: interference victim is not a known STA");
    }
    const auto& m = interference->model;
    if (!(m.deaf_alpha > 0.0) || !(m.deaf_beta > 0.0) || m.resample_ms <= 0 ||
        !(m.mutual_factor >= 0.0 && m.mutual_factor <= 1.0)) {
      throw ConfigError("scenario: invalid interference model parameters");
    }
    if (interference->active_until_ms && *interference->active_until_ms <= interference->active_from_ms) {
      throw ConfigError("scenario: interference active_until_ms must exceed active_from_ms");
    }
  }
  distributions.validate();
  handoff.validate();
}

double link_quality(const ScenarioConfig& cfg, const ApConfig& ap, const Vec3& sta) {
  LinkConfig lc;
  lc.distance_m = std::max(distance(ap.position, sta), 0.01);
  lc.environment = ap.environment;
  lc.traffic_active = cfg.traffic_active;
  const double bearing =
      std::atan2(sta.y - ap.position.y, sta.x - ap.position.x) * 180.0 / std::numbers::pi;
  lc.boresight_offset_deg = bearing - ap.boresight_deg;
  lc.rate_cap_mbps = cfg.rate_cap_mbps;
  return baseline_quality(lc, cfg.antenna).value();
}

namespace {

const ApConfig& find_ap(const ScenarioConfig& cfg, ApId id) {
  for (const auto& ap : cfg.aps) {
    if (ap.id == id) return ap;
  }
  throw std::out_of_range("unknown AP id " + std::to_string(id));
}

struct ActiveEpisode {
  std::size_t log_index;
  std::vector<double> profile;
};

StaLog run_sta(const ScenarioConfig& cfg, std::size_t index, const EpisodeSampler& sampler) {
  const StaConfig& sc = cfg.stas[index];
  Rng rng = make_rng(cfg.seed, 1, index);
  Rng irng = make_rng(cfg.seed, 2, index);

  HandoffConfig hc = cfg.handoff;
  if (cfg.centroids_by_distance) {
    const double d0 = distance(sta_position(sc.path, 0), find_ap(cfg, sc.initial_ap).position);
    hc.detector.centroids = centroids_for(nearest_bucket(d0));
  }

  TimeMs now = 0;
  TimeMs pending_ramp = 0;
  auto candidates = [&](TimeMs t, ApId current) {
    const Vec3 pos = sta_position(sc.path, t);
    std::vector<ApCandidate> out;
    for (const auto& ap : cfg.aps) {
      if (ap.id == current) continue;
      const bool blocked = wall_occlusion(pos, ap.position, cfg.walls);
      out.push_back({ap.id, blocked ? 0.0 : link_quality(cfg, ap, pos)});
    }
    return out;
  };
  auto association = [&](ApId target) {
    const Vec3 pos = sta_position(sc.path, now);
    pending_ramp = sample_association_ms(distance(pos, find_ap(cfg, target).position), rng);
    return pending_ramp;
  };
  HandoffController ctl(hc, candidates, association);

  TimeMs assoc_start = 0;
  TimeMs assoc_len = 0;
  if (cfg.start_associated) {
    ctl.connect(0, sc.initial_ap, 0);
  } else {
    const Vec3 p0 = sta_position(sc.path, 0);
    assoc_len = sample_association_ms(distance(p0, find_ap(cfg, sc.initial_ap).position), rng);
    ctl.connect(0, sc.initial_ap, assoc_len);
  }

  std::vector<BlockageEventConfig> pending;
  for (const auto& ev : cfg.blockage_events) {
    if (ev.sta_id == sc.id) pending.push_back(ev);
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const auto& a, const auto& b) { return a.onset_ms < b.onset_ms; });
  std::size_t next_event = 0;

  std::optional<TimeMs> next_auto;
  auto draw_gap = [&]() {
    std::exponential_distribution<double> gap(1.0 / cfg.auto_blockage->mean_interval_ms);
    return std::max<TimeMs>(1, std::llround(gap(rng)));
  };
  if (cfg.auto_blockage) next_auto = draw_gap();

  const bool victim = cfg.interference && cfg.interference->victim_sta == sc.id;
  double ifactor = 1.0;
  TimeMs next_resample = 0;

  const RenderOptions render{0, cfg.distributions.spike_rate_per_s, cfg.distributions.spike_units};

  StaLog log;
  log.sta_id = sc.id;
  const auto n = static_cast<std::size_t>(cfg.duration_ms);
  log.trace.q.reserve(n);
  log.trace.throughput_mbps.reserve(n);
  log.serving_ap.reserve(n);

  std::optional<ActiveEpisode> active;
  ApId occluded_ap = -1;
  int occluded_ticks = 0;

  for (TimeMs t = 0; t < cfg.duration_ms; ++t) {
    now = t;
    if (auto rec = ctl.advance(t)) {
      log.handoffs.push_back(*rec);
      assoc_start = rec->t_complete_ms;
      assoc_len = pending_ramp;
    }
    const StaState& st = ctl.state();
    const bool associated = st.mode == StaMode::Associated || st.mode == StaMode::Characterizing;
    std::optional<ApId> link_ap;
    if (associated) {
      link_ap = st.current_ap;
    } else if (st.mode == StaMode::Associating) {
      link_ap = ctl.switch_target();
    }

    if (active && t >= log.episodes[active->log_index].episode.end_ms()) active.reset();

    const Vec3 pos = sta_position(sc.path, t);
    double q = 0.0;
    if (link_ap) {
      const ApConfig& ap = find_ap(cfg, *link_ap);
      double base = link_quality(cfg, ap, pos);
      if (wall_occlusion(pos, ap.position, cfg.walls)) {
        occluded_ticks = occluded_ap == ap.id ? occluded_ticks + 1 : 1;
      } else {
        occluded_ticks = 0;
      }
      occluded_ap = ap.id;
      base *= occluded_ticks == 0 ? 1.0 : (occluded_ticks == 1 ? 0.5 : 0.0);

      if (associated && !active) {
        std::optional<BlockageEventConfig> spawn;
        if (next_event < pending.size() && pending[next_event].onset_ms <= t) {
          spawn = pending[next_event++];
        } else if (next_auto && t >= *next_auto) {
          const auto& sc_list = cfg.auto_blockage->scenarios;
          std::uniform_int_distribution<std::size_t> pick(0, sc_list.size() - 1);
          spawn = BlockageEventConfig{sc.id, sc_list[pick(rng)], t, std::nullopt};
        }
        if (spawn) {
          BlockageEpisode ep = sampler.sample(spawn->scenario, distance(pos, ap.position), rng,
                                              std::clamp(base, 0.0, 10.0), t);
          if (spawn->standing_ms) {
            (ep.scenario == Scenario::PermanentWithNlos ? ep.hold_ms : ep.dwell_ms) =
                *spawn->standing_ms;
          }
          auto profile = episode_profile(ep, rng, render);
          log.episodes.push_back({ep, ap.id, std::nullopt});
          active = ActiveEpisode{log.episodes.size() - 1, std::move(profile)};
          if (next_auto && t >= *next_auto) next_auto = ep.end_ms() + draw_gap();
        }
      }

      double q_link = base;
      if (active && log.episodes[active->log_index].ap == ap.id) {
        const BlockageEpisode& ep = log.episodes[active->log_index].episode;
        const TimeMs k = t - ep.onset_ms;
        if (ep.disconnect_after_ms && k >= *ep.disconnect_after_ms) {
          q_link = 0.0;
        } else {
          const double delta = ep.q_initial - active->profile[static_cast<std::size_t>(k)];
          q_link = std::max(0.0, base - delta);
        }
      }
      q = st.mode == StaMode::Associating ? association_level(q_link, t - assoc_start, assoc_len)
                                          : q_link;
    } else {
      occluded_ticks = 0;
      occluded_ap = -1;
    }

    const SignalQuality sq = SignalQuality::clamped(std::round(q));
    if (victim) {
      if (cfg.interference->active_at(t)) {
        if (t >= next_resample) {
          ifactor = apply_interference(cfg.interference->geometry, true, cfg.interference->model, irng);
          next_resample = t + cfg.interference->model.resample_ms;
        }
      } else {
        ifactor = 1.0;
        next_resample = 0;
      }
    }
    const int tp = static_cast<int>(std::lround(throughput_of(sq, cfg.rate_cap_mbps) * ifactor));

    if (active && associated && link_ap && log.episodes[active->log_index].ap == *link_ap) {
      EpisodeLog& el = log.episodes[active->log_index];
      if (!el.t_dc_ms && tp == 0) el.t_dc_ms = t - el.episode.onset_ms;
    }

    log.trace.q.push_back(sq.quantized());
    log.trace.throughput_mbps.push_back(tp);
    log.serving_ap.push_back(associated ? *link_ap : -1);

    auto out = ctl.on_sample(t, static_cast<double>(sq.quantized()));
    log.events.insert(log.events.end(), out.events.begin(), out.events.end());
    if (out.record) log.handoffs.push_back(*out.record);
  }
  log.ignored_samples = ctl.ignored_samples();
  return log;
}

double mean_of(const std::vector<int>& v, std::size_t from, std::size_t to) {
  if (to <= from) return 0.0;
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / static_cast<double>(to - from);
}

}  // namespace

std::vector<TimeMs> SimLog::disconnection_times() const {
  std::vector<TimeMs> out;
  for (const auto& s : stas) {
    for (const auto& e : s.episodes) {
      if (e.t_dc_ms) out.push_back(*e.t_dc_ms);
    }
  }
  return out;
}

SimLog run(const ScenarioConfig& cfg) {
  cfg.validate();
  const EpisodeSampler sampler(cfg.distributions);
  SimLog log;
  log.duration_ms = cfg.duration_ms;
  log.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.stas.size(); ++i) {
    log.stas.push_back(run_sta(cfg, i, sampler));
  }
  if (cfg.interference) {
    const auto& ic = *cfg.interference;
    for (const auto& s : log.stas) {
      if (s.sta_id != ic.victim_sta) continue;
      const auto& tp = s.trace.throughput_mbps;
      const auto from = static_cast<std::size_t>(std::min(ic.active_from_ms, cfg.duration_ms));
      const auto until =
          static_cast<std::size_t>(std::min(ic.active_until_ms.value_or(cfg.duration_ms), cfg.duration_ms));
      log.interference = InterferenceSummary{s.sta_id, mean_of(tp, 0, from), mean_of(tp, from, until)};
    }
  }
  return log;
}

std::string summary_json(const SimLog& log) {
  nlohmann::ordered_json j;
  j["duration_ms"] = log.duration_ms;
  j["seed"] = log.seed;
  auto stas = nlohmann::ordered_json::array();
  for (const auto& s : log.stas) {
    nlohmann::ordered_json o;
    o["sta"] = s.sta_id;
    o["mean_throughput_mbps"] = mean_of(s.trace.throughput_mbps, 0, s.trace.size());
    o["handoffs"] = s.handoffs.size();
    auto triggers = nlohmann::ordered_json::object();
    for (const auto& h : s.handoffs) {
      const std::string key(to_string(h.trigger));
      triggers[key] = triggers.value(key, 0) + 1;
    }
    o["handoff_triggers"] = triggers;
    o["blockage_episodes"] = s.episodes.size();
    auto tdc = nlohmann::ordered_json::array();
    for (const auto& e : s.episodes) {
      if (e.t_dc_ms) tdc.push_back(*e.t_dc_ms);
    }
    o["t_DC_ms"] = tdc;
    o["classified_events"] = std::count_if(s.events.begin(), s.events.end(), [](const auto& e) {
      return e.kind == EventKind::Classified;
    });
    o["ignored_samples"] = s.ignored_samples;
    stas.push_back(o);
  }
  j["stas"] = stas;
  const auto tdc = log.disconnection_times();
  if (tdc.empty()) {
    j["mean_t_DC_ms"] = nullptr;
  } else {
    double sum = 0.0;
    for (TimeMs v : tdc) sum += static_cast<double>(v);
    j["mean_t_DC_ms"] = sum / static_cast<double>(tdc.size());
  }
  if (log.interference) {
    j["interference"] = {{"victim_sta", log.interference->victim_sta},
                         {"pre_mean_mbps", log.interference->pre_mean_mbps},
                         {"during_mean_mbps", log.interference->during_mean_mbps}};
  }
  return j.dump(2) + "\n";
}

namespace {

std::string episodes_to_csv(const StaLog& s) {
  std::string out(kEpisodeHeader);
  out += '\n';
  for (const auto& e : s.episodes) {
    const auto& ep = e.episode;
    out += std::to_string(e.ap) + ',' + std::string(to_string(ep.scenario)) + ',' +
           std::to_string(ep.onset_ms) + ',' + std::to_string(ep.drop_time_ms) + ',' +
           (ep.recovery_time_ms ? std::to_string(*ep.recovery_time_ms) : "") + ',' +
           std::to_string(ep.dwell_ms) + ',' + std::to_string(ep.hold_ms) + ',' +
           format_number(ep.q_initial) + ',' + format_number(ep.q_blocked) + ',' +
           format_number(ep.q_final) + ',' + (e.t_dc_ms ? std::to_string(*e.t_dc_ms) : "") + '\n';
  }
  return out;
}

std::string link_to_csv(const StaLog& s) {
  std::string out = "t_ms,serving_ap,throughput_mbps\n";
  for (std::size_t i = 0; i < s.trace.size(); ++i) {
    out += std::to_string(s.trace.time_at(i)) + ',' + std::to_string(s.serving_ap[i]) + ',' +
           std::to_string(s.trace.throughput_mbps[i]) + '\n';
  }
  return out;
}

}  // namespace

void write_sim_log(const SimLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : log.stas) {
    const std::string id = std::to_string(s.sta_id);
    write_file_atomic(dir / ("trace_" + id + ".csv"), trace_to_csv(s.trace));
    write_file_atomic(dir / ("link_" + id + ".csv"), link_to_csv(s));
    write_file_atomic(dir / ("events_" + id + ".csv"), events_to_csv(s.events));
    write_file_atomic(dir / ("handoffs_" + id + ".csv"), handoffs_to_csv(s.handoffs));
    write_file_atomic(dir / ("episodes_" + id + ".csv"), episodes_to_csv(s));
  }
  write_file_atomic(dir / "summary.json", summary_json(log));
}

}  // namespace wigig
