#include "wigig/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace wigig {

using nlohmann::json;

namespace {

class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + msg);
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> ok(keys);
    for (const auto& item : j_.items()) {
      if (!ok.count(item.key())) {
        throw ConfigError(key_path(item.key()) + ": unknown key");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Node child(const char* key) const { return Node(j_.at(key), key_path(key)); }

  const json& raw(const char* key) const { return j_.at(key); }

  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!has(key)) return;
    out = as<T>(j_.at(key), key_path(key));
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) const {
    if (!has(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    out = as<T>(j_.at(key), key_path(key));
  }

  template <typename T>
  static T as(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
        return v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (v.is_number_integer()) return v.get<T>();
        if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) {
          return static_cast<T>(v.get<double>());
        }
        throw ConfigError(where + ": expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(where + ": expected a number");
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(where + ": expected a string");
        return v.get<std::string>();
      } else if constexpr (std::is_same_v<T, Environment>) {
        return parse_environment(as<std::string>(v, where));
      } else if constexpr (std::is_same_v<T, Scenario>) {
        if (v.is_number_integer()) return scenario_from_id(v.get<int>());
        return parse_scenario(as<std::string>(v, where));
      } else if constexpr (std::is_same_v<T, Vec3>) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
        return Vec3{as<double>(v[0], where), as<double>(v[1], where), as<double>(v[2], where)};
      } else {
        return v.get<T>();
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  const json& value() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

void parse_link(const Node& n, LinkConfig& c) {
  n.allow({"distance_m", "environment", "traffic_active", "boresight_offset_deg", "rate_cap_mbps"});
  n.get("distance_m", c.distance_m);
  n.get("environment", c.environment);
  n.get("traffic_active", c.traffic_active);
  n.get("boresight_offset_deg", c.boresight_offset_deg);
  n.get("rate_cap_mbps", c.rate_cap_mbps);
}

void parse_timing(const Node& n, TimingStat& t) {
  n.allow({"mean_ms", "max_ms"});
  n.get("mean_ms", t.mean_ms);
  n.get("max_ms", t.max_ms);
}

void parse_optional_timing(const Node& parent, const char* key, std::optional<TimingStat>& t) {
  if (!parent.has(key)) return;
  if (parent.raw(key).is_null()) {
    t.reset();
    return;
  }
  TimingStat v = t.value_or(TimingStat{});
  parse_timing(parent.child(key), v);
  t = v;
}

void parse_distributions(const Node& n, EpisodeDistributions& d) {
  n.allow({"dq_sigma", "dq_correlation", "spike_rate_per_s", "spike_units", "timings_at_mean",
           "transient", "permanent_no_nlos", "permanent_with_nlos"});
  n.get("dq_sigma", d.dq_sigma);
  n.get("dq_correlation", d.dq_correlation);
  n.get("spike_rate_per_s", d.spike_rate_per_s);
  n.get("spike_units", d.spike_units);
  n.get("timings_at_mean", d.timings_at_mean);
  for (int sid = 1; sid <= 3; ++sid) {
    const Scenario s = scenario_from_id(sid);
    const std::string name(to_string(s));
    if (!n.has(name.c_str())) continue;
    const Node sn = n.child(name.c_str());
    sn.allow({"3m", "7m"});
    for (auto [key, bucket] : {std::pair{"3m", DistanceBucket::Near3m}, std::pair{"7m", DistanceBucket::Far7m}}) {
      if (!sn.has(key)) continue;
      const Node cn = sn.child(key);
      cn.allow({"t_D", "t_R", "x_c", "y_c", "dwell", "t_DC"});
      BucketCalibration& cal = d.at(s, bucket);
      if (cn.has("t_D")) parse_timing(cn.child("t_D"), cal.drop);
      parse_optional_timing(cn, "t_R", cal.recovery);
      cn.get("x_c", cal.dq_drop_mean);
      cn.get("y_c", cal.dq_recovery_mean);
      if (cn.has("dwell")) parse_timing(cn.child("dwell"), cal.dwell);
      parse_optional_timing(cn, "t_DC", cal.disconnect);
    }
  }
}

CentroidSet parse_centroids(const json& v, const std::string& where) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "3m") return centroids_for(DistanceBucket::Near3m);
    if (s == "7m") return centroids_for(DistanceBucket::Far7m);
    throw ConfigError(where + ": expected \"3m\", \"7m\" or a list of three centroids");
  }
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError(where + ": expected \"3m\", \"7m\" or a list of three centroids");
  }
  CentroidSet out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const Node c(v[i], where + "." + std::to_string(i));
    c.allow({"id", "x_c", "y_c"});
    c.get("id", out[i].scenario_id);
    c.get("x_c", out[i].x_c);
    c.get("y_c", out[i].y_c);
  }
  return out;
}

void parse_detector(const Node& n, DetectorConfig& d) {
  n.allow({"t_drop_threshold_ms", "t_recovery_threshold_ms", "drop_trigger_units",
           "reference_window_ms", "window_mode", "centroids"});
  n.get("t_drop_threshold_ms", d.t_drop_threshold_ms);
  n.get("t_recovery_threshold_ms", d.t_recovery_threshold_ms);
  n.get("drop_trigger_units", d.drop_trigger_units);
  n.get("reference_window_ms", d.reference_window_ms);
  if (n.has("window_mode")) {
    d.window_mode = parse_drop_window_mode(Node::as<std::string>(n.raw("window_mode"), n.key_path("window_mode")));
  }
  if (n.has("centroids")) d.centroids = parse_centroids(n.raw("centroids"), n.key_path("centroids"));
}

void parse_handoff(const Node& n, HandoffConfig& h) {
  n.allow({"discovery_ms", "auth_ms", "assoc_ms", "corner_quality_floor", "corner_rule_enabled",
           "blockage_handoff_enabled"});
  n.get("discovery_ms", h.discovery_ms);
  n.get("auth_ms", h.auth_ms);
  n.get("assoc_ms", h.assoc_ms);
  n.get("corner_quality_floor", h.corner_quality_floor);
  n.get("corner_rule_enabled", h.corner_rule_enabled);
  n.get("blockage_handoff_enabled", h.blockage_handoff_enabled);
}

template <typename Fn>
void each(const Node& parent, const char* key, Fn&& fn) {
  if (!parent.has(key)) return;
  const json& arr = parent.raw(key);
  if (!arr.is_array()) throw ConfigError(parent.key_path(key) + ": expected a list");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    fn(Node(arr[i], parent.key_path(key) + "." + std::to_string(i)));
  }
}

void parse_scenario(const Node& n, ScenarioConfig& s) {
  n.allow({"duration_ms", "aps", "stas", "walls", "blockage_events", "auto_blockage", "interference",
           "traffic_active", "rate_cap_mbps", "start_associated", "centroids_by_distance"});
  n.get("duration_ms", s.duration_ms);
  n.get("traffic_active", s.traffic_active);
  n.get("rate_cap_mbps", s.rate_cap_mbps);
  n.get("start_associated", s.start_associated);
  n.get("centroids_by_distance", s.centroids_by_distance);
  if (n.has("aps")) s.aps.clear();
  each(n, "aps", [&](const Node& a) {
    a.allow({"id", "position", "boresight_deg", "environment"});
    ApConfig ap;
    a.get("id", ap.id);
    a.get("position", ap.position);
    a.get("boresight_deg", ap.boresight_deg);
    a.get("environment", ap.environment);
    s.aps.push_back(ap);
  });
  if (n.has("stas")) s.stas.clear();
  each(n, "stas", [&](const Node& a) {
    a.allow({"id", "initial_ap", "path"});
    StaConfig sta;
    a.get("id", sta.id);
    a.get("initial_ap", sta.initial_ap);
    each(a, "path", [&](const Node& w) {
      w.allow({"t_ms", "pos"});
      Waypoint wp;
      w.get("t_ms", wp.t_ms);
      w.get("pos", wp.pos);
      sta.path.push_back(wp);
    });
    s.stas.push_back(sta);
  });
  if (n.has("walls")) s.walls.clear();
  each(n, "walls", [&](const Node& a) {
    a.allow({"from", "to", "openings"});
    Wall w;
    auto xy = [&](const char* key, double& x, double& y) {
      if (!a.has(key)) a.fail(std::string("missing '") + key + "'");
      const json& v = a.raw(key);
      if (!v.is_array() || v.size() != 2) throw ConfigError(a.key_path(key) + ": expected [x, y]");
      x = Node::as<double>(v[0], a.key_path(key));
      y = Node::as<double>(v[1], a.key_path(key));
    };
    xy("from", w.x0, w.y0);
    xy("to", w.x1, w.y1);
    if (a.has("openings")) {
      const json& ops = a.raw("openings");
      if (!ops.is_array()) throw ConfigError(a.key_path("openings") + ": expected a list");
      for (const auto& o : ops) {
        if (!o.is_array() || o.size() != 2) {
          throw ConfigError(a.key_path("openings") + ": each opening is [from_m, to_m]");
        }
        w.openings.push_back({Node::as<double>(o[0], a.key_path("openings")),
                              Node::as<double>(o[1], a.key_path("openings"))});
      }
    }
    s.walls.push_back(w);
  });
  if (n.has("blockage_events")) s.blockage_events.clear();
  each(n, "blockage_events", [&](const Node& a) {
    a.allow({"sta", "scenario", "onset_ms", "standing_ms"});
    BlockageEventConfig ev;
    a.get("sta", ev.sta_id);
    a.get("scenario", ev.scenario);
    a.get("onset_ms", ev.onset_ms);
    a.get("standing_ms", ev.standing_ms);
    s.blockage_events.push_back(ev);
  });
  if (n.has("auto_blockage")) {
    if (n.raw("auto_blockage").is_null()) {
      s.auto_blockage.reset();
    } else {
      const Node a = n.child("auto_blockage");
      a.allow({"mean_interval_ms", "scenarios"});
      AutoBlockageConfig ab;
      a.get("mean_interval_ms", ab.mean_interval_ms);
      if (a.has("scenarios")) {
        ab.scenarios.clear();
        const json& v = a.raw("scenarios");
        if (!v.is_array()) throw ConfigError(a.key_path("scenarios") + ": expected a list");
        for (const auto& x : v) ab.scenarios.push_back(Node::as<Scenario>(x, a.key_path("scenarios")));
      }
      s.auto_blockage = ab;
    }
  }
  if (n.has("interference")) {
    if (n.raw("interference").is_null()) {
      s.interference.reset();
    } else {
      const Node a = n.child("interference");
      a.allow({"geometry", "victim_sta", "active_from_ms", "active_until_ms", "deaf_alpha",
               "deaf_beta", "resample_ms", "mutual_factor"});
      InterferenceConfig ic;
      if (a.has("geometry")) {
        ic.geometry = parse_interference_geometry(Node::as<std::string>(a.raw("geometry"), a.key_path("geometry")));
      }
      a.get("victim_sta", ic.victim_sta);
      a.get("active_from_ms", ic.active_from_ms);
      a.get("active_until_ms", ic.active_until_ms);
      a.get("deaf_alpha", ic.model.deaf_alpha);
      a.get("deaf_beta", ic.model.deaf_beta);
      a.get("resample_ms", ic.model.resample_ms);
      a.get("mutual_factor", ic.model.mutual_factor);
      s.interference = ic;
    }
  }
}

void parse_sweep(const Node& n, SweepConfig& s) {
  n.allow({"t_D_th_ms", "t_R_th_ms", "trials", "distance_m", "environment", "lead_in_ms", "jobs"});
  n.get("t_D_th_ms", s.t_drop_thresholds_ms);
  n.get("t_R_th_ms", s.t_recovery_thresholds_ms);
  n.get("trials", s.trials_per_cell);
  n.get("distance_m", s.distance_m);
  n.get("environment", s.environment);
  n.get("lead_in_ms", s.lead_in_ms);
  n.get("jobs", s.jobs);
}

void parse_trace(const Node& n, TraceConfig& t) {
  n.allow({"duration_ms", "segments"});
  n.get("duration_ms", t.duration_ms);
  if (n.has("segments")) t.segments.clear();
  each(n, "segments", [&](const Node& a) {
    a.allow({"type", "start_ms", "duration_ms", "scenario", "standing_ms", "dip_units"});
    TraceSegmentSpec seg;
    std::string type = "steady";
    a.get("type", type);
    if (type == "steady") {
      seg.kind = TraceSegmentSpec::Kind::Steady;
    } else if (type == "association") {
      seg.kind = TraceSegmentSpec::Kind::Association;
    } else if (type == "realignment") {
      seg.kind = TraceSegmentSpec::Kind::Realignment;
    } else if (type == "blockage") {
      seg.kind = TraceSegmentSpec::Kind::Blockage;
    } else {
      throw ConfigError(a.key_path("type") + ": unknown segment type '" + type + "'");
    }
    a.get("start_ms", seg.start_ms);
    a.get("duration_ms", seg.duration_ms);
    a.get("scenario", seg.scenario);
    a.get("standing_ms", seg.standing_ms);
    a.get("dip_units", seg.dip_units);
    if (seg.kind == TraceSegmentSpec::Kind::Steady && !seg.duration_ms) {
      a.fail("steady segments need duration_ms");
    }
    t.segments.push_back(seg);
  });
}

}  // namespace

AppConfig config_from_json(const json& doc) {
  AppConfig cfg;
  try {
    const Node root(doc, "");
    root.allow({"seed", "link", "distributions", "detector", "handoff", "scenario", "sweep", "trace"});
    root.get("seed", cfg.seed);
    if (root.has("link")) parse_link(root.child("link"), cfg.link);
    if (root.has("distributions")) parse_distributions(root.child("distributions"), cfg.distributions);
    if (root.has("detector")) parse_detector(root.child("detector"), cfg.detector);
    if (root.has("handoff")) parse_handoff(root.child("handoff"), cfg.handoff);
    if (root.has("scenario")) parse_scenario(root.child("scenario"), cfg.scenario);
    if (root.has("sweep")) parse_sweep(root.child("sweep"), cfg.sweep);
    if (root.has("trace")) parse_trace(root.child("trace"), cfg.trace);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  cfg.handoff.detector = cfg.detector;
  cfg.scenario.seed = cfg.seed;
  cfg.scenario.handoff = cfg.handoff;
  cfg.scenario.distributions = cfg.distributions;
  cfg.sweep.seed = cfg.seed;
  cfg.sweep.detector = cfg.detector;
  cfg.sweep.distributions = cfg.distributions;

  cfg.link.validate();
  cfg.distributions.validate();
  cfg.detector.validate();
  cfg.handoff.validate();
  cfg.sweep.validate();
  if (!cfg.scenario.aps.empty() || !cfg.scenario.stas.empty()) cfg.scenario.validate();
  if (cfg.trace.duration_ms < 0) throw ConfigError("trace.duration_ms must be >= 0");
  return cfg;
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    json* next = nullptr;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ConfigError("override key '" + key + "': '" + part + "' is not an index");
      }
      if (idx >= node->size()) throw ConfigError("override key '" + key + "': index out of range");
      next = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a scalar");
      next = &(*node)[part];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    pos = dot + 1;
  }
}

std::vector<Segment> build_segments(const TraceConfig& trace, const LinkConfig& link,
                                    const EpisodeDistributions& dists, Rng& rng) {
  const EpisodeSampler sampler(dists);
  const double q0 = baseline_quality(link).value();
  std::vector<Segment> out;
  for (const auto& s : trace.segments) {
    switch (s.kind) {
      case TraceSegmentSpec::Kind::Steady:
        out.emplace_back(SteadySegment{s.start_ms, s.duration_ms.value_or(0)});
        break;
      case TraceSegmentSpec::Kind::Association:
        out.emplace_back(AssociationSegment{s.start_ms, s.duration_ms});
        break;
      case TraceSegmentSpec::Kind::Realignment:
        out.emplace_back(RealignmentSegment{s.start_ms, s.duration_ms, s.dip_units});
        break;
      case TraceSegmentSpec::Kind::Blockage: {
        BlockageEpisode ep = sampler.sample(s.scenario, link.distance_m, rng, q0, s.start_ms);
        if (s.standing_ms) {
          (ep.scenario == Scenario::PermanentWithNlos ? ep.hold_ms : ep.dwell_ms) = *s.standing_ms;
        }
        out.emplace_back(ep);
        break;
      }
    }
  }
  return out;
}

}  // namespace wigig
