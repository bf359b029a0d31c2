#include "oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace wigig::testing {

namespace {

int nearest(double x, double y, const CentroidSet& cs) {
  int best = 0;
  double best_d = 0.0;
  for (int id = 1; id <= 3; ++id) {
    for (const auto& c : cs) {
      if (c.scenario_id != id) continue;
      const double d = std::sqrt((x - c.x_c) * (x - c.x_c) + (y - c.y_c) * (y - c.y_c));
      if (best == 0 || d < best_d) {
        best = id;
        best_d = d;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<OracleEvent> scan_events(const std::vector<int>& q, TimeMs t0,
                                     const DetectorConfig& cfg) {
  const auto n = static_cast<long>(q.size());
  const long td = static_cast<long>(cfg.t_drop_threshold_ms / cfg.sample_period_ms);
  const long tr = static_cast<long>(cfg.t_recovery_threshold_ms / cfg.sample_period_ms);
  const long w = static_cast<long>(cfg.reference_window_ms / cfg.sample_period_ms);
  const bool tumbling = cfg.window_mode == DropWindowMode::Tumbling;
  auto at = [&](long i) { return t0 + i * cfg.sample_period_ms; };

  std::vector<OracleEvent> out;
  long seg = 0;  // first index since the last reset
  std::array<long, 11> last_seen{};
  last_seen.fill(-1);
  long filled = 0;
  long i = 0;
  while (i < n) {
    for (; filled < i; ++filled) last_seen[static_cast<std::size_t>(q[filled])] = filled;
    // Highest level seen in the reference window.
    int ref = -1;
    for (int level = 10; level >= 0; --level) {
      if (last_seen[static_cast<std::size_t>(level)] >= std::max(seg, i - w)) {
        ref = level;
        break;
      }
    }
    if (tumbling) {
      ref = std::max(ref, q[i]);
    } else if (ref < 0 || q[i] >= ref) {
      ++i;
      continue;
    }

    const long open = i;
    const long end = open + td - 1;
    const long last = std::min(end, n - 1);

    long indicated_at = -1;
    double x_indicated = 0.0;
    int running_min = 11;
    for (long k = open; k <= last; ++k) {
      running_min = std::min(running_min, q[k]);
      if (indicated_at < 0 && ref - running_min > cfg.drop_trigger_units &&
          (!tumbling || k == end)) {
        indicated_at = k;
        x_indicated = ref - running_min;
      }
    }
    const double x = ref - running_min;
    if (indicated_at >= 0) out.push_back({EventKind::BlockageIndication, at(indicated_at), x_indicated, 0.0, 0});
    if (end >= n) break;
    if (indicated_at < 0) {
      out.push_back({EventKind::NoBlockage, at(end), x, 0.0, 0});
      i = end + 1;
      continue;
    }

    const long t_min = std::min_element(q.begin() + open, q.begin() + end + 1) - q.begin();
    const long classify_at = std::max(end, t_min + tr - 1);
    if (classify_at >= n) break;
    const long p = std::min_element(q.begin() + open, q.begin() + classify_at + 1) - q.begin();
    const int m = q[p];
    const int peak = *std::max_element(q.begin() + p, q.begin() + classify_at + 1);
    const double y = peak - m;
    out.push_back({EventKind::Classified, at(classify_at), x, y, nearest(x, y, cfg.centroids)});
    seg = classify_at + 1;
    i = classify_at + 1;
    last_seen.fill(-1);
    filled = i;
  }
  return out;
}

}  // namespace wigig::testing

#include <sstream>

#include "wigig/link_model.hpp"

namespace wigig::testing {

RandomDetectorCase random_detector_case(std::uint64_t seed) {
  Rng rng = make_rng(seed, 77);
  auto uni = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };

  RandomDetectorCase c;
  c.cfg.t_drop_threshold_ms = uni(1, 700);
  c.cfg.t_recovery_threshold_ms = uni(1, 3500);
  c.cfg.reference_window_ms = uni(1, 700);
  c.cfg.drop_trigger_units = std::array<double, 4>{0.5, 1.0, 2.0, 3.0}[static_cast<std::size_t>(uni(0, 3))];
  c.cfg.window_mode = uni(0, 3) == 0 ? DropWindowMode::Tumbling : DropWindowMode::Anchored;
  c.cfg.centroids = centroids_for(uni(0, 1) ? DistanceBucket::Far7m : DistanceBucket::Near3m);

  const long n = uni(500, 9000);
  const EpisodeSampler sampler;
  int level = static_cast<int>(uni(3, 10));
  while (static_cast<long>(c.q.size()) < n) {
    switch (uni(0, 3)) {
      case 0: {  // steady
        c.q.insert(c.q.end(), static_cast<std::size_t>(uni(1, 800)), level);
        break;
      }
      case 1: {  // step
        level = static_cast<int>(uni(0, 10));
        c.q.push_back(level);
        break;
      }
      case 2: {  // flicker
        const long len = uni(10, 400);
        for (long k = 0; k < len; ++k) {
          c.q.push_back(std::clamp(level + static_cast<int>(uni(-1, 1)), 0, 10));
        }
        break;
      }
      default: {  // blockage episode
        auto ep = sampler.sample(scenario_from_id(static_cast<int>(uni(1, 3))), uni(0, 1) ? 3.0 : 7.0,
                                 rng, level, 0);
        ep.dwell_ms = std::min<TimeMs>(ep.dwell_ms, 4000);
        ep.hold_ms = std::min<TimeMs>(ep.hold_ms, 1000);
        if (ep.disconnect_after_ms && *ep.disconnect_after_ms >= ep.duration_ms()) {
          ep.disconnect_after_ms.reset();
        }
        for (double v : episode_profile(ep, rng)) {
          c.q.push_back(static_cast<int>(std::lround(std::clamp(v, 0.0, 10.0))));
        }
        level = c.q.back();
        break;
      }
    }
  }
  return c;
}

std::string compare_with_oracle(const std::vector<int>& q, TimeMs t0, const DetectorConfig& cfg) {
  BlockageDetector det(cfg);
  std::vector<DetectorEvent> live;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (auto& e : det.step(t0 + static_cast<TimeMs>(i), q[i])) live.push_back(e);
  }
  const auto ref = scan_events(q, t0, cfg);
  std::ostringstream os;
  const std::size_t n = std::min(live.size(), ref.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = live[i];
    const auto& b = ref[i];
    const int chosen = a.result ? a.result->chosen : 0;
    if (a.kind != b.kind || a.at_ms != b.at_ms || a.features.x != b.x ||
        (a.kind == EventKind::Classified && (a.features.y != b.y || chosen != b.chosen))) {
      os << "event " << i << ": live " << to_string(a.kind) << "@" << a.at_ms << " x=" << a.features.x
         << " y=" << a.features.y << " c=" << chosen << " vs oracle " << to_string(b.kind) << "@"
         << b.at_ms << " x=" << b.x << " y=" << b.y << " c=" << b.chosen;
      return os.str();
    }
  }
  if (live.size() != ref.size()) {
    os << "event count differs: live " << live.size() << " vs oracle " << ref.size();
  }
  return os.str();
}

}  // namespace wigig::testing
