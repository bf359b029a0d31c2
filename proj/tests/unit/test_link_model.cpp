#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wigig/link_model.hpp"

using namespace wigig;

namespace {

LinkConfig link_at(double d, Environment env = Environment::IndoorRoom, bool traffic = true) {
  LinkConfig c;
  c.distance_m = d;
  c.environment = env;
  c.traffic_active = traffic;
  return c;
}

struct Moments {
  double td = 0, tr = 0, dqd = 0, dqr = 0;
  double td_max = 0, tr_max = 0;
  int n = 0;
};

Moments sample_moments(Scenario s, double d, int n, std::uint64_t seed) {
  const EpisodeSampler sampler;
  auto rng = make_rng(seed);
  Moments m;
  for (int i = 0; i < n; ++i) {
    const auto ep = sampler.sample(s, d, rng);
    m.td += static_cast<double>(ep.drop_time_ms);
    m.td_max = std::max(m.td_max, static_cast<double>(ep.drop_time_ms));
    if (ep.recovery_time_ms) {
      m.tr += static_cast<double>(*ep.recovery_time_ms);
      m.tr_max = std::max(m.tr_max, static_cast<double>(*ep.recovery_time_ms));
    }
    m.dqd += ep.drop_delta();
    m.dqr += ep.recovery_delta();
  }
  m.td /= n;
  m.tr /= n;
  m.dqd /= n;
  m.dqr /= n;
  m.n = n;
  return m;
}

}  // namespace

TEST(AzimuthGain, BoresightAndBackSector) {
  EXPECT_DOUBLE_EQ(azimuth_gain(0.0), 1.0);
  EXPECT_DOUBLE_EQ(azimuth_gain(90.0), 1.0);
  EXPECT_DOUBLE_EQ(azimuth_gain(110.0), 0.2);
  EXPECT_DOUBLE_EQ(azimuth_gain(180.0), 0.2);
  EXPECT_DOUBLE_EQ(azimuth_gain(100.0), 0.6);
}

TEST(AzimuthGain, PeriodicAndSymmetric) {
  for (double a = 0.0; a < 360.0; a += 7.3) {
    EXPECT_NEAR(azimuth_gain(a), azimuth_gain(a + 360.0), 1e-12);
    EXPECT_NEAR(azimuth_gain(a), azimuth_gain(-a), 1e-12);
  }
  EXPECT_DOUBLE_EQ(azimuth_gain(360.0), azimuth_gain(0.0));
}

TEST(AzimuthGain, ContinuousAndBounded) {
  double prev = azimuth_gain(0.0);
  for (double a = 0.01; a <= 360.0; a += 0.01) {
    const double g = azimuth_gain(a);
    ASSERT_GE(g, 0.0);
    ASSERT_LE(g, 1.0);
    ASSERT_LE(std::fabs(g - prev), 0.8 / 20.0 * 0.01 + 1e-9);
    prev = g;
  }
  EXPECT_DOUBLE_EQ(azimuth_gain(NAN), 0.2);
}

TEST(BaselineQuality, MeasuredAnchors) {
  EXPECT_EQ(baseline_quality(link_at(3.0)).value(), 9.0);
  EXPECT_EQ(baseline_quality(link_at(7.0)).value(), 9.0);
  EXPECT_EQ(baseline_quality(link_at(500.0)).value(), 0.0);
}

TEST(BaselineQuality, MonotoneInDistance) {
  for (auto env : {Environment::IndoorCorridor, Environment::IndoorRoom, Environment::OutdoorOpen}) {
    for (bool traffic : {true, false}) {
      double prev = 10.0;
      for (double d = 0.1; d < 40.0; d += 0.05) {
        const double q = baseline_quality(link_at(d, env, traffic)).value();
        ASSERT_LE(q, prev) << "d=" << d;
        prev = q;
      }
    }
  }
}

TEST(BaselineQuality, IdleLinksReachFurther) {
  for (auto env : {Environment::IndoorCorridor, Environment::IndoorRoom, Environment::OutdoorOpen}) {
    const auto p = range_profile(env);
    EXPECT_GT(p.max_range_idle_m, p.max_range_traffic_m);
    const double just_past = p.max_range_traffic_m + 0.5;
    EXPECT_EQ(baseline_quality(link_at(just_past, env, true)).value(), 0.0);
    EXPECT_GT(baseline_quality(link_at(just_past, env, false)).value(), 0.0);
  }
  EXPECT_GT(range_profile(Environment::IndoorCorridor).max_range_traffic_m,
            range_profile(Environment::OutdoorOpen).max_range_traffic_m);
}

TEST(BaselineQuality, ScaledByAzimuth) {
  auto c = link_at(3.0);
  c.boresight_offset_deg = 180.0;
  EXPECT_NEAR(baseline_quality(c).value(), 9.0 * 0.2, 1e-12);
}

TEST(LinkConfig, RejectsNonPositiveDistanceOrCap) {
  auto c = link_at(0.0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = link_at(3.0);
  c.rate_cap_mbps = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Throughput, StepTable) {
  EXPECT_EQ(throughput_of(SignalQuality(9.0), 1000.0), 900.0);
  EXPECT_EQ(throughput_of(SignalQuality(2.0), 1000.0), 250.0);
  EXPECT_EQ(throughput_of(SignalQuality(0.0), 1000.0), 0.0);
  EXPECT_EQ(throughput_of(SignalQuality(10.0), 500.0), 500.0);
  double prev = 0.0;
  for (double q = 0.0; q <= 10.0; q += 0.25) {
    const double t = throughput_of(SignalQuality(q), 1000.0);
    ASSERT_GE(t, prev);
    prev = t;
  }
}

TEST(SampleEpisode, UnknownScenarioRejected) {
  auto rng = make_rng(1);
  EXPECT_THROW(sample_episode(0, 3.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_episode(4, 3.0, rng), std::invalid_argument);
}

TEST(SampleEpisode, TransientFarRecoveryMean) {
  const auto m = sample_moments(Scenario::Transient, 7.0, 1000, 11);
  EXPECT_NEAR(m.tr, 1648.0, 0.05 * 1648.0);
  EXPECT_LE(m.tr_max, 2434.0);
}

TEST(SampleEpisode, PermanentNoNlosHasNoRecovery) {
  const EpisodeSampler sampler;
  auto rng = make_rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto ep = sampler.sample(Scenario::PermanentNoNlos, 3.0, rng);
    ASSERT_FALSE(ep.recovery_time_ms.has_value());
    ASSERT_EQ(ep.q_final, ep.q_blocked);
  }
}

TEST(SampleEpisode, PermanentWithNlosNearDropMean) {
  const auto m = sample_moments(Scenario::PermanentWithNlos, 3.0, 1000, 13);
  EXPECT_NEAR(m.dqd, 3.40, 0.05 * 3.40);
}

TEST(SampleEpisode, EveryDrawSatisfiesEpisodeInvariants) {
  const EpisodeSampler sampler;
  auto rng = make_rng(14);
  for (int i = 0; i < 3000; ++i) {
    const auto s = scenario_from_id(i % 3 + 1);
    const double d = (i / 3) % 2 ? 7.0 : 3.0;
    const double q0 = static_cast<double>(i % 11);
    const auto ep = sampler.sample(s, d, rng, q0);
    ASSERT_NO_THROW(ep.validate());
    ASSERT_GE(ep.drop_delta(), 0.0);
    ASSERT_GE(ep.recovery_delta(), 0.0);
    ASSERT_GE(ep.q_blocked, 0.0);
  }
}

struct CalibrationCase {
  Scenario scenario;
  double distance;
  double td_mean, td_max;
  double tr_mean, tr_max;  // 0 when absent
  double x_c, y_c;
};

class Calibration : public ::testing::TestWithParam<CalibrationCase> {};

TEST_P(Calibration, TenThousandDrawsWithinFivePercent) {
  const auto& c = GetParam();
  const auto m = sample_moments(c.scenario, c.distance, 10000, 21);
  EXPECT_NEAR(m.td, c.td_mean, 0.05 * c.td_mean);
  EXPECT_LE(m.td_max, c.td_max);
  if (c.tr_mean > 0) {
    EXPECT_NEAR(m.tr, c.tr_mean, 0.05 * c.tr_mean);
    EXPECT_LE(m.tr_max, c.tr_max);
  }
  EXPECT_NEAR(m.dqd, c.x_c, 0.05 * c.x_c);
  if (c.scenario != Scenario::PermanentNoNlos) {
    EXPECT_NEAR(m.dqr, c.y_c, 0.05 * c.y_c);
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllCells, Calibration,
    ::testing::Values(
        CalibrationCase{Scenario::Transient, 3, 197, 838, 3826, 5726, 7.5, 7.32},
        CalibrationCase{Scenario::Transient, 7, 140, 513, 1648, 2434, 7.72, 7.64},
        CalibrationCase{Scenario::PermanentNoNlos, 3, 232, 748, 0, 0, 7.20, 1.41},
        CalibrationCase{Scenario::PermanentNoNlos, 7, 298, 952, 0, 0, 7.30, 1.56},
        CalibrationCase{Scenario::PermanentWithNlos, 3, 267.65, 707, 190, 376, 3.40, 1.13},
        CalibrationCase{Scenario::PermanentWithNlos, 7, 411, 784, 136, 313, 4.06, 1.20}));

TEST(EpisodeDistributions, DefaultsMatchMeasuredTables) {
  const auto d = EpisodeDistributions::defaults();
  const auto& s3far = d.at(Scenario::PermanentWithNlos, DistanceBucket::Far7m);
  EXPECT_EQ(s3far.recovery->max_ms, 313.0);
  EXPECT_EQ(d.at(Scenario::Transient, DistanceBucket::Near3m).drop.mean_ms, 197.0);
  EXPECT_FALSE(d.at(Scenario::PermanentNoNlos, DistanceBucket::Near3m).recovery.has_value());
  EXPECT_EQ(d.at(Scenario::PermanentNoNlos, DistanceBucket::Far7m).disconnect->mean_ms, 16329.0);
  EXPECT_NO_THROW(d.validate());
}

TEST(EpisodeDistributions, RejectsMeanAboveMax) {
  auto d = EpisodeDistributions::defaults();
  d.at(Scenario::Transient, DistanceBucket::Near3m).drop = {900.0, 800.0};
  EXPECT_THROW(d.validate(), ConfigError);
}

TEST(RenderTrace, EmptySegmentsGiveBaseline) {
  auto rng = make_rng(1);
  RenderOptions o;
  o.duration_ms = 2000;
  const auto tr = render_trace({}, link_at(3.0), rng, o);
  ASSERT_EQ(tr.size(), 2000u);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    ASSERT_EQ(tr.q[i], 9);
    ASSERT_EQ(tr.throughput_mbps[i], 900);
  }
}

TEST(RenderTrace, AssociationRampWithinMeasuredBounds) {
  double sum = 0.0;
  constexpr int kN = 2000;
  for (int seed = 0; seed < kN; ++seed) {
    auto rng = make_rng(static_cast<std::uint64_t>(seed));
    const std::vector<Segment> segs{AssociationSegment{100, std::nullopt}};
    RenderOptions o;
    o.duration_ms = 1000;
    const auto tr = render_trace(segs, link_at(4.0), rng, o);
    const auto first = std::find_if(tr.q.begin(), tr.q.end(), [](int q) { return q > 0; });
    ASSERT_EQ(first - tr.q.begin(), 100);
    std::size_t stable = tr.size() - 1;
    while (stable > 0 && tr.q[stable - 1] == 9) --stable;
    const auto ramp = static_cast<double>(stable) - 100.0;
    ASSERT_GE(ramp, 146.0);
    ASSERT_LE(ramp, 387.0);
    sum += ramp;
  }
  EXPECT_NEAR(sum / kN, 245.4, 0.05 * 245.4);
}

TEST(RenderTrace, RealignmentDipIsShort) {
  double sum = 0.0;
  constexpr int kN = 2000;
  for (int seed = 0; seed < kN; ++seed) {
    auto rng = make_rng(static_cast<std::uint64_t>(seed), 5);
    const std::vector<Segment> segs{RealignmentSegment{50, std::nullopt, 4.0}};
    RenderOptions o;
    o.duration_ms = 200;
    const auto tr = render_trace(segs, link_at(3.0), rng, o);
    int below = 0;
    for (int q : tr.q) below += q < 9;
    ASSERT_LE(below, 15);
    ASSERT_GE(*std::min_element(tr.q.begin(), tr.q.end()), 5);
    sum += below;
  }
  EXPECT_GT(sum / kN, 4.0);
}

TEST(RenderTrace, OverlappingSegmentsRejected) {
  auto rng = make_rng(1);
  const std::vector<Segment> segs{SteadySegment{0, 500}, SteadySegment{400, 100}};
  EXPECT_THROW(render_trace(segs, link_at(3.0), rng), std::invalid_argument);
}

TEST(RenderTrace, DropAndRiseMatchEpisodeWithinOneUnit) {
  const EpisodeSampler sampler;
  for (int seed = 0; seed < 300; ++seed) {
    auto rng = make_rng(static_cast<std::uint64_t>(seed), 6);
    const auto s = scenario_from_id(seed % 3 + 1);
    auto ep = sampler.sample(s, seed % 2 ? 7.0 : 3.0, rng, 9.0, 200);
    if (s != Scenario::Transient) {
      (s == Scenario::PermanentWithNlos ? ep.hold_ms : ep.dwell_ms) = 1000;
    }
    ep.disconnect_after_ms.reset();
    const std::vector<Segment> segs{ep};
    RenderOptions o;
    o.spike_rate_per_s = 0.0;
    const auto tr = render_trace(segs, link_at(3.0), rng, o);
    const int lo = *std::min_element(tr.q.begin(), tr.q.end());
    ASSERT_LE(std::fabs((9 - lo) - ep.drop_delta()), 1.0) << "seed " << seed;
    const int end_level = tr.q[static_cast<std::size_t>(ep.end_ms() - 1)];
    ASSERT_LE(std::fabs((end_level - lo) - ep.recovery_delta()), 1.0) << "seed " << seed;
  }
}

TEST(RenderTrace, SamplesQuantizedAndThroughputConsistent) {
  auto rng = make_rng(9);
  std::vector<Segment> segs{AssociationSegment{0, std::nullopt}};
  TimeMs t = 1000;
  const EpisodeSampler sampler;
  for (int i = 0; i < 6; ++i) {
    auto ep = sampler.sample(scenario_from_id(i % 3 + 1), 7.0, rng, 9.0, t);
    ep.dwell_ms = std::min<TimeMs>(ep.dwell_ms, 3000);
    ep.hold_ms = std::min<TimeMs>(ep.hold_ms, 3000);
    ep.disconnect_after_ms.reset();
    t = ep.end_ms() + 200;
    segs.emplace_back(ep);
    segs.emplace_back(RealignmentSegment{t - 100, std::nullopt, 4.0});
  }
  LinkConfig c = link_at(7.0);
  c.rate_cap_mbps = 800;
  const auto tr = render_trace(segs, c, rng);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    ASSERT_GE(tr.q[i], 0);
    ASSERT_LE(tr.q[i], 10);
    ASSERT_EQ(tr.throughput_mbps[i],
              static_cast<int>(throughput_of(SignalQuality(tr.q[i]), c.rate_cap_mbps)));
  }
}

TEST(RenderTrace, DeterministicForSeed) {
  auto make = [] {
    auto rng = make_rng(42);
    const EpisodeSampler sampler;
    const std::vector<Segment> segs{AssociationSegment{0, std::nullopt},
                                    sampler.sample(Scenario::PermanentNoNlos, 3.0, rng, 9.0, 1000)};
    return render_trace(segs, link_at(3.0), rng);
  };
  const auto a = make();
  const auto b = make();
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.throughput_mbps, b.throughput_mbps);
}

TEST(RenderTrace, LongStandingBlockageKillsFarLink) {
  const EpisodeSampler sampler(EpisodeDistributions::defaults().zero_noise());
  auto rng = make_rng(3);
  auto ep = sampler.sample(Scenario::PermanentNoNlos, 7.0, rng, 9.0, 1000);
  ep.dwell_ms = 20000;
  ASSERT_TRUE(ep.disconnect_after_ms.has_value());
  const std::vector<Segment> segs{ep};
  const auto tr = render_trace(segs, link_at(7.0), rng);
  const auto zero = std::find(tr.throughput_mbps.begin(), tr.throughput_mbps.end(), 0);
  ASSERT_NE(zero, tr.throughput_mbps.end());
  EXPECT_EQ(zero - tr.throughput_mbps.begin(), 1000 + 16329);
}

TEST(RenderTrace, SpikesOnlyDuringPermanentNoNlosDwell) {
  const EpisodeSampler sampler(EpisodeDistributions::defaults().zero_noise());
  auto rng = make_rng(4);
  auto ep = sampler.sample(Scenario::PermanentNoNlos, 3.0, rng, 9.0, 0);
  ep.dwell_ms = 200000;
  RenderOptions o;
  o.spike_rate_per_s = 0.05;
  const auto profile = episode_profile(ep, rng, o);
  int spikes = 0;
  for (std::size_t k = static_cast<std::size_t>(ep.drop_time_ms); k < profile.size(); ++k) {
    if (profile[k] > ep.q_blocked) {
      ++spikes;
      ASSERT_DOUBLE_EQ(profile[k], ep.q_blocked + 2.0);
    }
  }
  EXPECT_GE(spikes, 3);
  EXPECT_LE(spikes, 25);
}

TEST(AssociationLevel, ReachesBaselineAtRampEnd) {
  EXPECT_DOUBLE_EQ(association_level(9.0, 0, 200), 0.5);
  EXPECT_DOUBLE_EQ(association_level(9.0, 200, 200), 9.0);
  EXPECT_LT(std::lround(association_level(9.0, 199, 200)), 9);
}
