#include <gtest/gtest.h>

#include "wigig/handoff_controller.hpp"
#include "wigig/random.hpp"

using namespace wigig;

namespace {

HandoffController::CandidateFn fixed_candidates(std::vector<ApCandidate> list) {
  return [list](TimeMs, ApId current) {
    std::vector<ApCandidate> out;
    for (const auto& c : list) {
      if (c.id != current) out.push_back(c);
    }
    return out;
  };
}

HandoffConfig no_corner() {
  HandoffConfig cfg;
  cfg.corner_rule_enabled = false;
  return cfg;
}

struct Run {
  std::vector<HandoffRecord> records;
  std::vector<DetectorEvent> events;
};

Run drive(HandoffController& hc, const std::vector<int>& q, TimeMs t0 = 0) {
  Run r;
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto out = hc.on_sample(t0 + static_cast<TimeMs>(i), q[i]);
    if (out.record) r.records.push_back(*out.record);
    r.events.insert(r.events.end(), out.events.begin(), out.events.end());
  }
  return r;
}

std::vector<int> levels(std::initializer_list<std::pair<int, int>> runs) {
  std::vector<int> q;
  for (auto [level, n] : runs) q.insert(q.end(), static_cast<std::size_t>(n), level);
  return q;
}

}  // namespace

TEST(SwitchTime, SumOfComponents) {
  HandoffConfig cfg;
  EXPECT_EQ(cfg.switch_duration_ms(), 2749);
  EXPECT_EQ(total_switch_time(cfg), 6249);
  cfg.detector.t_drop_threshold_ms = 1000;
  cfg.detector.t_recovery_threshold_ms = 2000;
  EXPECT_EQ(total_switch_time(cfg), 5749);
  cfg.detector.t_recovery_threshold_ms = 3000;
  EXPECT_EQ(total_switch_time(cfg), 6749);

  HandoffConfig alt;
  alt.discovery_ms = 1000;
  alt.auth_ms = 500;
  alt.assoc_ms = 1249;
  EXPECT_EQ(total_switch_time(alt), 6249);

  HandoffConfig zero;
  zero.discovery_ms = zero.auth_ms = zero.assoc_ms = 0;
  zero.detector.t_drop_threshold_ms = 0;
  zero.detector.t_recovery_threshold_ms = 0;
  EXPECT_EQ(total_switch_time(zero), 0);
}

TEST(SwitchTime, ValidationRejectsNegatives) {
  HandoffConfig cfg;
  cfg.discovery_ms = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.corner_quality_floor = 11.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SelectTarget, HighestQualityLowestId) {
  const std::vector<ApCandidate> a{{2, 5.0}, {3, 7.0}, {4, 7.0}};
  EXPECT_EQ(select_target_ap(a), 3);
  const std::vector<ApCandidate> b{{9, 1.0}};
  EXPECT_EQ(select_target_ap(b), 9);
  const std::vector<ApCandidate> c{{5, 4.0}, {1, 4.0}};
  EXPECT_EQ(select_target_ap(c), 1);
  EXPECT_THROW(select_target_ap(std::vector<ApCandidate>{}), std::invalid_argument);
}

TEST(Handoff, LongTermBlockageSwitchesOnce) {
  HandoffController hc(no_corner(), fixed_candidates({{1, 9.0}, {2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 1000}, {1, 12000}}));
  ASSERT_EQ(run.records.size(), 1u);
  const auto& r = run.records[0];
  EXPECT_EQ(r.trigger, HandoffTrigger::LongTermBlockage);
  EXPECT_EQ(r.from_ap, 1);
  EXPECT_EQ(r.to_ap, 2);
  EXPECT_EQ(r.t_start_ms, 3999);
  EXPECT_EQ(r.t_complete_ms, 3999 + 2749);
  EXPECT_EQ(r.t_H_ms, 2749);
  EXPECT_EQ(r.t_s_ms, 6249);
  EXPECT_EQ(hc.state().mode, StaMode::Associated);
  EXPECT_EQ(hc.state().current_ap, 2);
}

TEST(Handoff, ShortTermBlockageStays) {
  HandoffController hc(no_corner(), fixed_candidates({{1, 9.0}, {2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 1000}, {1, 800}, {9, 6000}}));
  EXPECT_TRUE(run.records.empty());
  EXPECT_EQ(hc.state().mode, StaMode::Associated);
  EXPECT_EQ(hc.state().current_ap, 1);
}

TEST(Handoff, NoBlockageStays) {
  HandoffController hc(no_corner(), fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 1000}, {8, 5000}}));
  EXPECT_TRUE(run.records.empty());
  EXPECT_EQ(hc.state().current_ap, 1);
}

TEST(Handoff, CharacterizingDuringRecovery) {
  HandoffController hc(no_corner(), fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  drive(hc, levels({{9, 1000}, {3, 100}}));
  EXPECT_EQ(hc.state().mode, StaMode::Characterizing);
}

TEST(Handoff, CornerRuleBelowFloor) {
  HandoffConfig cfg;
  cfg.blockage_handoff_enabled = false;
  HandoffController hc(cfg, fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 600}, {1, 4000}}));
  ASSERT_EQ(run.records.size(), 1u);
  EXPECT_EQ(run.records[0].trigger, HandoffTrigger::CornerEffect);
  EXPECT_EQ(run.records[0].t_start_ms, 600);
  EXPECT_EQ(run.records[0].t_s_ms, 2749);
}

TEST(Handoff, CornerRuleAtFloorDoesNotFire) {
  HandoffConfig cfg;
  cfg.blockage_handoff_enabled = false;
  HandoffController hc(cfg, fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 600}, {2, 8000}}));
  EXPECT_TRUE(run.records.empty());
  EXPECT_EQ(hc.state().current_ap, 1);
}

TEST(Handoff, CornerRuleDisabled) {
  HandoffConfig cfg;
  cfg.blockage_handoff_enabled = false;
  cfg.corner_rule_enabled = false;
  HandoffController hc(cfg, fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  const auto run = drive(hc, levels({{9, 600}, {0, 8000}}));
  EXPECT_TRUE(run.records.empty());
  EXPECT_EQ(hc.state().current_ap, 1);
}

TEST(Handoff, NoCandidatesDisconnects) {
  HandoffController hc(no_corner(), fixed_candidates({}));
  hc.connect(0, 1);
  drive(hc, levels({{9, 1000}, {1, 5000}}));
  EXPECT_EQ(hc.state().mode, StaMode::Disconnected);
  EXPECT_FALSE(hc.state().current_ap);
  EXPECT_GT(hc.ignored_samples(), 0u);
}

TEST(Handoff, DisconnectedSamplesCounted) {
  HandoffController hc({});
  drive(hc, levels({{5, 250}}));
  EXPECT_EQ(hc.ignored_samples(), 250u);
  EXPECT_EQ(hc.state().mode, StaMode::Disconnected);
}

TEST(Handoff, AssociationRampAfterSwitch) {
  HandoffController hc(no_corner(), fixed_candidates({{2, 8.0}}), [](ApId) { return TimeMs{300}; });
  hc.connect(0, 1);
  drive(hc, levels({{9, 1000}, {1, 3000}}));
  ASSERT_EQ(hc.state().mode, StaMode::Switching);
  EXPECT_EQ(hc.switch_target(), 2);
  drive(hc, levels({{1, 2749}}), 4000);
  EXPECT_EQ(hc.state().mode, StaMode::Associating);
  drive(hc, levels({{8, 300}}), 6749);
  EXPECT_EQ(hc.state().mode, StaMode::Associated);
  EXPECT_EQ(hc.state().current_ap, 2);
}

TEST(Handoff, OutOfOrderInputThrows) {
  HandoffController hc({});
  hc.connect(100, 1);
  hc.on_sample(101, 9);
  EXPECT_THROW(hc.on_sample(50, 9), InputError);
  const DetectorEvent old{EventKind::NoBlockage, 10, {}, std::nullopt};
  EXPECT_THROW(hc.on_detector_event(old), InputError);
}

TEST(Handoff, GapResetsDetector) {
  HandoffController hc(no_corner(), fixed_candidates({{2, 8.0}}));
  hc.connect(0, 1);
  drive(hc, levels({{9, 1000}, {1, 200}}));
  ASSERT_EQ(hc.state().mode, StaMode::Characterizing);
  EXPECT_NO_THROW(hc.on_sample(5000, 9));
  EXPECT_EQ(hc.detector().phase(), BlockageDetector::Phase::Watch);
}

TEST(Handoff, ManualSwitch) {
  HandoffController hc({}, fixed_candidates({{2, 8.0}, {3, 9.0}}));
  EXPECT_FALSE(hc.start_manual_handoff(0));
  hc.connect(0, 1);
  EXPECT_TRUE(hc.start_manual_handoff(10));
  EXPECT_EQ(hc.switch_target(), 3);
  const auto rec = hc.advance(10 + 2749);
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->trigger, HandoffTrigger::Manual);
  EXPECT_EQ(rec->t_s_ms, 2749);
}

TEST(Handoff, CsvRow) {
  const HandoffRecord r{HandoffTrigger::LongTermBlockage, 1, 2, 3999, 6748, 2749, 6249};
  EXPECT_EQ(handoff_row(r), "long_term_blockage,1,2,3999,6748,2749,6249");
  const std::vector<HandoffRecord> v{r};
  EXPECT_EQ(handoffs_to_csv(v).substr(0, kHandoffHeader.size()), kHandoffHeader);
}

TEST(HandoffFuzz, InvariantsHoldOnRandomStreams) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = make_rng(seed, 7);
    std::uniform_int_distribution<int> level(0, 10);
    std::uniform_int_distribution<int> run(1, 3000);
    std::bernoulli_distribution has_candidates(0.8);
    const bool cand = has_candidates(rng);
    HandoffController hc({}, cand ? fixed_candidates({{1, 9.0}, {2, 7.0}, {3, 8.0}})
                                  : fixed_candidates({}));
    hc.connect(0, 1);
    TimeMs t = 0;
    TimeMs last_complete = -1;
    while (t < 60000) {
      const int q = level(rng);
      const int n = run(rng);
      for (int i = 0; i < n; ++i, ++t) {
        const auto out = hc.on_sample(t, q);
        const auto& s = hc.state();
        const bool serving = s.mode == StaMode::Associated || s.mode == StaMode::Characterizing;
        ASSERT_EQ(serving, s.current_ap.has_value()) << "seed " << seed << " t " << t;
        if (out.record) {
          ASSERT_NE(out.record->from_ap, out.record->to_ap);
          ASSERT_EQ(out.record->t_complete_ms - out.record->t_start_ms, 2749);
          ASSERT_GE(out.record->t_start_ms, last_complete);
          last_complete = out.record->t_complete_ms;
        }
      }
    }
  }
}
