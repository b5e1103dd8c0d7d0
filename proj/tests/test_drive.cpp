#include <gtest/gtest.h>

#include "support.hpp"

using namespace nflsim;
using namespace testing_support;

namespace {

const DriveRecord& as_record(const StepResult& r) { return std::get<DriveRecord>(r); }
const GameState& as_state(const StepResult& r) { return std::get<GameState>(r); }

SimConfig sims(std::size_t n, std::uint64_t seed = 1, int from = 25) {
  SimConfig c;
  c.n_sims = n;
  c.master_seed = seed;
  c.from_yard_line = from;
  return c;
}

// Random plays plus one play for every (down, ytg key) so the last ladder
// rung never comes up empty for the empirical strategy.
std::vector<Play> micro_pool(std::mt19937_64& g) {
  RandomPlayOptions o;
  o.turnover_rate = 0.05;
  o.touchdown_rate = 0.0;
  auto plays = random_plays(g, 30, o);
  std::uniform_int_distribution<int> gain(-4, 14), yl_d(1, 80);
  for (int down = 1; down <= 4; ++down) {
    for (int ytg = 1; ytg <= 20; ++ytg) {
      const int yl = std::min(yl_d(g), 100 - ytg);
      plays.push_back(run(down, ytg, yl, gain(g)));
    }
  }
  return plays;
}

}  // namespace

TEST(Updater, GainShortOfLineToGain) {
  auto s = as_state(down_distance_updater(GameState{1, 10, 25, 0}, run(1, 10, 25, 5)));
  EXPECT_EQ(s, (GameState{2, 5, 30, 1}));
}

TEST(Updater, FirstDownResetsDistance) {
  EXPECT_EQ(as_state(down_distance_updater(GameState{3, 4, 40, 7}, pass(3, 4, 40, 12))), (GameState{1, 10, 52, 8}));
  EXPECT_EQ(as_state(down_distance_updater(GameState{3, 2, 90, 0}, run(3, 2, 90, 3))), (GameState{1, 7, 93, 1}));
}

TEST(Updater, FailedFourthDown) {
  auto r = as_record(down_distance_updater(GameState{4, 2, 50, 3}, run(4, 2, 50, 1)));
  EXPECT_EQ(r.outcome, DriveOutcome::turnover_on_downs);
  EXPECT_EQ(r.end_yards_from_own_goal, 51);
  EXPECT_EQ(r.turnover_yardline, 51);
  EXPECT_EQ(r.next_start, 49);
  EXPECT_EQ(r.n_plays, 4);
  EXPECT_EQ(r.points, 0);
}

TEST(Updater, Touchdowns) {
  auto a = as_record(down_distance_updater(GameState{1, 5, 95, 0}, run(1, 5, 95, 6)));
  EXPECT_EQ(a.outcome, DriveOutcome::touchdown);
  EXPECT_EQ(a.points, 7);
  EXPECT_FALSE(a.turnover_yardline);
  auto b = as_record(down_distance_updater(GameState{2, 3, 97, 0}, run(2, 3, 97, 3)));
  EXPECT_EQ(b.outcome, DriveOutcome::touchdown);
  auto flagged = pass(1, 10, 40, 20);
  flagged.is_touchdown = true;
  EXPECT_EQ(as_record(down_distance_updater(GameState{1, 10, 40, 0}, flagged)).outcome, DriveOutcome::touchdown);
}

TEST(Updater, Safety) {
  auto r = as_record(down_distance_updater(GameState{2, 10, 3, 0}, run(2, 10, 3, -4)));
  EXPECT_EQ(r.outcome, DriveOutcome::safety);
  EXPECT_EQ(r.points, 0);
  EXPECT_EQ(r.end_yards_from_own_goal, 1);
}

TEST(Updater, TurnoverSpotIsClamped) {
  auto p = pass(1, 10, 90, 15);
  p.is_turnover = true;
  auto r = as_record(down_distance_updater(GameState{1, 10, 90, 0}, p));
  EXPECT_EQ(r.outcome, DriveOutcome::turnover);
  EXPECT_EQ(r.turnover_yardline, 99);
  EXPECT_EQ(r.next_start, 1);
}

TEST(Updater, Kicks) {
  auto made = as_record(down_distance_updater(GameState{4, 5, 70, 0}, field_goal(4, 5, 70, true)));
  EXPECT_EQ(made.outcome, DriveOutcome::field_goal);
  EXPECT_EQ(made.points, 3);
  EXPECT_EQ(made.next_start, 25);
  auto missed = as_record(down_distance_updater(GameState{4, 5, 70, 0}, field_goal(4, 5, 70, false)));
  EXPECT_EQ(missed.outcome, DriveOutcome::missed_fg);
  EXPECT_EQ(missed.turnover_yardline, 70);
  EXPECT_EQ(missed.next_start, 38);
  auto punted = as_record(down_distance_updater(GameState{4, 5, 30, 0}, punt(4, 5, 30, 40)));
  EXPECT_EQ(punted.outcome, DriveOutcome::punt);
  EXPECT_EQ(punted.next_start, 30);
  auto touchback = as_record(down_distance_updater(GameState{4, 5, 70, 0}, punt(4, 5, 70, 40)));
  EXPECT_EQ(touchback.next_start, 25);
}

TEST(Updater, PuntWithoutNetUsesPoolMean) {
  PlayPool pool = build_index({punt(4, 10, 32, 50), punt(4, 10, 35, 30)});
  auto p = punt(4, 10, 33, 0);
  p.net_kick_yards.reset();
  EXPECT_EQ(as_record(down_distance_updater(GameState{4, 10, 33, 0}, p, &pool)).next_start, 27);
  EXPECT_EQ(as_record(down_distance_updater(GameState{4, 10, 33, 0}, p)).next_start, 27);
}

TEST(Updater, ResultsAreAlwaysValid) {
  std::mt19937_64 g(41);
  for (int i = 0; i < 100000; ++i) {
    GameState s = random_state(g);
    s.plays_run = static_cast<int>(g() % 30);
    Play p = random_play(g);
    StepResult r = down_distance_updater(s, p);
    if (auto* st = std::get_if<GameState>(&r)) {
      ASSERT_TRUE(st->valid()) << describe(*st);
      ASSERT_EQ(st->plays_run, s.plays_run + 1);
      ASSERT_EQ(st->yards_from_own_goal, s.yards_from_own_goal + p.yards_gained);
      if (st->down == 1) {
        ASSERT_GE(p.yards_gained, s.yards_to_go);
      } else {
        ASSERT_EQ(st->down, s.down + 1);
        ASSERT_EQ(st->yards_to_go, s.yards_to_go - p.yards_gained);
      }
    } else {
      const auto& rec = std::get<DriveRecord>(r);
      ASSERT_TRUE(satisfies_invariants(rec));
      ASSERT_EQ(rec.n_plays, s.plays_run + 1);
      ASSERT_TRUE(rec.next_start.has_value());
      ASSERT_GE(*rec.next_start, 1);
      ASSERT_LE(*rec.next_start, 99);
    }
  }
}

TEST(SimulateDrive, FifteenPlayTouchdown) {
  // Only a first-and-10 run and a second-and-5 run near the start, plus a
  // goal-to-go run; the ladder keeps falling back to the same two plays.
  PlayPool pool = build_index({run(1, 10, 25, 5), run(2, 5, 30, 5), run(1, 5, 95, 5)});
  Rng rng = make_rng(1, 0);
  auto r = simulate_drive(pool, StrategySpec::empirical(), 25, {}, rng);
  EXPECT_EQ(r.outcome, DriveOutcome::touchdown);
  EXPECT_EQ(r.n_plays, 15);
  EXPECT_EQ(r.points, 7);
}

TEST(SimulateDrive, PuntOnlyPool) {
  PlayPool pool = build_index({punt(1, 10, 25, 45)});
  Rng rng = make_rng(1, 0);
  auto r = simulate_drive(pool, StrategySpec::empirical(), 25, {}, rng);
  EXPECT_EQ(r.outcome, DriveOutcome::punt);
  EXPECT_EQ(r.n_plays, 1);
  EXPECT_EQ(r.next_start, 30);
}

TEST(SimulateDrive, NoEligiblePlaysNamesTheState) {
  PlayPool pool = build_index({run(1, 10, 25, 3)});
  Rng rng = make_rng(1, 0);
  try {
    simulate_drive(pool, StrategySpec::empirical(), 25, {}, rng);
    FAIL() << "expected NoEligiblePlaysError";
  } catch (const NoEligiblePlaysError& e) {
    EXPECT_EQ(e.state().down, 2);
    EXPECT_NE(std::string(e.what()).find("play 2"), std::string::npos);
  }
}

TEST(SimulateDrive, MatchesNaiveInterpreter) {
  std::mt19937_64 g(2718);
  int finished = 0, stuck = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto plays = micro_pool(g);
    PlayPool pool = build_index(plays);
    for (int rep = 0; rep < 5; ++rep) {
      const std::uint64_t seed = g();
      const int start = 1 + static_cast<int>(g() % 99);
      Rng lib_rng(seed), naive_rng(seed);
      // Same uniform draw over the eligible set, listed in the engine's
      // bucket order (kind, down, yardline when windowed, insertion).
      auto choose = [&](std::vector<std::uint32_t> elig, bool windowed) {
        std::stable_sort(elig.begin(), elig.end(), [&](std::uint32_t a, std::uint32_t b) {
          auto key = [&](std::uint32_t i) {
            return std::make_tuple(static_cast<int>(plays[i].kind), plays[i].down,
                                   windowed ? plays[i].yards_from_own_goal : 0);
          };
          return key(a) < key(b);
        });
        std::uniform_int_distribution<std::size_t> pick(0, elig.size() - 1);
        return elig[pick(naive_rng)];
      };
      auto expect = naive_drive(plays, start, KindSet::all(), choose);
      if (!expect) {
        EXPECT_THROW(simulate_drive(pool, StrategySpec::empirical(), start, {}, lib_rng), NoEligiblePlaysError);
        ++stuck;
        continue;
      }
      auto got = simulate_drive(pool, StrategySpec::empirical(), start, {}, lib_rng);
      ASSERT_EQ(to_naive(got), *expect) << "trial " << trial << " start " << start;
      ASSERT_TRUE(satisfies_invariants(got));
      ASSERT_LE(got.n_plays, kMaxPlaysPerDrive);
      ++finished;
    }
  }
  EXPECT_GT(finished, 400);
  EXPECT_EQ(finished + stuck, 500);
}

TEST(SampleDrives, SingleSimulationTouchdownPool) {
  auto td = run(1, 10, 25, 10);
  td.is_touchdown = true;
  PlayPool pool = build_index({td});
  auto recs = sample_drives(pool, StrategySpec::empirical(), sims(1));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].outcome, DriveOutcome::touchdown);
  EXPECT_EQ(recs[0].points, 7);
}

TEST(SampleDrives, IndependentOfThreadCount) {
  std::mt19937_64 g(8);
  auto plays = micro_pool(g);
  for (int yl = 1; yl <= 99; ++yl) plays.push_back(punt(4, std::min(10, 100 - yl), yl, 40));
  PlayPool pool = build_index(plays);
  QuietWarnings quiet;
  for (bool single : {true, false}) {
    auto cfg = sims(3000, 99);
    cfg.single_drive = single;
    std::vector<DriveRecord> a, b, c;
    try {
      a = sample_drives(pool, StrategySpec::empirical(), cfg, {}, nullptr, 1);
    } catch (const NoEligiblePlaysError&) {
      EXPECT_THROW(sample_drives(pool, StrategySpec::empirical(), cfg, {}, nullptr, 4), NoEligiblePlaysError);
      continue;
    }
    b = sample_drives(pool, StrategySpec::empirical(), cfg, {}, nullptr, 4);
    c = sample_drives(pool, StrategySpec::empirical(), cfg, {}, nullptr, 7);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
  }
}

TEST(SampleDrives, SeedChangesResults) {
  std::mt19937_64 g(9);
  PlayPool pool = build_index(random_plays(g, 5000));
  auto a = sample_drives(pool, StrategySpec::empirical(), sims(500, 1));
  auto b = sample_drives(pool, StrategySpec::empirical(), sims(500, 2));
  EXPECT_NE(a, b);
  EXPECT_EQ(a, sample_drives(pool, StrategySpec::empirical(), sims(500, 1)));
}

TEST(SampleDrives, RecordsSatisfyInvariants) {
  std::mt19937_64 g(10);
  PlayPool pool = build_index(random_plays(g, 20000));
  for (const auto& spec : {StrategySpec::empirical(), StrategySpec::fourth_down(FourthDownVariant::always_go),
                           StrategySpec::fourth_down(FourthDownVariant::never_go), StrategySpec::yds_less_than(3),
                           StrategySpec::pass_rush(0.6)}) {
    for (const auto& r : sample_drives(pool, spec, sims(2000, 4), {}, nullptr, 2)) {
      ASSERT_TRUE(satisfies_invariants(r)) << spec.label();
      ASSERT_LE(r.n_plays, kMaxPlaysPerDrive);
      if (spec.is(FourthDownVariant::always_go)) {
        ASSERT_NE(r.outcome, DriveOutcome::punt);
        ASSERT_NE(r.outcome, DriveOutcome::field_goal);
      }
      if (spec.is(FourthDownVariant::never_go)) ASSERT_NE(r.outcome, DriveOutcome::turnover_on_downs);
    }
  }
}

TEST(SampleDrives, ExpectedPointsNeedsModel) {
  PlayPool pool = build_index({run(1, 10, 25, 3)});
  EXPECT_THROW(sample_drives(pool, StrategySpec::fourth_down(FourthDownVariant::expected_points), sims(5)),
               ConfigError);
}

TEST(SampleDrives, RejectsBadConfig) {
  PlayPool pool = build_index({run(1, 10, 25, 3)});
  EXPECT_THROW(sample_drives(pool, StrategySpec::empirical(), sims(0)), ValidationError);
  EXPECT_THROW(sample_drives(pool, StrategySpec::empirical(), sims(5, 1, 100)), ValidationError);
  EXPECT_THROW(sample_drives(pool, StrategySpec::empirical(), sims(5), SamplerConfig{10, 5, 5, 3}), ValidationError);
}

TEST(UntilScore, PossessionCapWithPuntOnlyPool) {
  std::vector<Play> plays;
  for (int yl = 1; yl <= 99; ++yl) plays.push_back(punt(1, std::min(10, 100 - yl), yl, 40));
  PlayPool pool = build_index(plays);
  QuietWarnings quiet;
  auto cfg = sims(3);
  cfg.single_drive = false;
  auto recs = sample_drives(pool, StrategySpec::empirical(), cfg);
  for (const auto& r : recs) {
    EXPECT_EQ(r.possessions, kMaxPossessionsPerEpisode);
    EXPECT_EQ(r.scoring_team, Scorer::none);
    EXPECT_EQ(r.n_plays, kMaxPossessionsPerEpisode);
    EXPECT_DOUBLE_EQ(strategy_points(r), 0.0);
  }
  EXPECT_EQ(quiet.seen.size(), 3u);
}

TEST(UntilScore, SafetyCreditsDefense) {
  std::vector<Play> plays{run(1, 10, 25, -25)};
  PlayPool pool = build_index(plays);
  auto cfg = sims(2);
  cfg.single_drive = false;
  auto recs = sample_drives(pool, StrategySpec::empirical(), cfg);
  for (const auto& r : recs) {
    EXPECT_EQ(r.outcome, DriveOutcome::safety);
    EXPECT_EQ(r.possessions, 1);
    EXPECT_EQ(r.scoring_team, Scorer::opponent);
    EXPECT_DOUBLE_EQ(strategy_points(r), -2.0);
  }
}

TEST(UntilScore, OpponentScoreIsNegative) {
  // The strategy team punts; the opponent can only run for a touchdown.
  std::vector<Play> plays{punt(1, 10, 25, 40)};
  auto td = run(1, 10, 35, 65);
  td.is_touchdown = true;
  plays.push_back(td);
  PlayPool pool = build_index(plays);
  auto cfg = sims(1);
  cfg.single_drive = false;
  cfg.opponent_strategy = StrategySpec::fourth_down(FourthDownVariant::never_go);
  auto r = sample_drives(pool, StrategySpec::empirical(), cfg)[0];
  EXPECT_EQ(r.possessions, 2);
  EXPECT_EQ(r.scoring_team, Scorer::opponent);
  EXPECT_EQ(r.n_plays, 2);
  EXPECT_DOUBLE_EQ(strategy_points(r), -7.0);
}
