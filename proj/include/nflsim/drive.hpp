#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "nflsim/ep_model.hpp"
#include "nflsim/error.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"
#include "nflsim/rng.hpp"
#include "nflsim/sampler.hpp"
#include "nflsim/strategy.hpp"

namespace nflsim {

enum class DriveOutcome { touchdown, field_goal, punt, turnover, turnover_on_downs, missed_fg, safety };

inline std::string_view to_string(DriveOutcome o) {
  switch (o) {
    case DriveOutcome::touchdown: return "touchdown";
    case DriveOutcome::field_goal: return "field_goal";
    case DriveOutcome::punt: return "punt";
    case DriveOutcome::turnover: return "turnover";
    case DriveOutcome::turnover_on_downs: return "turnover_on_downs";
    case DriveOutcome::missed_fg: return "missed_fg";
    case DriveOutcome::safety: return "safety";
  }
  return "?";
}

inline constexpr int points_for(DriveOutcome o) {
  return o == DriveOutcome::touchdown ? kTouchdownPoints : (o == DriveOutcome::field_goal ? kFieldGoalPoints : 0);
}

// Which side scored in an until-score episode.
enum class Scorer { none, strategy, opponent };

inline std::string_view to_string(Scorer s) {
  switch (s) {
    case Scorer::none: return "none";
    case Scorer::strategy: return "strategy";
    case Scorer::opponent: return "opponent";
  }
  return "?";
}

// Terminal result of one simulated drive (or of one until-score episode, in
// which case it describes the final drive).
struct DriveRecord {
  DriveOutcome outcome = DriveOutcome::punt;
  int points = 0;
  int n_plays = 0;
  int end_yards_from_own_goal = 1;
  std::optional<int> turnover_yardline;  // offense's yardline where possession was lost
  std::optional<int> next_start;         // receiving team's yards from its own goal
  Scorer scoring_team = Scorer::strategy;  // single drives: strategy if points > 0
  int possessions = 1;

  bool operator==(const DriveRecord&) const = default;
};

inline bool satisfies_invariants(const DriveRecord& r) {
  if (r.points != points_for(r.outcome)) return false;
  const bool scored = r.outcome == DriveOutcome::touchdown || r.outcome == DriveOutcome::field_goal;
  if (r.turnover_yardline.has_value() == scored) return false;
  if (r.end_yards_from_own_goal < 1 || r.end_yards_from_own_goal > 99) return false;
  return r.n_plays >= 0;
}

using StepResult = std::variant<GameState, DriveRecord>;

namespace detail {

inline DriveRecord terminal(DriveOutcome o, int n_plays, int end_yl, std::optional<int> lost_at,
                            std::optional<int> next_start) {
  DriveRecord r;
  r.outcome = o;
  r.points = points_for(o);
  r.n_plays = n_plays;
  r.end_yards_from_own_goal = std::clamp(end_yl, 1, 99);
  r.turnover_yardline = lost_at;
  r.next_start = next_start;
  r.scoring_team = r.points > 0 ? Scorer::strategy : Scorer::none;
  return r;
}

}  // namespace detail

// Receiving team's yards from its own goal after a punt from `yl`.
inline int punt_receiving_yardline(int yl, double net_yards) {
  const double landing = yl + net_yards;
  if (landing >= 100.0) return kTouchbackYardline;
  return 100 - std::clamp(static_cast<int>(std::lround(landing)), 1, 99);
}

// Applies one sampled play to the drive. `pool`, when given, supplies the
// mean net punt for punts without a recorded net.
inline StepResult down_distance_updater(const GameState& s, const Play& play, const PlayPool* pool = nullptr) {
  const int plays = s.plays_run + 1;
  const int yl = s.yards_from_own_goal;

  if (play.kind == PlayKind::field_goal) {
    if (play.field_goal_made.value_or(false)) {
      return detail::terminal(DriveOutcome::field_goal, plays, yl, std::nullopt, kTouchbackYardline);
    }
    const int spot = std::max(1, yl - kMissedFieldGoalSetback);
    return detail::terminal(DriveOutcome::missed_fg, plays, yl, yl, 100 - spot);
  }
  if (play.kind == PlayKind::punt) {
    const double net = play.net_kick_yards ? *play.net_kick_yards : (pool ? pool->mean_net_punt(yl) : 40.0);
    return detail::terminal(DriveOutcome::punt, plays, yl, yl, punt_receiving_yardline(yl, net));
  }

  const int raw = yl + play.yards_gained;
  if (play.is_turnover) {
    const int spot = std::clamp(raw, 1, 99);
    return detail::terminal(DriveOutcome::turnover, plays, spot, spot, 100 - spot);
  }
  if (play.is_touchdown || raw >= 100) {
    return detail::terminal(DriveOutcome::touchdown, plays, 99, std::nullopt, kTouchbackYardline);
  }
  if (raw < 1) {
    return detail::terminal(DriveOutcome::safety, plays, 1, 1, kTouchbackYardline);
  }
  if (play.yards_gained >= s.yards_to_go) {
    return GameState{1, std::min(10, 100 - raw), raw, plays};
  }
  if (s.down == 4) {
    return detail::terminal(DriveOutcome::turnover_on_downs, plays, raw, raw, 100 - raw);
  }
  return GameState{s.down + 1, s.yards_to_go - play.yards_gained, raw, plays};
}

// Receives warnings from the engine (play caps, possession caps). Defaults to
// stderr; tests may silence it.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(const std::string& msg) {
  if (auto& sink = warning_sink()) sink(msg);
}

inline constexpr int kMaxPlaysPerDrive = 40;
inline constexpr int kMaxPossessionsPerEpisode = 25;

struct SimConfig {
  std::size_t n_sims = 10000;
  int from_yard_line = 25;
  bool single_drive = true;
  std::uint64_t master_seed = 1;
  StrategySpec opponent_strategy = StrategySpec::empirical();

  void validate() const {
    if (n_sims < 1) throw ValidationError("n_sims must be >= 1");
    if (from_yard_line < 1 || from_yard_line > 99) throw ValidationError("from_yard_line must lie in [1, 99]");
    opponent_strategy.validate();
  }
};

// Runs one drive from first-and-10 at `start_yardline`.
inline DriveRecord simulate_drive(const PlayPool& pool, const StrategySpec& strategy, int start_yardline,
                                  const SamplerConfig& cfg, Rng& rng, const EPModel* ep = nullptr) {
  if (start_yardline < 1 || start_yardline > 99) throw ValidationError("start yardline must lie in [1, 99]");
  GameState state = GameState::first_and_ten(start_yardline);
  for (;;) {
    if (state.plays_run >= kMaxPlaysPerDrive) {
      warn("drive exceeded " + std::to_string(kMaxPlaysPerDrive) + " plays; ending it on downs at " +
           describe(state));
      const int yl = state.yards_from_own_goal;
      return detail::terminal(DriveOutcome::turnover_on_downs, state.plays_run, yl, yl, 100 - yl);
    }
    const Play* play = nullptr;
    try {
      play = &sample_play(pool, strategy, state, cfg, rng, ep);
    } catch (const NoEligiblePlaysError& e) {
      throw NoEligiblePlaysError(e.state(), "drive from own " + std::to_string(start_yardline) + " under " +
                                                strategy.label() + ", play " + std::to_string(state.plays_run + 1));
    }
    StepResult step = down_distance_updater(state, *play, &pool);
    if (auto* done = std::get_if<DriveRecord>(&step)) return *done;
    state = std::get<GameState>(step);
  }
}

// Alternating possessions until either side scores or the possession cap is
// hit. Field position carries over via each drive's `next_start`.
inline DriveRecord simulate_episode(const PlayPool& pool, const StrategySpec& strategy, const SimConfig& cfg,
                                    const SamplerConfig& scfg, Rng& rng, const EPModel* ep = nullptr) {
  int start = cfg.from_yard_line;
  int total_plays = 0;
  bool strategy_has_ball = true;
  DriveRecord last;
  for (int k = 1; k <= kMaxPossessionsPerEpisode; ++k) {
    const StrategySpec& on_offense = strategy_has_ball ? strategy : cfg.opponent_strategy;
    last = simulate_drive(pool, on_offense, start, scfg, rng, ep);
    total_plays += last.n_plays;
    last.n_plays = total_plays;
    last.possessions = k;
    const Scorer offense = strategy_has_ball ? Scorer::strategy : Scorer::opponent;
    const Scorer defense = strategy_has_ball ? Scorer::opponent : Scorer::strategy;
    if (last.points > 0) {
      last.scoring_team = offense;
      return last;
    }
    if (last.outcome == DriveOutcome::safety) {
      last.scoring_team = defense;
      return last;
    }
    start = last.next_start.value_or(kTouchbackYardline);
    strategy_has_ball = !strategy_has_ball;
  }
  warn("episode reached " + std::to_string(kMaxPossessionsPerEpisode) + " possessions without a score");
  last.scoring_team = Scorer::none;
  return last;
}

// Runs cfg.n_sims drives (or until-score episodes). Drive i uses a random
// stream derived from (master_seed, i), so results do not depend on `threads`.
inline std::vector<DriveRecord> sample_drives(const PlayPool& pool, const StrategySpec& strategy,
                                              const SimConfig& cfg, const SamplerConfig& scfg = {},
                                              const EPModel* ep = nullptr, unsigned threads = 1) {
  cfg.validate();
  scfg.validate();
  strategy.validate();
  if ((strategy.needs_ep_model() || cfg.opponent_strategy.needs_ep_model()) && !ep) {
    throw ConfigError("expected_points strategy requires an EP model");
  }
  std::vector<DriveRecord> out(cfg.n_sims);
  auto run_one = [&](std::size_t i) {
    Rng rng = make_rng(cfg.master_seed, i);
    out[i] = cfg.single_drive ? simulate_drive(pool, strategy, cfg.from_yard_line, scfg, rng, ep)
                              : simulate_episode(pool, strategy, cfg, scfg, rng, ep);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_sims));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cfg.n_sims; ++i) run_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::size_t error_at = cfg.n_sims;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < cfg.n_sims; i = next.fetch_add(1)) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (i < error_at) {
            error_at = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace nflsim
