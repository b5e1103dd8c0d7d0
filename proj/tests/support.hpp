#pragma once

// Shared fixtures and brute-force oracles for the test suite. The oracles are
// written directly from the rules, without touching the library's indexes.

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nflsim/drive.hpp"
#include "nflsim/ep_model.hpp"
#include "nflsim/ingest.hpp"
#include "nflsim/pool.hpp"
#include "nflsim/sampler.hpp"
#include "nflsim/stats.hpp"
#include "nflsim/strategy.hpp"

namespace testing_support {

using namespace nflsim;

inline Play make_play(PlayKind kind, int down, int ytg, int yl, int gained = 0) {
  Play p;
  p.kind = kind;
  p.down = down;
  p.yards_to_go = ytg;
  p.yards_from_own_goal = yl;
  p.yards_gained = gained;
  p.team = "KC";
  p.season = 2018;
  if (kind == PlayKind::field_goal) p.field_goal_made = true;
  if (kind == PlayKind::punt) p.net_kick_yards = 40;
  if (kind == PlayKind::pass) p.passing.attempt = true;
  return p;
}

inline Play run(int down, int ytg, int yl, int gained) { return make_play(PlayKind::run, down, ytg, yl, gained); }
inline Play pass(int down, int ytg, int yl, int gained) { return make_play(PlayKind::pass, down, ytg, yl, gained); }

inline Play punt(int down, int ytg, int yl, int net) {
  auto p = make_play(PlayKind::punt, down, ytg, yl);
  p.net_kick_yards = net;
  return p;
}

inline Play field_goal(int down, int ytg, int yl, bool made) {
  auto p = make_play(PlayKind::field_goal, down, ytg, yl);
  p.field_goal_made = made;
  return p;
}

inline GameState random_state(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> yl_d(1, 99), down_d(1, 4);
  GameState s;
  s.down = down_d(rng);
  s.yards_from_own_goal = yl_d(rng);
  std::uniform_int_distribution<int> ytg_d(1, std::min(25, 100 - s.yards_from_own_goal));
  s.yards_to_go = ytg_d(rng);
  return s;
}

inline const std::vector<std::string>& team_codes() {
  static const std::vector<std::string> teams{"ARI", "ATL", "BAL", "BUF", "CAR", "CHI", "CIN", "CLE",
                                              "DAL", "DEN", "DET", "GB",  "HOU", "IND", "JAX", "KC",
                                              "LA",  "LAC", "MIA", "MIN", "NE",  "NO",  "NYG", "NYJ",
                                              "OAK", "PHI", "PIT", "SEA", "SF",  "TB",  "TEN", "WAS"};
  return teams;
}

struct RandomPlayOptions {
  int max_ytg = 25;
  int n_teams = 32;
  double turnover_rate = 0.03;
  double touchdown_rate = 0.03;
};

inline Play random_play(std::mt19937_64& rng, const RandomPlayOptions& o = {}) {
  std::uniform_int_distribution<int> kind_d(0, 9), down_d(1, 4), yl_d(1, 99), gain_d(-10, 30);
  std::uniform_real_distribution<double> u(0, 1);
  const int k = kind_d(rng);
  const PlayKind kind = k < 5 ? PlayKind::pass : (k < 8 ? PlayKind::run : (k < 9 ? PlayKind::punt : PlayKind::field_goal));
  Play p;
  p.kind = kind;
  p.down = down_d(rng);
  p.yards_from_own_goal = yl_d(rng);
  std::uniform_int_distribution<int> ytg_d(1, std::min(o.max_ytg, 100 - p.yards_from_own_goal));
  p.yards_to_go = ytg_d(rng);
  std::uniform_int_distribution<int> team_d(0, o.n_teams - 1);
  p.team = team_codes()[static_cast<std::size_t>(team_d(rng)) % team_codes().size()];
  p.season = u(rng) < 0.5 ? 2018 : 2019;
  if (kind == PlayKind::pass || kind == PlayKind::run) {
    p.yards_gained = gain_d(rng);
    p.is_turnover = u(rng) < o.turnover_rate;
    p.is_touchdown = !p.is_turnover && (p.yards_from_own_goal + p.yards_gained >= 100 || u(rng) < o.touchdown_rate);
    if (kind == PlayKind::pass) {
      p.passing.attempt = u(rng) < 0.93;
      p.passing.complete = p.passing.attempt && !p.is_turnover && u(rng) < 0.65;
      p.passing.interception = p.passing.attempt && p.is_turnover;
      p.passing.yards = p.passing.complete ? p.yards_gained : 0;
      p.passing.touchdown = p.passing.complete && p.is_touchdown;
    }
  } else if (kind == PlayKind::punt) {
    std::uniform_int_distribution<int> net_d(20, 60);
    p.net_kick_yards = net_d(rng);
  } else {
    p.field_goal_made = u(rng) < 0.8;
  }
  return p;
}

inline std::vector<Play> random_plays(std::mt19937_64& rng, std::size_t n, const RandomPlayOptions& o = {}) {
  std::vector<Play> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_play(rng, o));
  return out;
}

// ---------------------------------------------------------------------------
// Linear-scan oracles

inline std::vector<std::uint32_t> scan_lookup(std::span<const Play> plays, int down, int ytg, int yl,
                                              std::optional<PlayKind> kind = std::nullopt) {
  std::vector<std::uint32_t> out;
  const int key = std::min(std::max(ytg, 1), 20);
  for (std::uint32_t i = 0; i < plays.size(); ++i) {
    const Play& p = plays[i];
    if (kind && p.kind != *kind) continue;
    if (p.down == down && std::min(p.yards_to_go, 20) == key && p.yards_from_own_goal == yl) out.push_back(i);
  }
  return out;
}

// Ladder written straight from its definition: for each ytg relaxation r,
// windows w0, w0+5, ..., max; afterwards ytg only, same relaxation order.
inline std::vector<std::uint32_t> scan_eligible(std::span<const Play> plays, const GameState& s, KindSet kinds,
                                                DownSet downs, const SamplerConfig& cfg = {},
                                                bool* windowed = nullptr) {
  const int key = std::min(s.yards_to_go, 20);
  auto matches = [&](const Play& p, int ytg, std::optional<int> window) {
    if (!kinds.contains(p.kind) || !downs.contains(p.down)) return false;
    if (std::min(p.yards_to_go, 20) != ytg) return false;
    return !window || std::abs(p.yards_from_own_goal - s.yards_from_own_goal) <= *window;
  };
  auto collect = [&](int ytg, std::optional<int> window) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < plays.size(); ++i) {
      if (matches(plays[i], ytg, window)) out.push_back(i);
    }
    return out;
  };
  for (int r = 0; r <= cfg.max_ytg_relaxation && key - r >= 1; ++r) {
    for (int w = cfg.window_yards_from_own_goal;; w += cfg.window_step) {
      const int window = std::min(w, cfg.max_window);
      auto got = collect(key - r, window);
      if (!got.empty()) {
        if (windowed) *windowed = true;
        return got;
      }
      if (window >= cfg.max_window) break;
    }
  }
  for (int r = 0; r <= cfg.max_ytg_relaxation && key - r >= 1; ++r) {
    auto got = collect(key - r, std::nullopt);
    if (!got.empty()) {
      if (windowed) *windowed = false;
      return got;
    }
  }
  return {};
}

// Naive drive interpreter. `choose(eligible, windowed)` picks one play from a
// non-empty eligible set; returns nullopt when a state has no eligible plays.
struct NaiveOutcome {
  std::string outcome;
  int points = 0;
  int plays = 0;
  int end_yl = 0;
  std::optional<int> lost_at;

  bool operator==(const NaiveOutcome&) const = default;
};

inline std::optional<NaiveOutcome> naive_step(int& down, int& ytg, int& yl, int& n, const Play& p) {
  ++n;
  if (p.kind == PlayKind::field_goal) {
    if (*p.field_goal_made) return NaiveOutcome{"field_goal", 3, n, yl, std::nullopt};
    return NaiveOutcome{"missed_fg", 0, n, yl, yl};
  }
  if (p.kind == PlayKind::punt) return NaiveOutcome{"punt", 0, n, yl, yl};
  int spot = yl + p.yards_gained;
  if (p.is_turnover) {
    spot = std::max(1, std::min(99, spot));
    return NaiveOutcome{"turnover", 0, n, spot, spot};
  }
  if (p.is_touchdown || spot >= 100) return NaiveOutcome{"touchdown", 7, n, 99, std::nullopt};
  if (spot < 1) return NaiveOutcome{"safety", 0, n, 1, 1};
  if (p.yards_gained >= ytg) {
    down = 1;
    ytg = std::min(10, 100 - spot);
  } else if (down == 4) {
    return NaiveOutcome{"turnover_on_downs", 0, n, spot, spot};
  } else {
    ++down;
    ytg -= p.yards_gained;
  }
  yl = spot;
  return std::nullopt;
}

template <typename Choose>
std::optional<NaiveOutcome> naive_drive(std::span<const Play> plays, int start, KindSet kinds, Choose choose,
                                        int cap = 40) {
  int down = 1, ytg = std::min(10, 100 - start), yl = start, n = 0;
  while (n < cap) {
    GameState s{down, ytg, yl, n};
    bool windowed = false;
    auto elig = scan_eligible(plays, s, kinds, DownSet{down}, {}, &windowed);
    if (elig.empty()) return std::nullopt;
    if (auto done = naive_step(down, ytg, yl, n, plays[choose(elig, windowed)])) return done;
  }
  return NaiveOutcome{"turnover_on_downs", 0, n, yl, yl};
}

inline NaiveOutcome to_naive(const DriveRecord& r) {
  return NaiveOutcome{std::string(to_string(r.outcome)), r.points, r.n_plays, r.end_yards_from_own_goal,
                      r.turnover_yardline};
}

// Random records that respect the outcome/points coupling.
inline std::vector<DriveRecord> random_records(std::mt19937_64& rng, std::size_t n) {
  std::vector<DriveRecord> out;
  std::uniform_int_distribution<int> o_d(0, 6), yl_d(1, 99), n_d(1, 20);
  for (std::size_t i = 0; i < n; ++i) {
    DriveRecord r;
    r.outcome = static_cast<DriveOutcome>(o_d(rng));
    r.points = points_for(r.outcome);
    r.n_plays = n_d(rng);
    r.end_yards_from_own_goal = yl_d(rng);
    r.scoring_team = r.points > 0 ? Scorer::strategy : Scorer::none;
    if (r.points == 0) r.turnover_yardline = r.end_yards_from_own_goal;
    out.push_back(r);
  }
  return out;
}

// Silences engine warnings for the lifetime of the object.
struct QuietWarnings {
  std::function<void(const std::string&)> saved = warning_sink();
  std::mutex m;
  std::vector<std::string> seen;
  QuietWarnings() {
    warning_sink() = [this](const std::string& msg) {
      std::lock_guard<std::mutex> lock(m);
      seen.push_back(msg);
    };
  }
  ~QuietWarnings() { warning_sink() = saved; }
};

}  // namespace testing_support
