#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nflsim/error.hpp"

namespace nflsim {

enum class PlayKind : std::uint8_t { pass = 0, run = 1, punt = 2, field_goal = 3 };

inline constexpr std::array<PlayKind, 4> kAllKinds{PlayKind::pass, PlayKind::run, PlayKind::punt,
                                                    PlayKind::field_goal};

constexpr std::string_view to_string(PlayKind kind) {
  switch (kind) {
    case PlayKind::pass: return "pass";
    case PlayKind::run: return "run";
    case PlayKind::punt: return "punt";
    case PlayKind::field_goal: return "field_goal";
  }
  return "?";
}

inline std::optional<PlayKind> parse_play_kind(std::string_view token) {
  for (PlayKind k : kAllKinds) {
    if (to_string(k) == token) return k;
  }
  return std::nullopt;
}

// Small bitset over PlayKind.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<PlayKind> kinds) {
    for (PlayKind k : kinds) insert(k);
  }

  static constexpr KindSet all() { return KindSet{PlayKind::pass, PlayKind::run, PlayKind::punt, PlayKind::field_goal}; }
  static constexpr KindSet scrimmage() { return KindSet{PlayKind::pass, PlayKind::run}; }
  static constexpr KindSet kicks() { return KindSet{PlayKind::punt, PlayKind::field_goal}; }

  constexpr void insert(PlayKind k) { bits_ |= bit(k); }
  constexpr bool contains(PlayKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool operator==(const KindSet&) const = default;

 private:
  static constexpr std::uint8_t bit(PlayKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

// Small bitset over downs 1..4.
class DownSet {
 public:
  constexpr DownSet() = default;
  constexpr DownSet(std::initializer_list<int> downs) {
    for (int d : downs) insert(d);
  }

  constexpr void insert(int down) {
    if (down >= 1 && down <= 4) bits_ |= static_cast<std::uint8_t>(1u << (down - 1));
  }
  constexpr bool contains(int down) const {
    return down >= 1 && down <= 4 && (bits_ & (1u << (down - 1))) != 0;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const DownSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// Per-play passing line used for team passer ratings. `attempt` excludes sacks.
struct PasserLine {
  bool attempt = false;
  bool complete = false;
  bool touchdown = false;
  bool interception = false;
  int yards = 0;

  bool operator==(const PasserLine&) const = default;
};

// One historical play, normalized to the offense's frame of reference.
struct Play {
  PlayKind kind = PlayKind::run;
  int down = 1;
  int yards_to_go = 10;
  int yards_from_own_goal = 25;  // 1..99; 100 would be the opponent's goal line
  int yards_gained = 0;
  bool is_touchdown = false;     // offensive touchdown only
  bool is_turnover = false;      // interception or lost fumble
  std::optional<bool> field_goal_made;  // present iff kind == field_goal
  std::optional<int> net_kick_yards;    // punts only; kick distance minus return
  std::string team;
  int season = 0;
  PasserLine passing;

  bool operator==(const Play&) const = default;
};

inline bool satisfies_invariants(const Play& p) {
  if (p.yards_from_own_goal < 1 || p.yards_from_own_goal > 99) return false;
  if (p.down < 1 || p.down > 4) return false;
  if (p.yards_to_go < 1 || p.yards_to_go > 100 - p.yards_from_own_goal) return false;
  if (p.field_goal_made.has_value() != (p.kind == PlayKind::field_goal)) return false;
  if (p.kind != PlayKind::punt && p.net_kick_yards.has_value()) return false;
  return true;
}

// Yards-to-go values above this share one index key.
inline constexpr int kMaxYtgKey = 20;

constexpr int ytg_key(int yards_to_go) { return std::clamp(yards_to_go, 1, kMaxYtgKey); }

// Situation of the offense between plays.
struct GameState {
  int down = 1;
  int yards_to_go = 10;
  int yards_from_own_goal = 25;
  int plays_run = 0;

  static constexpr GameState first_and_ten(int yards_from_own_goal) {
    return GameState{1, std::min(10, 100 - yards_from_own_goal), yards_from_own_goal, 0};
  }

  constexpr bool valid() const {
    return down >= 1 && down <= 4 && yards_from_own_goal >= 1 && yards_from_own_goal <= 99 &&
           yards_to_go >= 1 && yards_to_go <= 100 - yards_from_own_goal && plays_run >= 0;
  }

  bool operator==(const GameState&) const = default;
};

inline void require_valid(const GameState& s) {
  if (!s.valid()) {
    throw ValidationError("invalid game state: down " + std::to_string(s.down) + ", " +
                          std::to_string(s.yards_to_go) + " to go at " +
                          std::to_string(s.yards_from_own_goal));
  }
}

inline std::string describe(const GameState& s) {
  return "down " + std::to_string(s.down) + " & " + std::to_string(s.yards_to_go) + " at own " +
         std::to_string(s.yards_from_own_goal);
}

}  // namespace nflsim
