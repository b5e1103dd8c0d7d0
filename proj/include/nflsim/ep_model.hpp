#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "nflsim/csv.hpp"
#include "nflsim/error.hpp"
#include "nflsim/ingest.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"

namespace nflsim {

inline constexpr int kTouchdownPoints = 7;
inline constexpr int kFieldGoalPoints = 3;
inline constexpr int kSafetyPoints = 2;
// Opponent's yards from its own goal after a touchback.
inline constexpr int kTouchbackYardline = 25;
// A missed field goal is spotted this many yards behind the line of scrimmage.
inline constexpr int kMissedFieldGoalSetback = 8;

using YardlineTable = std::array<double, 100>;  // indexed by yards from own goal, [0] unused

// Inputs to the expected-points fourth-down decision.
struct EPModel {
  YardlineTable ep_by_yardline{};
  std::array<double, kMaxYtgKey + 1> conversion_prob_by_ytg{};  // [0] unused
  YardlineTable fg_make_prob_by_yardline{};
  YardlineTable punt_net_by_yardline{};
  std::vector<std::string> warnings;

  // Expected points for a first down at `yl`; the goal line itself is a touchdown.
  double ep(int yl) const {
    if (yl >= 100) return kTouchdownPoints;
    return ep_by_yardline[static_cast<std::size_t>(std::clamp(yl, 1, 99))];
  }
  double conversion_prob(int yards_to_go) const {
    return conversion_prob_by_ytg[static_cast<std::size_t>(ytg_key(yards_to_go))];
  }
  double fg_make_prob(int yl) const { return fg_make_prob_by_yardline[static_cast<std::size_t>(std::clamp(yl, 1, 99))]; }
  double punt_net(int yl) const { return punt_net_by_yardline[static_cast<std::size_t>(std::clamp(yl, 1, 99))]; }

  void validate() const {
    auto is_prob = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    for (int y = 1; y <= kMaxYtgKey; ++y) {
      if (!is_prob(conversion_prob_by_ytg[y])) throw ValidationError("conversion probability out of [0,1] at ytg " + std::to_string(y));
    }
    for (int yl = 1; yl <= 99; ++yl) {
      if (!is_prob(fg_make_prob_by_yardline[yl])) throw ValidationError("field goal probability out of [0,1] at " + std::to_string(yl));
      if (yl > 1 && fg_make_prob_by_yardline[yl] < fg_make_prob_by_yardline[yl - 1]) {
        throw ValidationError("field goal probability decreases toward the goal at " + std::to_string(yl));
      }
      if (!std::isfinite(ep_by_yardline[yl])) throw ValidationError("non-finite expected points at " + std::to_string(yl));
    }
  }
};

// Value of the next score in the same half, from the perspective of the
// offense at a first-down snap at `yards_from_own_goal`.
struct NextScoreSample {
  int yards_from_own_goal = 0;
  double value = 0;
};

// Labels every first-down scrimmage play with the next score of its half
// (+7/+3 for the offense, -7/-3 for the defense, -2 for a safety, 0 if none).
// Scoring plays are detected on all rows; samples are taken only from rows
// that pass the game-context filters.
inline std::vector<NextScoreSample> next_score_samples(std::span<const RawPlayRow> rows, const FilterConfig& filters) {
  std::vector<NextScoreSample> out;
  auto half_of = [](int qtr) { return qtr <= 2 ? 1 : (qtr <= 4 ? 2 : 3); };
  // (posteam, signed value relative to that posteam) of the next score.
  std::string next_team;
  double next_value = 0;
  bool have_next = false;
  std::string cur_game;
  int cur_half = -1;
  std::vector<NextScoreSample> reversed;
  for (std::size_t i = rows.size(); i-- > 0;) {
    const RawPlayRow& r = rows[i];
    const int half = half_of(r.qtr);
    if (r.game_id != cur_game || half != cur_half) {
      cur_game = r.game_id;
      cur_half = half;
      have_next = false;
    }
    const bool turnover = r.interception || r.fumble_lost;
    if (r.touchdown) {
      const bool offense = r.td_team.empty() ? !turnover : r.td_team == r.posteam;
      next_team = r.posteam;
      next_value = offense ? kTouchdownPoints : -kTouchdownPoints;
      have_next = true;
    } else if (r.field_goal_result == FieldGoalResult::made) {
      next_team = r.posteam;
      next_value = kFieldGoalPoints;
      have_next = true;
    } else if (r.safety) {
      next_team = r.posteam;
      next_value = -kSafetyPoints;
      have_next = true;
    }

    if (r.down != 1 || r.two_point_attempt) continue;
    if (r.play_type != "pass" && r.play_type != "run") continue;
    if (!r.yardline_100 || *r.yardline_100 < 1 || *r.yardline_100 > 99) continue;
    if (!filters.seasons.empty() && !filters.seasons.count(r.season)) continue;
    if (!filters.season_types.empty() && !r.season_type.empty() && !filters.season_types.count(r.season_type)) continue;
    if (filters.exclude_final_two_minutes && (!r.half_seconds_remaining || *r.half_seconds_remaining <= kFinalTwoMinutes)) continue;
    if (!r.score_differential || std::abs(*r.score_differential) > filters.max_abs_score_differential) continue;
    double value = 0;
    if (have_next) value = next_team == r.posteam ? next_value : -next_value;
    reversed.push_back(NextScoreSample{100 - *r.yardline_100, value});
  }
  out.assign(reversed.rbegin(), reversed.rend());
  return out;
}

// Reads an expected-points table: CSV with columns `yardline` (1..99, yards
// from the offense's own goal) and `ep`. Every yardline must be present.
inline YardlineTable load_ep_table(const std::filesystem::path& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError(path.string() + ": empty EP table", "");
  std::ptrdiff_t c_yl = -1, c_ep = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "yardline") c_yl = static_cast<std::ptrdiff_t>(i);
    if (fields[i] == "ep") c_ep = static_cast<std::ptrdiff_t>(i);
  }
  if (c_yl < 0) throw SchemaError(path.string() + ": EP table lacks column 'yardline'", "yardline");
  if (c_ep < 0) throw SchemaError(path.string() + ": EP table lacks column 'ep'", "ep");
  YardlineTable table{};
  std::array<bool, 100> seen{};
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() <= static_cast<std::size_t>(std::max(c_yl, c_ep))) throw ConfigError(path.string() + ": short row");
    auto yl = detail::parse_int(fields[static_cast<std::size_t>(c_yl)]);
    double ep = 0;
    try {
      ep = std::stod(fields[static_cast<std::size_t>(c_ep)]);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ": bad ep value '" + fields[static_cast<std::size_t>(c_ep)] + "'");
    }
    if (!yl || *yl < 1 || *yl > 99) throw ConfigError(path.string() + ": yardline out of range");
    table[static_cast<std::size_t>(*yl)] = ep;
    seen[static_cast<std::size_t>(*yl)] = true;
  }
  for (int yl = 1; yl <= 99; ++yl) {
    if (!seen[static_cast<std::size_t>(yl)]) throw ConfigError(path.string() + ": no ep for yardline " + std::to_string(yl));
  }
  return table;
}

struct EPFitOptions {
  std::size_t min_observations = 30;
};

namespace detail {

struct Tally {
  double sum = 0;
  std::size_t n = 0;
};

// Widens bucket `i` symmetrically over neighbours until it holds at least
// `min_n` observations; returns the pooled tally.
inline Tally widened(std::span<const Tally> buckets, std::size_t i, std::size_t min_n, std::size_t lo = 0) {
  Tally t = buckets[i];
  for (std::size_t r = 1; t.n < min_n; ++r) {
    bool any = false;
    if (i >= lo + r) {
      t.sum += buckets[i - r].sum;
      t.n += buckets[i - r].n;
      any = true;
    }
    if (i + r < buckets.size()) {
      t.sum += buckets[i + r].sum;
      t.n += buckets[i + r].n;
      any = true;
    }
    if (!any) break;
  }
  return t;
}

// Weighted pool-adjacent-violators fit, non-decreasing.
inline std::vector<double> isotonic_increasing(std::span<const double> y, std::span<const double> w) {
  struct Block {
    double value, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], std::max(w[i], 1e-12), 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double weight = a.weight + b.weight;
      a.value = (a.value * a.weight + b.value * b.weight) / weight;
      a.weight = weight;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.value);
  return out;
}

inline bool is_conversion_attempt(const Play& p) {
  return (p.down == 3 || p.down == 4) && (p.kind == PlayKind::pass || p.kind == PlayKind::run);
}

inline bool converted(const Play& p) {
  return !p.is_turnover && (p.is_touchdown || p.yards_gained >= p.yards_to_go);
}

inline void fit_pool_components(const PlayPool& pool, const EPFitOptions& opts, EPModel& m) {
  const std::size_t min_n = opts.min_observations;

  // Conversion probability per ytg key, third and fourth downs pooled.
  std::vector<Tally> conv(kMaxYtgKey + 1);
  for (const Play& p : pool.plays()) {
    if (!is_conversion_attempt(p)) continue;
    auto& t = conv[static_cast<std::size_t>(ytg_key(p.yards_to_go))];
    t.sum += converted(p) ? 1.0 : 0.0;
    ++t.n;
  }
  std::size_t widened_ytg = 0;
  for (int y = 1; y <= kMaxYtgKey; ++y) {
    Tally t = conv[static_cast<std::size_t>(y)];
    if (t.n < min_n) {
      t = widened(conv, static_cast<std::size_t>(y), min_n, 1);
      ++widened_ytg;
    }
    if (t.n == 0) throw FitError("no third/fourth-down scrimmage plays to estimate conversion probability");
    m.conversion_prob_by_ytg[static_cast<std::size_t>(y)] = t.sum / static_cast<double>(t.n);
  }
  if (widened_ytg) m.warnings.push_back("conversion: widened " + std::to_string(widened_ytg) + " sparse ytg buckets");

  // Field goal make rate per 5-yard band (band = yl / 5), made monotone.
  constexpr std::size_t kBands = 20;
  std::vector<Tally> fg(kBands);
  for (const Play& p : pool.plays()) {
    if (p.kind != PlayKind::field_goal) continue;
    auto& t = fg[static_cast<std::size_t>(p.yards_from_own_goal / 5)];
    t.sum += *p.field_goal_made ? 1.0 : 0.0;
    ++t.n;
  }
  std::size_t first = kBands;
  for (std::size_t b = 0; b < kBands; ++b) {
    if (fg[b].n) {
      first = b;
      break;
    }
  }
  if (first == kBands) throw FitError("no field goal attempts in pool");
  if (first > 0) {
    m.warnings.push_back("field goal: no attempts from inside own " + std::to_string(first * 5) +
                         "; make probability set to 0 there");
  }
  std::vector<double> rate, weight;
  std::size_t widened_fg = 0;
  for (std::size_t b = first; b < kBands; ++b) {
    Tally t = fg[b];
    if (t.n < min_n) {
      t = widened(fg, b, min_n, first);
      ++widened_fg;
    }
    rate.push_back(t.sum / static_cast<double>(t.n));
    weight.push_back(static_cast<double>(t.n));
  }
  if (widened_fg) m.warnings.push_back("field goal: widened " + std::to_string(widened_fg) + " sparse yardline bands");
  auto smooth = isotonic_increasing(rate, weight);
  for (int yl = 1; yl <= 99; ++yl) {
    const std::size_t b = static_cast<std::size_t>(yl / 5);
    m.fg_make_prob_by_yardline[static_cast<std::size_t>(yl)] = b < first ? 0.0 : smooth[b - first];
  }

  // Mean net punt per 10-yard band.
  std::vector<Tally> punt(10);
  for (const Play& p : pool.plays()) {
    if (p.kind != PlayKind::punt || !p.net_kick_yards) continue;
    auto& t = punt[static_cast<std::size_t>(p.yards_from_own_goal / 10)];
    t.sum += *p.net_kick_yards;
    ++t.n;
  }
  std::size_t widened_punt = 0;
  for (int yl = 1; yl <= 99; ++yl) {
    const std::size_t b = static_cast<std::size_t>(yl / 10);
    Tally t = punt[b];
    if (t.n < min_n) {
      t = widened(punt, b, min_n);
      if (yl % 10 == 0 || yl == 1) ++widened_punt;
    }
    if (t.n == 0) throw FitError("no punts in pool");
    m.punt_net_by_yardline[static_cast<std::size_t>(yl)] = t.sum / static_cast<double>(t.n);
  }
  if (widened_punt) m.warnings.push_back("punt: widened " + std::to_string(widened_punt) + " sparse yardline bands");
}

}  // namespace detail

// Fits conversion, field goal and punt components from the pool and takes
// expected points from an external table.
inline EPModel fit_ep_model(const PlayPool& pool, const YardlineTable& ep_table, const EPFitOptions& opts = {}) {
  EPModel m;
  m.ep_by_yardline = ep_table;
  detail::fit_pool_components(pool, opts, m);
  m.validate();
  return m;
}

// Fits every component from data: expected points is the mean next-score
// value per yardline, widened over neighbouring yardlines where sparse.
inline EPModel fit_ep_model(const PlayPool& pool, std::span<const NextScoreSample> samples,
                            const EPFitOptions& opts = {}) {
  if (samples.empty()) throw FitError("no next-score samples to estimate expected points");
  std::vector<detail::Tally> by_yl(100);
  for (const auto& s : samples) {
    if (s.yards_from_own_goal < 1 || s.yards_from_own_goal > 99) continue;
    auto& t = by_yl[static_cast<std::size_t>(s.yards_from_own_goal)];
    t.sum += s.value;
    ++t.n;
  }
  EPModel m;
  std::size_t widened_yl = 0;
  for (std::size_t yl = 1; yl <= 99; ++yl) {
    detail::Tally t = by_yl[yl];
    if (t.n < opts.min_observations) {
      t = detail::widened(by_yl, yl, opts.min_observations, 1);
      ++widened_yl;
    }
    if (t.n == 0) throw FitError("no next-score samples at all");
    m.ep_by_yardline[yl] = t.sum / static_cast<double>(t.n);
  }
  if (widened_yl) m.warnings.push_back("expected points: widened " + std::to_string(widened_yl) + " sparse yardlines");
  detail::fit_pool_components(pool, opts, m);
  m.validate();
  return m;
}

struct FourthDownValues {
  double go = 0;
  double punt = 0;
  double field_goal = 0;
};

enum class FourthDownChoice { go, field_goal, punt };

inline std::string_view to_string(FourthDownChoice c) {
  switch (c) {
    case FourthDownChoice::go: return "go";
    case FourthDownChoice::field_goal: return "field_goal";
    case FourthDownChoice::punt: return "punt";
  }
  return "?";
}

// Expected points of each fourth-down option.
inline FourthDownValues ev_fourth_down(const GameState& s, const EPModel& m) {
  require_valid(s);
  if (s.down != 4) throw ValidationError("ev_fourth_down requires a fourth-down state, got " + describe(s));
  const int yl = s.yards_from_own_goal;
  FourthDownValues v;

  const double p_conv = m.conversion_prob(s.yards_to_go);
  v.go = p_conv * m.ep(yl + s.yards_to_go) + (1.0 - p_conv) * -m.ep(100 - yl);

  const double p_fg = m.fg_make_prob(yl);
  const int miss_spot = std::max(1, yl - kMissedFieldGoalSetback);
  v.field_goal = p_fg * kFieldGoalPoints + (1.0 - p_fg) * -m.ep(100 - miss_spot);

  const double landing = yl + m.punt_net(yl);
  const int opponent = landing >= 100.0
                           ? kTouchbackYardline
                           : 100 - std::clamp(static_cast<int>(std::lround(landing)), 1, 99);
  v.punt = -m.ep(opponent);
  return v;
}

// Argmax of the three values; exact ties prefer go, then field goal.
inline FourthDownChoice best_choice(const FourthDownValues& v) {
  if (v.go >= v.field_goal && v.go >= v.punt) return FourthDownChoice::go;
  if (v.field_goal >= v.punt) return FourthDownChoice::field_goal;
  return FourthDownChoice::punt;
}

}  // namespace nflsim
