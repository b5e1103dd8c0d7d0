#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nflsim/csv.hpp"
#include "nflsim/error.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"

namespace nflsim {

enum class FieldGoalResult { made, missed, blocked };

// One row of an nflfastR / nflscrapR play-by-play file, limited to the
// columns the simulator consumes.
struct RawPlayRow {
  int season = 0;
  std::string season_type;  // REG / POST / PRE; empty when the source lacks it
  std::string game_id;
  std::string posteam;
  std::string play_type;
  int qtr = 0;
  std::optional<int> down;
  int ydstogo = 0;
  std::optional<int> yardline_100;
  int yards_gained = 0;
  bool touchdown = false;
  std::string td_team;
  bool interception = false;
  bool fumble_lost = false;
  bool safety = false;
  std::optional<FieldGoalResult> field_goal_result;
  std::optional<int> kick_distance;
  std::optional<int> return_yards;
  std::optional<int> half_seconds_remaining;
  std::optional<int> score_differential;
  bool two_point_attempt = false;
  bool qb_scramble = false;
  // passer stats
  bool pass_attempt = false;
  bool sack = false;
  bool complete_pass = false;
  std::optional<int> passing_yards;
  bool pass_touchdown = false;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count

  void drop(const std::string& reason) { ++dropped[reason]; }
  std::size_t rows_dropped() const {
    std::size_t n = 0;
    for (const auto& [_, c] : dropped) n += c;
    return n;
  }
};

struct ParsedPbp {
  std::vector<RawPlayRow> rows;
  ParseReport report;
};

namespace detail {

inline std::optional<int> parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty() || s == "NA" || s == "NaN") return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc() && ptr == s.data() + s.size()) return value;
  // Some exports write integral columns as doubles ("10.0").
  double d = 0;
  try {
    std::size_t used = 0;
    d = std::stod(std::string(s), &used);
    if (used != s.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!std::isfinite(d)) return std::nullopt;
  return static_cast<int>(std::lround(d));
}

inline bool parse_flag(std::string_view s) {
  auto v = parse_int(s);
  if (v) return *v != 0;
  return s == "TRUE" || s == "true";
}

// Team abbreviations normalized to nflfastR's current codes.
inline std::string normalize_team(std::string_view code) {
  static const std::unordered_map<std::string_view, std::string_view> kAliases{
      {"JAC", "JAX"}, {"STL", "LA"}, {"LAR", "LA"}, {"SD", "LAC"}};
  auto it = kAliases.find(code);
  return std::string(it == kAliases.end() ? code : it->second);
}

// nflscrapR files carry no season column; the season is the calendar year of
// the game id unless the game was played in January or February.
inline std::optional<int> season_from_game_id(std::string_view game_id) {
  if (game_id.size() < 6) return std::nullopt;
  auto year = parse_int(game_id.substr(0, 4));
  auto month = parse_int(game_id.substr(4, 2));
  if (!year || !month) return std::nullopt;
  return *month <= 2 ? *year - 1 : *year;
}

}  // namespace detail

// Columns every input must provide (after alias mapping).
inline const std::vector<std::string>& required_pbp_columns() {
  static const std::vector<std::string> cols{
      "game_id",       "posteam",      "play_type",         "down",          "ydstogo",
      "yardline_100",  "yards_gained", "touchdown",         "interception",  "fumble_lost",
      "field_goal_result", "kick_distance", "return_yards", "half_seconds_remaining",
      "score_differential"};
  return cols;
}

// Maps source-specific column names onto the nflfastR names used above.
inline const std::unordered_map<std::string, std::string>& pbp_column_aliases() {
  static const std::unordered_map<std::string, std::string> aliases{
      {"pos_team", "posteam"},  // legacy nflscrapR season files
      {"yrdline100", "yardline_100"},
      {"Yards.Gained", "yards_gained"},
      {"Touchdown", "touchdown"},
      {"InterceptionThrown", "interception"},
  };
  return aliases;
}

// Reads a play-by-play CSV (optionally gzip-compressed). Only rows with a
// supported play_type (pass, run, punt, field_goal) are emitted.
inline ParsedPbp parse_pbp(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw IoError("no such file: " + file.string());
  CsvReader reader(file);
  std::vector<std::string> fields;
  ParsedPbp out;
  if (!reader.next(fields)) throw SchemaError(file.string() + ": missing header row", "");

  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::string name = fields[i];
    if (i == 0 && name.size() >= 3 && name.compare(0, 3, "\xEF\xBB\xBF") == 0) name.erase(0, 3);
    auto alias = pbp_column_aliases().find(name);
    if (alias != pbp_column_aliases().end() && !col.count(alias->second)) name = alias->second;
    col.emplace(name, i);
  }
  for (const auto& name : required_pbp_columns()) {
    if (!col.count(name)) throw SchemaError(file.string() + ": missing required column '" + name + "'", name);
  }
  const bool has_season = col.count("season") > 0;

  auto idx = [&](const char* name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };
  const auto c_season = idx("season"), c_season_type = idx("season_type"), c_game = idx("game_id"),
             c_pos = idx("posteam"), c_type = idx("play_type"), c_qtr = idx("qtr"), c_down = idx("down"),
             c_ytg = idx("ydstogo"), c_yl = idx("yardline_100"), c_gain = idx("yards_gained"),
             c_td = idx("touchdown"), c_td_team = idx("td_team"), c_int = idx("interception"),
             c_fum = idx("fumble_lost"), c_safety = idx("safety"), c_fg = idx("field_goal_result"),
             c_kick = idx("kick_distance"), c_ret = idx("return_yards"),
             c_half = idx("half_seconds_remaining"), c_diff = idx("score_differential"),
             c_two = idx("two_point_attempt"), c_scr = idx("qb_scramble"), c_patt = idx("pass_attempt"),
             c_sack = idx("sack"), c_cmp = idx("complete_pass"), c_pyds = idx("passing_yards"),
             c_ptd = idx("pass_touchdown");

  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++out.report.rows_read;
    if (fields.size() < col.size()) {
      out.report.drop("short_row");
      continue;
    }
    auto get = [&](const std::optional<std::size_t>& c) -> std::string_view {
      return c ? std::string_view(fields[*c]) : std::string_view();
    };

    const std::string_view type = get(c_type);
    auto kind = parse_play_kind(type);
    if (!kind) {
      out.report.drop(type.empty() || type == "NA" ? "no_play_type" : "unsupported_play_type");
      continue;
    }

    RawPlayRow r;
    r.play_type = std::string(type);
    r.game_id = std::string(get(c_game));
    r.posteam = detail::normalize_team(get(c_pos));
    if (has_season) {
      auto s = detail::parse_int(get(c_season));
      r.season = s.value_or(0);
    } else {
      r.season = detail::season_from_game_id(r.game_id).value_or(0);
    }
    r.season_type = std::string(get(c_season_type));
    r.qtr = detail::parse_int(get(c_qtr)).value_or(0);
    r.down = detail::parse_int(get(c_down));
    auto ytg = detail::parse_int(get(c_ytg));
    r.yardline_100 = detail::parse_int(get(c_yl));
    auto gained = detail::parse_int(get(c_gain));
    r.touchdown = detail::parse_flag(get(c_td));
    r.td_team = detail::normalize_team(get(c_td_team));
    if (r.td_team == "NA") r.td_team.clear();
    r.interception = detail::parse_flag(get(c_int));
    r.fumble_lost = detail::parse_flag(get(c_fum));
    r.safety = detail::parse_flag(get(c_safety));
    const std::string_view fg = get(c_fg);
    if (fg == "made" || fg == "good") r.field_goal_result = FieldGoalResult::made;
    else if (fg == "missed") r.field_goal_result = FieldGoalResult::missed;
    else if (fg == "blocked") r.field_goal_result = FieldGoalResult::blocked;
    r.kick_distance = detail::parse_int(get(c_kick));
    r.return_yards = detail::parse_int(get(c_ret));
    r.half_seconds_remaining = detail::parse_int(get(c_half));
    r.score_differential = detail::parse_int(get(c_diff));
    r.two_point_attempt = detail::parse_flag(get(c_two));
    r.qb_scramble = detail::parse_flag(get(c_scr));
    r.pass_attempt = detail::parse_flag(get(c_patt));
    r.sack = detail::parse_flag(get(c_sack));
    r.complete_pass = detail::parse_flag(get(c_cmp));
    r.passing_yards = detail::parse_int(get(c_pyds));
    r.pass_touchdown = detail::parse_flag(get(c_ptd));
    if (!r.passing_yards && r.complete_pass && !c_pyds) r.passing_yards = gained;

    if (r.season == 0) {
      out.report.drop("missing_season");
      continue;
    }
    if (!ytg || !r.yardline_100 || !gained) {
      out.report.drop("missing_situation");
      continue;
    }
    r.ydstogo = *ytg;
    r.yards_gained = *gained;
    if (*kind == PlayKind::field_goal && !r.field_goal_result) {
      out.report.drop("missing_field_goal_result");
      continue;
    }
    if (*kind == PlayKind::punt && !r.kick_distance) {
      out.report.drop("missing_kick_distance");
      continue;
    }
    out.rows.push_back(std::move(r));
    ++out.report.rows_kept;
  }
  return out;
}

struct FilterConfig {
  bool exclude_final_two_minutes = true;
  int max_abs_score_differential = 28;
  std::set<int> seasons;                     // empty = all seasons
  std::set<std::string> season_types{"REG"};  // empty = all; rows lacking the column always pass
  KindSet play_kinds = KindSet::all();
  bool scrambles_as_passes = true;

  void validate() const {
    if (max_abs_score_differential < 0) throw ValidationError("max_abs_score_differential must be >= 0");
    if (play_kinds.empty()) throw ValidationError("filter admits no play kinds");
  }
};

// Seconds left in the half at or below which plays are dropped when
// exclude_final_two_minutes is set.
inline constexpr int kFinalTwoMinutes = 120;

// Converts one raw row to a Play, or nullopt when the row is filtered out.
inline std::optional<Play> prep_play(const RawPlayRow& r, const FilterConfig& f) {
  auto kind = parse_play_kind(r.play_type);
  if (!kind) return std::nullopt;
  if (f.scrambles_as_passes && *kind == PlayKind::run && r.qb_scramble) kind = PlayKind::pass;
  if (!f.play_kinds.contains(*kind)) return std::nullopt;
  if (!f.seasons.empty() && !f.seasons.count(r.season)) return std::nullopt;
  if (!f.season_types.empty() && !r.season_type.empty() && !f.season_types.count(r.season_type)) return std::nullopt;
  if (r.two_point_attempt) return std::nullopt;
  if (!r.down || *r.down < 1 || *r.down > 4) return std::nullopt;
  if (!r.yardline_100 || *r.yardline_100 < 1 || *r.yardline_100 > 99) return std::nullopt;
  const int yl = 100 - *r.yardline_100;
  if (r.ydstogo < 1 || r.ydstogo > 100 - yl) return std::nullopt;
  if (f.exclude_final_two_minutes) {
    if (!r.half_seconds_remaining || *r.half_seconds_remaining <= kFinalTwoMinutes) return std::nullopt;
  }
  if (!r.score_differential || std::abs(*r.score_differential) > f.max_abs_score_differential) return std::nullopt;

  Play p;
  p.kind = *kind;
  p.down = *r.down;
  p.yards_to_go = r.ydstogo;
  p.yards_from_own_goal = yl;
  p.team = r.posteam;
  p.season = r.season;
  switch (*kind) {
    case PlayKind::pass:
    case PlayKind::run: {
      p.yards_gained = r.yards_gained;
      p.is_turnover = r.interception || r.fumble_lost;
      const bool offense_scored = r.td_team.empty() ? !p.is_turnover : r.td_team == r.posteam;
      p.is_touchdown = r.touchdown && offense_scored;
      if (*kind == PlayKind::pass) {
        p.passing.attempt = r.pass_attempt && !r.sack && !r.qb_scramble;
        p.passing.complete = r.complete_pass;
        p.passing.yards = r.complete_pass ? r.passing_yards.value_or(r.yards_gained) : 0;
        p.passing.touchdown = r.pass_touchdown;
        p.passing.interception = r.interception;
      }
      break;
    }
    case PlayKind::punt:
      if (!r.kick_distance) return std::nullopt;
      p.net_kick_yards = *r.kick_distance - r.return_yards.value_or(0);
      break;
    case PlayKind::field_goal:
      if (!r.field_goal_result) return std::nullopt;
      p.field_goal_made = *r.field_goal_result == FieldGoalResult::made;
      break;
  }
  return p;
}

inline std::vector<Play> prep_play_list(const std::vector<RawPlayRow>& rows, const FilterConfig& filters) {
  filters.validate();
  std::vector<Play> plays;
  plays.reserve(rows.size());
  for (const auto& r : rows) {
    if (auto p = prep_play(r, filters)) plays.push_back(std::move(*p));
  }
  return plays;
}

// Applies the filters and builds an indexed pool. Throws EmptyPoolError when
// nothing survives.
inline PlayPool prep_plays(const std::vector<RawPlayRow>& rows, const FilterConfig& filters) {
  auto plays = prep_play_list(rows, filters);
  if (plays.empty()) throw EmptyPoolError("no plays survive the filters");
  return PlayPool(std::move(plays));
}

// Inverse of prep_play for an already-prepared play, with neutral game context
// (mid-half, tied score) so that re-preparing it is a no-op.
inline RawPlayRow to_raw_row(const Play& p) {
  RawPlayRow r;
  r.season = p.season;
  r.posteam = p.team;
  r.play_type = std::string(to_string(p.kind));
  r.qtr = 1;
  r.down = p.down;
  r.ydstogo = p.yards_to_go;
  r.yardline_100 = 100 - p.yards_from_own_goal;
  r.yards_gained = p.yards_gained;
  r.touchdown = p.is_touchdown;
  if (p.is_touchdown) r.td_team = p.team;
  r.interception = p.kind == PlayKind::pass && p.passing.interception;
  r.fumble_lost = p.is_turnover && !r.interception;
  if (p.field_goal_made) r.field_goal_result = *p.field_goal_made ? FieldGoalResult::made : FieldGoalResult::missed;
  if (p.net_kick_yards) {
    r.kick_distance = *p.net_kick_yards;
    r.return_yards = 0;
  }
  r.half_seconds_remaining = 900;
  r.score_differential = 0;
  r.pass_attempt = p.passing.attempt;
  r.complete_pass = p.passing.complete;
  r.passing_yards = p.passing.yards;
  r.pass_touchdown = p.passing.touchdown;
  return r;
}

// ---------------------------------------------------------------------------
// Team subsets

struct TeamSeason {
  std::string team;
  int season = 0;
  auto operator<=>(const TeamSeason&) const = default;
};

// A named set of teams. Entries either cover every season or one season.
struct TeamGroup {
  std::string name;
  std::set<std::string> any_season;
  std::set<TeamSeason> team_seasons;

  bool contains(const std::string& team, int season) const {
    return any_season.count(team) || team_seasons.count(TeamSeason{team, season});
  }
  bool empty() const { return any_season.empty() && team_seasons.empty(); }
};

template <typename Pred>
PlayPool subset_pool(const PlayPool& pool, Pred keep, const std::string& what) {
  std::vector<Play> kept;
  for (const Play& p : pool.plays()) {
    if (keep(p)) kept.push_back(p);
  }
  if (kept.empty()) throw EmptyPoolError("subset " + what + " selects no plays");
  return PlayPool(std::move(kept));
}

inline PlayPool subset_by_teams(const PlayPool& pool, const std::set<std::string>& teams) {
  if (teams.empty()) throw ValidationError("team set is empty");
  std::string label = "{";
  for (const auto& t : teams) label += (label.size() > 1 ? "," : "") + t;
  label += "}";
  return subset_pool(pool, [&](const Play& p) { return teams.count(p.team) > 0; }, label);
}

inline PlayPool subset_by_group(const PlayPool& pool, const TeamGroup& group, bool complement = false) {
  if (group.empty()) throw ValidationError("team group '" + group.name + "' is empty");
  return subset_pool(
      pool, [&](const Play& p) { return group.contains(p.team, p.season) != complement; },
      (complement ? "not " : "") + group.name);
}

// ---------------------------------------------------------------------------
// Passer rating terciles

struct PassingTotals {
  long attempts = 0;
  long completions = 0;
  long yards = 0;
  long touchdowns = 0;
  long interceptions = 0;
};

// Standard NFL passer rating: four per-attempt components each clamped to
// [0, 2.375], summed, scaled by 100/6.
inline double passer_rating(const PassingTotals& t) {
  if (t.attempts <= 0) throw ValidationError("passer rating needs at least one attempt");
  const double att = static_cast<double>(t.attempts);
  auto clamp = [](double v) { return std::clamp(v, 0.0, 2.375); };
  const double a = clamp((t.completions / att - 0.3) * 5.0);
  const double b = clamp((t.yards / att - 3.0) * 0.25);
  const double c = clamp(t.touchdowns / att * 20.0);
  const double d = clamp(2.375 - t.interceptions / att * 25.0);
  return (a + b + c + d) / 6.0 * 100.0;
}

struct TeamRating {
  TeamSeason unit;
  PassingTotals totals;
  double rating = 0;
};

struct RatingTerciles {
  PlayPool high;
  PlayPool medium;
  PlayPool low;
  std::vector<TeamRating> ranking;  // best first
  std::size_t n_high = 0, n_medium = 0, n_low = 0;
};

inline std::vector<TeamRating> team_passer_ratings(const PlayPool& pool) {
  std::map<TeamSeason, PassingTotals> totals;
  for (const Play& p : pool.plays()) {
    auto& t = totals[TeamSeason{p.team, p.season}];
    if (p.kind != PlayKind::pass || !p.passing.attempt) continue;
    ++t.attempts;
    t.completions += p.passing.complete;
    t.yards += p.passing.yards;
    t.touchdowns += p.passing.touchdown;
    t.interceptions += p.passing.interception;
  }
  std::vector<TeamRating> out;
  for (const auto& [unit, t] : totals) {
    if (t.attempts == 0) throw ValidationError("team " + unit.team + " " + std::to_string(unit.season) + " has no pass attempts");
    out.push_back(TeamRating{unit, t, passer_rating(t)});
  }
  std::sort(out.begin(), out.end(), [](const TeamRating& a, const TeamRating& b) {
    if (a.rating != b.rating) return a.rating > b.rating;
    return a.unit < b.unit;
  });
  return out;
}

// Ranks team-seasons by passer rating and splits them into three groups of
// sizes n/3 + (i < n%3). Each returned pool holds every play of its teams.
inline RatingTerciles passer_rating_terciles(const PlayPool& pool) {
  auto ranking = team_passer_ratings(pool);
  const std::size_t n = ranking.size();
  if (n < 3) throw ValidationError("passer rating terciles need at least 3 teams, found " + std::to_string(n));
  std::array<std::size_t, 3> sizes{};
  for (std::size_t i = 0; i < 3; ++i) sizes[i] = n / 3 + (i < n % 3 ? 1 : 0);

  std::array<std::set<TeamSeason>, 3> groups;
  for (std::size_t i = 0, g = 0, used = 0; i < n; ++i) {
    while (used == sizes[g]) {
      ++g;
      used = 0;
    }
    groups[g].insert(ranking[i].unit);
    ++used;
  }
  auto pick = [&](std::size_t g) {
    return subset_pool(pool, [&](const Play& p) { return groups[g].count(TeamSeason{p.team, p.season}) > 0; },
                       "tercile " + std::to_string(g));
  };
  return RatingTerciles{pick(0), pick(1), pick(2), std::move(ranking), sizes[0], sizes[1], sizes[2]};
}

}  // namespace nflsim
