#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nflsim/error.hpp"
#include "nflsim/ingest.hpp"
#include "nflsim/play.hpp"

namespace nflsim {

// INI configuration:
//
//   [filters]
//   exclude_final_two_minutes = true
//   max_abs_score_differential = 28
//   seasons = 2018,2019
//   season_types = REG
//   play_kinds = pass,run,punt,field_goal
//   scrambles_as_passes = true
//
//   [sim]
//   n_sims = 10000
//   from_yard_line = 25
//   seed = 1
//
//   [group.playoff]
//   2018 = KC,NE,...
//   all = ...          ; teams counted in every season
struct ProjectConfig {
  FilterConfig filters;
  std::optional<std::size_t> n_sims;
  std::optional<int> from_yard_line;
  std::optional<std::uint64_t> seed;
  std::map<std::string, TeamGroup> groups;
};

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' must be a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) throw ConfigError("'" + key + "' must be a number, got '" + v + "'");
  return out;
}

inline std::set<int> parse_seasons(const std::string& key, const std::string& v) {
  std::set<int> out;
  for (const auto& s : split_list(v)) {
    const auto dash = s.find('-', 1);
    if (dash != std::string::npos) {
      const int a = parse_number<int>(key, s.substr(0, dash));
      const int b = parse_number<int>(key, s.substr(dash + 1));
      if (a > b) throw ConfigError("'" + key + "' has an empty range " + s);
      for (int y = a; y <= b; ++y) out.insert(y);
    } else {
      out.insert(parse_number<int>(key, s));
    }
  }
  return out;
}

}  // namespace detail

// Accepts "2018,2019" and ranges such as "2009-2019".
inline std::set<int> parse_season_list(const std::string& v) { return detail::parse_seasons("seasons", v); }

inline KindSet parse_kind_list(const std::string& v) {
  KindSet out;
  for (const auto& s : split_list(v)) {
    auto k = parse_play_kind(s);
    if (!k) throw ConfigError("unknown play kind '" + s + "'");
    out.insert(*k);
  }
  return out;
}

inline ProjectConfig parse_config(std::istream& in, const std::string& origin = "config") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  ProjectConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section == "filters") {
      for (const auto& [key, node] : body) {
        const std::string v = node.data();
        if (key == "exclude_final_two_minutes") {
          cfg.filters.exclude_final_two_minutes = detail::parse_bool(key, v);
        } else if (key == "max_abs_score_differential") {
          cfg.filters.max_abs_score_differential = detail::parse_number<int>(key, v);
        } else if (key == "seasons") {
          cfg.filters.seasons = detail::parse_seasons(key, v);
        } else if (key == "season_types") {
          auto types = split_list(v);
          cfg.filters.season_types = std::set<std::string>(types.begin(), types.end());
        } else if (key == "play_kinds") {
          cfg.filters.play_kinds = parse_kind_list(v);
        } else if (key == "scrambles_as_passes") {
          cfg.filters.scrambles_as_passes = detail::parse_bool(key, v);
        } else {
          throw ConfigError(origin + ": unknown key [filters] " + key);
        }
      }
    } else if (section == "sim") {
      for (const auto& [key, node] : body) {
        const std::string v = node.data();
        if (key == "n_sims") {
          cfg.n_sims = detail::parse_number<std::size_t>(key, v);
        } else if (key == "from_yard_line") {
          cfg.from_yard_line = detail::parse_number<int>(key, v);
        } else if (key == "seed") {
          cfg.seed = detail::parse_number<std::uint64_t>(key, v);
        } else {
          throw ConfigError(origin + ": unknown key [sim] " + key);
        }
      }
    } else if (section.rfind("group.", 0) == 0) {
      TeamGroup g;
      g.name = section.substr(6);
      if (g.name.empty()) throw ConfigError(origin + ": group section needs a name");
      for (const auto& [key, node] : body) {
        std::set<std::string> teams;
        for (const auto& t : split_list(node.data())) teams.insert(detail::normalize_team(t));
        if (key == "all") {
          g.any_season.insert(teams.begin(), teams.end());
        } else {
          const int season = detail::parse_number<int>("[" + section + "] " + key, key);
          for (const auto& t : teams) g.team_seasons.insert(TeamSeason{t, season});
        }
      }
      cfg.groups[g.name] = std::move(g);
    } else {
      throw ConfigError(origin + ": unknown section [" + section + "]");
    }
  }
  cfg.filters.validate();
  return cfg;
}

inline ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

// Reads a plain team list: one code per line or comma separated, '#' comments.
inline std::set<std::string> load_team_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open team list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (const auto& t : split_list(line)) out.insert(detail::normalize_team(t));
  }
  if (out.empty()) throw ConfigError("team list " + path.string() + " is empty");
  return out;
}

}  // namespace nflsim
