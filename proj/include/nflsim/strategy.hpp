#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "nflsim/ep_model.hpp"
#include "nflsim/error.hpp"
#include "nflsim/play.hpp"
#include "nflsim/rng.hpp"
#include "nflsim/sampler.hpp"

namespace nflsim {

enum class StrategyFamily { empirical, fourth_down, pass_rush };

enum class FourthDownVariant { empirical, always_go, never_go, yds_less_than, expected_points };

inline std::string_view to_string(FourthDownVariant v) {
  switch (v) {
    case FourthDownVariant::empirical: return "empirical";
    case FourthDownVariant::always_go: return "always_go";
    case FourthDownVariant::never_go: return "never_go";
    case FourthDownVariant::yds_less_than: return "yds_less_than";
    case FourthDownVariant::expected_points: return "expected_points";
  }
  return "?";
}

inline std::optional<FourthDownVariant> parse_fourth_down_variant(std::string_view s) {
  for (auto v : {FourthDownVariant::empirical, FourthDownVariant::always_go, FourthDownVariant::never_go,
                 FourthDownVariant::yds_less_than, FourthDownVariant::expected_points}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

// Declarative offensive strategy.
struct StrategySpec {
  StrategyFamily family = StrategyFamily::empirical;
  std::optional<FourthDownVariant> variant;
  std::optional<int> yardage_threshold;    // Y, yds_less_than only
  std::optional<double> pass_probability;  // p, pass_rush only

  static StrategySpec empirical() { return {}; }
  static StrategySpec fourth_down(FourthDownVariant v) {
    StrategySpec s;
    s.family = StrategyFamily::fourth_down;
    s.variant = v;
    return s;
  }
  static StrategySpec yds_less_than(int y) {
    auto s = fourth_down(FourthDownVariant::yds_less_than);
    s.yardage_threshold = y;
    return s;
  }
  static StrategySpec pass_rush(double p) {
    StrategySpec s;
    s.family = StrategyFamily::pass_rush;
    s.pass_probability = p;
    return s;
  }

  bool is(FourthDownVariant v) const { return family == StrategyFamily::fourth_down && variant == v; }
  bool needs_ep_model() const { return is(FourthDownVariant::expected_points); }

  void validate() const {
    if ((family == StrategyFamily::fourth_down) != variant.has_value()) {
      throw ValidationError("a fourth-down variant is required exactly for the fourth_down family");
    }
    if (is(FourthDownVariant::yds_less_than) != yardage_threshold.has_value()) {
      throw ValidationError("yardage threshold Y is required exactly for yds_less_than");
    }
    if (yardage_threshold && *yardage_threshold < 0) throw ValidationError("yardage threshold Y must be >= 0");
    if ((family == StrategyFamily::pass_rush) != pass_probability.has_value()) {
      throw ValidationError("pass probability p is required exactly for pass_rush");
    }
    if (pass_probability && !(*pass_probability >= 0.0 && *pass_probability <= 1.0)) {
      throw ValidationError("pass probability p must lie in [0, 1]");
    }
  }

  // Parseable token: empirical, fourth:<variant>, pass_rush.
  std::string token() const {
    switch (family) {
      case StrategyFamily::empirical: return "empirical";
      case StrategyFamily::pass_rush: return "pass_rush";
      case StrategyFamily::fourth_down: return "fourth:" + std::string(to_string(*variant));
    }
    return "?";
  }

  std::string label() const {
    std::ostringstream os;
    os << token();
    if (yardage_threshold) os << "(Y=" << *yardage_threshold << ")";
    if (pass_probability) os << "(p=" << *pass_probability << ")";
    return os.str();
  }
};

// Builds a strategy from its token plus optional Y / p. Rejects parameters
// that do not belong to the strategy.
inline StrategySpec parse_strategy(std::string_view token, std::optional<int> y = std::nullopt,
                                   std::optional<double> p = std::nullopt) {
  StrategySpec s;
  if (token == "empirical") {
    s = StrategySpec::empirical();
  } else if (token == "pass_rush") {
    if (!p) throw ValidationError("strategy pass_rush requires p");
    s = StrategySpec::pass_rush(*p);
    p.reset();
  } else if (token.substr(0, 7) == "fourth:") {
    auto v = parse_fourth_down_variant(token.substr(7));
    if (!v) throw ValidationError("unknown fourth-down variant '" + std::string(token.substr(7)) + "'");
    s = StrategySpec::fourth_down(*v);
    if (*v == FourthDownVariant::yds_less_than) {
      if (!y) throw ValidationError("strategy fourth:yds_less_than requires Y");
      s.yardage_threshold = *y;
      y.reset();
    }
  } else {
    throw ValidationError("unknown strategy '" + std::string(token) + "'");
  }
  if (y) throw ValidationError("Y only applies to fourth:yds_less_than");
  if (p) throw ValidationError("p only applies to pass_rush");
  s.validate();
  return s;
}

namespace detail {

inline SamplingDirective go_for_it(int down) {
  SamplingDirective d{KindSet::scrimmage(), DownSet{down}};
  if (down >= 2) d.downs.insert(down - 1);
  return d;
}

inline SamplingDirective empirical_directive(int down) { return {KindSet::all(), DownSet{down}}; }

}  // namespace detail

// Which plays the strategy allows for the next snap. Consumes randomness only
// for pass_rush on downs 1-3.
inline SamplingDirective decide(const StrategySpec& s, const GameState& state, const EPModel* ep, Rng& rng) {
  require_valid(state);
  const int down = state.down;
  const SamplingDirective scrimmage{KindSet::scrimmage(), DownSet{down}};
  switch (s.family) {
    case StrategyFamily::empirical:
      return detail::empirical_directive(down);
    case StrategyFamily::pass_rush: {
      if (down == 4) return detail::empirical_directive(down);
      const bool pass = uniform01(rng) < *s.pass_probability;
      return {KindSet{pass ? PlayKind::pass : PlayKind::run}, DownSet{down}};
    }
    case StrategyFamily::fourth_down:
      break;
  }
  switch (*s.variant) {
    case FourthDownVariant::empirical:
      return detail::empirical_directive(down);
    case FourthDownVariant::always_go:
      return detail::go_for_it(down);
    case FourthDownVariant::never_go:
      if (down == 4) return {KindSet::kicks(), DownSet{4}};
      return scrimmage;
    case FourthDownVariant::yds_less_than:
      if (down < 4) return scrimmage;
      if (state.yards_to_go <= *s.yardage_threshold) return detail::go_for_it(4);
      return {KindSet::kicks(), DownSet{4}};
    case FourthDownVariant::expected_points: {
      if (!ep) throw ConfigError("expected_points strategy requires an EP model");
      if (down < 4) return scrimmage;
      switch (best_choice(ev_fourth_down(state, *ep))) {
        case FourthDownChoice::go: return detail::go_for_it(4);
        case FourthDownChoice::field_goal: return {KindSet{PlayKind::field_goal}, DownSet{4}};
        case FourthDownChoice::punt: return {KindSet{PlayKind::punt}, DownSet{4}};
      }
    }
  }
  return detail::empirical_directive(down);
}

// Draws the next play for `state` under the strategy.
inline const Play& sample_play(const PlayPool& pool, const StrategySpec& strategy, const GameState& state,
                               const SamplerConfig& cfg, Rng& rng, const EPModel* ep = nullptr) {
  return sample_play(pool, state, decide(strategy, state, ep, rng), cfg, rng);
}

}  // namespace nflsim
