#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nflsim/error.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"
#include "nflsim/rng.hpp"

namespace nflsim {

struct SamplerConfig {
  int window_yards_from_own_goal = 5;
  int window_step = 5;
  int max_window = 15;
  int max_ytg_relaxation = 3;

  void validate() const {
    if (window_yards_from_own_goal < 0) throw ValidationError("yardline window must be >= 0");
    if (max_window < window_yards_from_own_goal) throw ValidationError("max_window must be >= the yardline window");
    if (window_step < 1) throw ValidationError("window step must be >= 1");
    if (max_ytg_relaxation < 0) throw ValidationError("max_ytg_relaxation must be >= 0");
  }
};

// Which plays a strategy allows for the next snap.
struct SamplingDirective {
  KindSet kinds;
  DownSet downs;

  bool operator==(const SamplingDirective&) const = default;
};

class NoEligiblePlaysError : public Error {
 public:
  NoEligiblePlaysError(const GameState& state, const std::string& context = {})
      : Error("no eligible plays for " + describe(state) + (context.empty() ? "" : " (" + context + ")")),
        state_(state) {}
  const GameState& state() const noexcept { return state_; }

 private:
  GameState state_;
};

// One step of the fallback ladder. `window` is the +/- yardline tolerance;
// nullopt means field position is ignored.
struct Rung {
  int level = 0;  // 0 exact, 1 widened window, 2 relaxed ytg, 3 no yardline
  int yards_to_go = 0;
  std::optional<int> window;

  bool operator==(const Rung&) const = default;
};

// Every rung in the order they are tried: for each ytg relaxation r = 0..max
// (ytg key minus r, stopping at 1), windows w0, w0+step, ... up to max_window;
// then the same ytg sequence with no yardline conditioning.
inline std::vector<Rung> fallback_ladder(const GameState& state, const SamplerConfig& cfg) {
  std::vector<Rung> rungs;
  const int base = ytg_key(state.yards_to_go);
  std::vector<int> ytgs;
  for (int r = 0; r <= cfg.max_ytg_relaxation && base - r >= 1; ++r) ytgs.push_back(base - r);
  for (std::size_t r = 0; r < ytgs.size(); ++r) {
    for (int w = cfg.window_yards_from_own_goal;; w += cfg.window_step) {
      const int window = std::min(w, cfg.max_window);
      const int level = r > 0 ? 2 : (window == cfg.window_yards_from_own_goal ? 0 : 1);
      rungs.push_back(Rung{level, ytgs[r], window});
      if (window >= cfg.max_window) break;
    }
  }
  for (int y : ytgs) rungs.push_back(Rung{3, y, std::nullopt});
  return rungs;
}

namespace detail {

// Calls f(span) for every index bucket covered by the rung, in a fixed order.
template <typename F>
void for_each_bucket(const PlayPool& pool, const GameState& state, const SamplingDirective& d, const Rung& rung,
                     F&& f) {
  for (PlayKind kind : kAllKinds) {
    if (!d.kinds.contains(kind)) continue;
    for (int down = 1; down <= 4; ++down) {
      if (!d.downs.contains(down)) continue;
      if (!rung.window) {
        f(pool.lookup_any_yardline(kind, down, rung.yards_to_go));
        continue;
      }
      const int lo = std::max(1, state.yards_from_own_goal - *rung.window);
      const int hi = std::min(99, state.yards_from_own_goal + *rung.window);
      for (int yl = lo; yl <= hi; ++yl) f(pool.lookup(kind, down, rung.yards_to_go, yl));
    }
  }
}

inline std::size_t rung_size(const PlayPool& pool, const GameState& state, const SamplingDirective& d,
                             const Rung& rung) {
  std::size_t n = 0;
  for_each_bucket(pool, state, d, rung, [&](auto span) { n += span.size(); });
  return n;
}

}  // namespace detail

// First rung of the ladder with at least one eligible play, with its size.
inline std::optional<std::pair<Rung, std::size_t>> first_nonempty_rung(const PlayPool& pool, const GameState& state,
                                                                       const SamplingDirective& d,
                                                                       const SamplerConfig& cfg) {
  for (const Rung& rung : fallback_ladder(state, cfg)) {
    const std::size_t n = detail::rung_size(pool, state, d, rung);
    if (n > 0) return std::make_pair(rung, n);
  }
  return std::nullopt;
}

// Play indices a snap in `state` may be drawn from under `d`.
inline std::vector<std::uint32_t> eligible_set(const PlayPool& pool, const GameState& state,
                                               const SamplingDirective& d, const SamplerConfig& cfg) {
  require_valid(state);
  auto found = first_nonempty_rung(pool, state, d, cfg);
  if (!found) throw NoEligiblePlaysError(state);
  std::vector<std::uint32_t> out;
  out.reserve(found->second);
  detail::for_each_bucket(pool, state, d, found->first,
                          [&](auto span) { out.insert(out.end(), span.begin(), span.end()); });
  return out;
}

// Uniform draw (with replacement) from the eligible set; returns the play index.
inline std::uint32_t sample_index(const PlayPool& pool, const GameState& state, const SamplingDirective& d,
                                  const SamplerConfig& cfg, Rng& rng) {
  require_valid(state);
  auto found = first_nonempty_rung(pool, state, d, cfg);
  if (!found) throw NoEligiblePlaysError(state);
  std::uniform_int_distribution<std::size_t> pick(0, found->second - 1);
  std::size_t k = pick(rng);
  std::uint32_t chosen = 0;
  bool done = false;
  detail::for_each_bucket(pool, state, d, found->first, [&](auto span) {
    if (done) return;
    if (k < span.size()) {
      chosen = span[k];
      done = true;
    } else {
      k -= span.size();
    }
  });
  return chosen;
}

inline const Play& sample_play(const PlayPool& pool, const GameState& state, const SamplingDirective& d,
                               const SamplerConfig& cfg, Rng& rng) {
  return pool[sample_index(pool, state, d, cfg, rng)];
}

}  // namespace nflsim
