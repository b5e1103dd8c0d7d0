#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nflsim/error.hpp"
#include "nflsim/play.hpp"

namespace nflsim {

namespace detail {

// Compressed-row bucket index: `offsets[k]..offsets[k+1]` delimits the play
// indices stored under key k. Indices within a bucket are ascending.
class BucketIndex {
 public:
  BucketIndex() = default;

  template <typename KeyFn>
  BucketIndex(std::size_t n_keys, std::size_t n_items, KeyFn key_of) : offsets_(n_keys + 1, 0) {
    std::vector<std::uint32_t> keys(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
      keys[i] = static_cast<std::uint32_t>(key_of(i));
      ++offsets_[keys[i] + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    items_.resize(n_items);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n_items; ++i) items_[cursor[keys[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::span<const std::uint32_t> operator[](std::size_t key) const {
    return {items_.data() + offsets_[key], offsets_[key + 1] - offsets_[key]};
  }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace detail

// Immutable multiset of plays with situation indexes. Safe to share across
// threads once constructed.
class PlayPool {
 public:
  explicit PlayPool(std::vector<Play> plays) : plays_(std::move(plays)) {
    if (plays_.empty()) throw EmptyPoolError("play pool is empty");
    for (std::size_t i = 0; i < plays_.size(); ++i) {
      if (!satisfies_invariants(plays_[i])) {
        throw ValidationError("play " + std::to_string(i) + " violates play invariants");
      }
    }
    const std::size_t n = plays_.size();
    situation_ = detail::BucketIndex(kSituationKeys, n, [&](std::size_t i) {
      const Play& p = plays_[i];
      return situation_key(p.down, p.yards_to_go, p.yards_from_own_goal);
    });
    by_kind_ = detail::BucketIndex(kKinds * kSituationKeys, n, [&](std::size_t i) {
      const Play& p = plays_[i];
      return kind_slot(p.kind) * kSituationKeys + situation_key(p.down, p.yards_to_go, p.yards_from_own_goal);
    });
    by_kind_down_ytg_ = detail::BucketIndex(kKinds * kDownYtgKeys, n, [&](std::size_t i) {
      const Play& p = plays_[i];
      return kind_slot(p.kind) * kDownYtgKeys + down_ytg_key(p.down, p.yards_to_go);
    });
    build_punt_means();
  }

  std::size_t size() const { return plays_.size(); }
  std::span<const Play> plays() const { return plays_; }
  const Play& operator[](std::size_t i) const { return plays_[i]; }

  // All plays at exactly (down, ytg key, yardline), any kind.
  std::span<const std::uint32_t> lookup(int down, int yards_to_go, int yards_from_own_goal) const {
    if (!in_range(down, yards_from_own_goal)) return {};
    return situation_[situation_key(down, yards_to_go, yards_from_own_goal)];
  }

  std::span<const std::uint32_t> lookup(PlayKind kind, int down, int yards_to_go, int yards_from_own_goal) const {
    if (!in_range(down, yards_from_own_goal)) return {};
    return by_kind_[kind_slot(kind) * kSituationKeys + situation_key(down, yards_to_go, yards_from_own_goal)];
  }

  // Plays of one kind at (down, ytg key) regardless of field position.
  std::span<const std::uint32_t> lookup_any_yardline(PlayKind kind, int down, int yards_to_go) const {
    if (down < 1 || down > 4) return {};
    return by_kind_down_ytg_[kind_slot(kind) * kDownYtgKeys + down_ytg_key(down, yards_to_go)];
  }

  // Mean net punt yards for punts from the 10-yard band containing the
  // yardline; falls back to the pool-wide mean, then to a league-typical 40.
  double mean_net_punt(int yards_from_own_goal) const {
    const int band = std::clamp(yards_from_own_goal, 1, 99) / 10;
    if (punt_counts_[band] > 0) return punt_means_[band];
    return overall_punt_mean_;
  }

 private:
  static constexpr std::size_t kKinds = 4;
  static constexpr std::size_t kYardlines = 100;
  static constexpr std::size_t kDownYtgKeys = 4 * (kMaxYtgKey + 1);
  static constexpr std::size_t kSituationKeys = kDownYtgKeys * kYardlines;

  static bool in_range(int down, int yl) { return down >= 1 && down <= 4 && yl >= 1 && yl <= 99; }
  static std::size_t kind_slot(PlayKind k) { return static_cast<std::size_t>(k); }
  static std::size_t down_ytg_key(int down, int ytg) {
    return static_cast<std::size_t>(down - 1) * (kMaxYtgKey + 1) + static_cast<std::size_t>(ytg_key(ytg));
  }
  static std::size_t situation_key(int down, int ytg, int yl) {
    return down_ytg_key(down, ytg) * kYardlines + static_cast<std::size_t>(yl);
  }

  void build_punt_means() {
    std::array<double, 10> sums{};
    double total = 0;
    std::size_t n = 0;
    for (const Play& p : plays_) {
      if (p.kind != PlayKind::punt || !p.net_kick_yards) continue;
      const int band = p.yards_from_own_goal / 10;
      sums[band] += *p.net_kick_yards;
      ++punt_counts_[band];
      total += *p.net_kick_yards;
      ++n;
    }
    for (std::size_t b = 0; b < sums.size(); ++b) {
      punt_means_[b] = punt_counts_[b] ? sums[b] / static_cast<double>(punt_counts_[b]) : 0.0;
    }
    overall_punt_mean_ = n ? total / static_cast<double>(n) : 40.0;
  }

  std::vector<Play> plays_;
  detail::BucketIndex situation_;
  detail::BucketIndex by_kind_;
  detail::BucketIndex by_kind_down_ytg_;
  std::array<double, 10> punt_means_{};
  std::array<std::size_t, 10> punt_counts_{};
  double overall_punt_mean_ = 40.0;
};

// Builds the indexed pool; throws EmptyPoolError on empty input.
inline PlayPool build_index(std::vector<Play> plays) { return PlayPool(std::move(plays)); }

}  // namespace nflsim
