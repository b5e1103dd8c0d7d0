#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nflsim/drive.hpp"
#include "nflsim/error.hpp"
#include "nflsim/pool.hpp"
#include "nflsim/rng.hpp"
#include "nflsim/sampler.hpp"
#include "nflsim/strategy.hpp"

namespace nflsim {

inline constexpr double kZ95 = 1.96;

struct StrategySummary {
  std::string label;
  std::size_t n = 0;
  double pct_no_score = 0;
  double pct_fg = 0;
  double pct_td = 0;
  double pct_opponent_score = 0;  // until-score episodes only
  double mean_score = 0;
  double ci95_low = 0;
  double ci95_high = 0;
  std::optional<double> mean_turnover_yardline;
  std::optional<std::pair<double, double>> turnover_ci95;

  double ci_width() const { return ci95_high - ci95_low; }
};

// Points credited to the strategy team: negative when the opponent scored in
// an until-score episode.
inline double strategy_points(const DriveRecord& r) {
  if (r.scoring_team == Scorer::opponent) return -static_cast<double>(r.points > 0 ? r.points : kSafetyPoints);
  if (r.scoring_team == Scorer::strategy && r.outcome == DriveOutcome::safety) return kSafetyPoints;
  return r.points;
}

namespace detail {

struct MeanCi {
  double mean = 0, low = 0, high = 0;
};

inline MeanCi mean_ci(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  const double half = kZ95 * sd / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

}  // namespace detail

// Outcome shares, mean strategy points with a normal-approximation 95% CI
// (sample sd, n-1 denominator), and the mean yardline of lost possessions.
inline StrategySummary summarize(std::span<const DriveRecord> records, std::string label) {
  if (records.empty()) throw ValidationError("cannot summarize zero drive records");
  StrategySummary s;
  s.label = std::move(label);
  s.n = records.size();
  std::vector<double> pts;
  std::vector<double> lost_at;
  pts.reserve(records.size());
  std::size_t fg = 0, td = 0, opp = 0;
  for (const DriveRecord& r : records) {
    pts.push_back(strategy_points(r));
    if (r.scoring_team == Scorer::opponent) {
      ++opp;
    } else if (r.scoring_team == Scorer::strategy) {
      if (r.outcome == DriveOutcome::field_goal) ++fg;
      if (r.outcome == DriveOutcome::touchdown) ++td;
    }
    if (r.turnover_yardline && r.scoring_team != Scorer::opponent) lost_at.push_back(*r.turnover_yardline);
  }
  const double n = static_cast<double>(s.n);
  s.pct_fg = static_cast<double>(fg) / n;
  s.pct_td = static_cast<double>(td) / n;
  s.pct_opponent_score = static_cast<double>(opp) / n;
  s.pct_no_score = 1.0 - s.pct_fg - s.pct_td;
  auto ci = detail::mean_ci(pts);
  s.mean_score = ci.mean;
  s.ci95_low = ci.low;
  s.ci95_high = ci.high;
  if (!lost_at.empty()) {
    auto t = detail::mean_ci(lost_at);
    s.mean_turnover_yardline = t.mean;
    s.turnover_ci95 = std::make_pair(t.low, t.high);
  }
  return s;
}

// Mergeable single-pass accumulator (Welford / Chan) for parallel
// aggregation; finish() yields the same summary as summarize().
class SummaryAccumulator {
 public:
  void add(const DriveRecord& r) {
    if (r.scoring_team == Scorer::opponent) {
      ++opp_;
    } else if (r.scoring_team == Scorer::strategy) {
      fg_ += r.outcome == DriveOutcome::field_goal;
      td_ += r.outcome == DriveOutcome::touchdown;
    }
    points_.add(strategy_points(r));
    if (r.turnover_yardline && r.scoring_team != Scorer::opponent) lost_.add(*r.turnover_yardline);
  }

  void merge(const SummaryAccumulator& o) {
    fg_ += o.fg_;
    td_ += o.td_;
    opp_ += o.opp_;
    points_.merge(o.points_);
    lost_.merge(o.lost_);
  }

  std::size_t count() const { return points_.n; }

  StrategySummary finish(std::string label) const {
    if (points_.n == 0) throw ValidationError("cannot summarize zero drive records");
    StrategySummary s;
    s.label = std::move(label);
    s.n = points_.n;
    const double n = static_cast<double>(s.n);
    s.pct_fg = static_cast<double>(fg_) / n;
    s.pct_td = static_cast<double>(td_) / n;
    s.pct_opponent_score = static_cast<double>(opp_) / n;
    s.pct_no_score = 1.0 - s.pct_fg - s.pct_td;
    s.mean_score = points_.mean;
    const double half = kZ95 * points_.sd() / std::sqrt(n);
    s.ci95_low = points_.mean - half;
    s.ci95_high = points_.mean + half;
    if (lost_.n) {
      s.mean_turnover_yardline = lost_.mean;
      const double h = kZ95 * lost_.sd() / std::sqrt(static_cast<double>(lost_.n));
      s.turnover_ci95 = std::make_pair(lost_.mean - h, lost_.mean + h);
    }
    return s;
  }

 private:
  struct Moments {
    std::size_t n = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
      if (o.n == 0) return;
      const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
      const double d = o.mean - mean;
      const double total = na + nb;
      mean += d * nb / total;
      m2 += o.m2 + d * d * na * nb / total;
      n += o.n;
    }
    double sd() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
  };

  std::size_t fg_ = 0, td_ = 0, opp_ = 0;
  Moments points_;
  Moments lost_;
};

// Share of passes among scrimmage plays on downs 1-3.
inline double baseline_pass_share(const PlayPool& pool) {
  std::size_t pass = 0, scrimmage = 0;
  for (const Play& p : pool.plays()) {
    if (p.down > 3 || (p.kind != PlayKind::pass && p.kind != PlayKind::run)) continue;
    ++scrimmage;
    pass += p.kind == PlayKind::pass;
  }
  if (scrimmage == 0) throw ValidationError("pool has no scrimmage plays on downs 1-3");
  return static_cast<double>(pass) / static_cast<double>(scrimmage);
}

struct SweepOptions {
  unsigned threads = 1;
  // Reuse the same master seed for every parameter value instead of
  // deriving one per value.
  bool common_random_numbers = false;
};

struct SweepRow {
  std::string strategy;
  std::string group;  // "all" when not grouped
  double parameter = 0;
  StrategySummary summary;
};

struct NamedPool {
  std::string name;
  const PlayPool* pool = nullptr;
};

namespace detail {

inline SimConfig batch_config(const SimConfig& cfg, std::size_t ordinal, const SweepOptions& opts) {
  SimConfig c = cfg;
  if (!opts.common_random_numbers) c.master_seed = derive_seed(cfg.master_seed, 0x5EEB0000ull + ordinal);
  return c;
}

}  // namespace detail

// One independent batch of drives per Y under fourth:yds_less_than.
inline std::vector<SweepRow> sweep_yardage(const PlayPool& pool, std::span<const int> y_values, const SimConfig& cfg,
                                           const SamplerConfig& scfg = {}, const SweepOptions& opts = {}) {
  if (y_values.empty()) throw ValidationError("yardage sweep needs at least one Y value");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < y_values.size(); ++i) {
    const auto strategy = StrategySpec::yds_less_than(y_values[i]);
    const auto records = sample_drives(pool, strategy, detail::batch_config(cfg, i, opts), scfg, nullptr, opts.threads);
    rows.push_back(SweepRow{strategy.token(), "all", static_cast<double>(y_values[i]), summarize(records, strategy.label())});
  }
  return rows;
}

struct PassSweep {
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, double>> baseline_pass_share;  // per group
};

// One batch per (p, group). Without groups the whole pool is group "all".
inline PassSweep sweep_pass_probability(const PlayPool& pool, std::span<const double> p_values, const SimConfig& cfg,
                                        const SamplerConfig& scfg = {}, std::span<const NamedPool> groups = {},
                                        const SweepOptions& opts = {}) {
  if (p_values.empty()) throw ValidationError("pass-probability sweep needs at least one p value");
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("pass probability must lie in [0, 1]");
  }
  std::vector<NamedPool> targets(groups.begin(), groups.end());
  if (targets.empty()) targets.push_back(NamedPool{"all", &pool});

  PassSweep out;
  for (const auto& g : targets) out.baseline_pass_share.emplace_back(g.name, baseline_pass_share(*g.pool));
  std::size_t ordinal = 0;
  for (double p : p_values) {
    const auto strategy = StrategySpec::pass_rush(p);
    for (const auto& g : targets) {
      const auto records =
          sample_drives(*g.pool, strategy, detail::batch_config(cfg, ordinal++, opts), scfg, nullptr, opts.threads);
      out.rows.push_back(SweepRow{strategy.token(), g.name, p, summarize(records, strategy.label())});
    }
  }
  return out;
}

// Least-squares slope of y on x.
inline double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw ValidationError("slope undefined for constant x");
  return sxy / sxx;
}

}  // namespace nflsim
