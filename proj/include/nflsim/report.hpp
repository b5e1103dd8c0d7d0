#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nflsim/csv.hpp"
#include "nflsim/drive.hpp"
#include "nflsim/error.hpp"
#include "nflsim/stats.hpp"

namespace nflsim {

// Shortest round-trip text for a double, so outputs are byte-stable.
inline std::string fmt_num(double v) {
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string fmt_opt(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

inline const char* kRecordsHeader =
    "drive,outcome,points,n_plays,end_yards_from_own_goal,turnover_yardline,scoring_team,possessions";

inline void write_record_row(std::ostream& out, std::size_t ordinal, const DriveRecord& r) {
  out << ordinal << ',' << to_string(r.outcome) << ',' << r.points << ',' << r.n_plays << ','
      << r.end_yards_from_own_goal << ',' << fmt_opt(r.turnover_yardline) << ',' << to_string(r.scoring_team) << ','
      << r.possessions << '\n';
}

inline void write_records_csv(std::ostream& out, std::span<const DriveRecord> records) {
  out << kRecordsHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) write_record_row(out, i, records[i]);
}

inline void write_records_jsonl(std::ostream& out, std::span<const DriveRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    nlohmann::ordered_json j{{"drive", i},
                             {"outcome", to_string(r.outcome)},
                             {"points", r.points},
                             {"n_plays", r.n_plays},
                             {"end_yards_from_own_goal", r.end_yards_from_own_goal},
                             {"turnover_yardline", nullptr},
                             {"scoring_team", to_string(r.scoring_team)},
                             {"possessions", r.possessions}};
    if (r.turnover_yardline) j["turnover_yardline"] = *r.turnover_yardline;
    out << j.dump() << '\n';
  }
}

inline nlohmann::ordered_json summary_json(const StrategySummary& s) {
  nlohmann::ordered_json j{{"label", s.label},
                           {"n", s.n},
                           {"pct_no_score", s.pct_no_score},
                           {"pct_fg", s.pct_fg},
                           {"pct_td", s.pct_td},
                           {"pct_opponent_score", s.pct_opponent_score},
                           {"mean_score", s.mean_score},
                           {"ci95_low", s.ci95_low},
                           {"ci95_high", s.ci95_high},
                           {"mean_turnover_yardline", nullptr},
                           {"turnover_ci95", nullptr}};
  if (s.mean_turnover_yardline) j["mean_turnover_yardline"] = *s.mean_turnover_yardline;
  if (s.turnover_ci95) j["turnover_ci95"] = {s.turnover_ci95->first, s.turnover_ci95->second};
  return j;
}

inline const char* kSweepHeader =
    "strategy,group,parameter,n,pct_no_score,pct_fg,pct_td,pct_score,mean_score,ci95_low,ci95_high,"
    "mean_turnover_yardline";

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out << r.strategy << ',' << csv_escape(r.group) << ',' << fmt_num(r.parameter) << ',' << s.n << ','
        << fmt_num(s.pct_no_score) << ',' << fmt_num(s.pct_fg) << ',' << fmt_num(s.pct_td) << ','
        << fmt_num(s.pct_fg + s.pct_td) << ',' << fmt_num(s.mean_score) << ',' << fmt_num(s.ci95_low) << ','
        << fmt_num(s.ci95_high) << ',' << (s.mean_turnover_yardline ? fmt_num(*s.mean_turnover_yardline) : "")
        << '\n';
  }
}

// Long format: one (strategy, group, parameter, metric, value) per line.
inline void write_tidy_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "strategy,group,parameter,metric,value\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    auto line = [&](const char* metric, double v) {
      out << r.strategy << ',' << csv_escape(r.group) << ',' << fmt_num(r.parameter) << ',' << metric << ','
          << fmt_num(v) << '\n';
    };
    line("n", static_cast<double>(s.n));
    line("pct_no_score", s.pct_no_score);
    line("pct_fg", s.pct_fg);
    line("pct_td", s.pct_td);
    line("pct_score", s.pct_fg + s.pct_td);
    line("mean_score", s.mean_score);
    line("ci95_low", s.ci95_low);
    line("ci95_high", s.ci95_high);
    if (s.mean_turnover_yardline) line("mean_turnover_yardline", *s.mean_turnover_yardline);
  }
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace detail

// Per-figure CSVs: yardage sweeps give score percentage, mean score and
// turnover yardline against Y; pass sweeps give mean score, score percentage
// and TD percentage against p for each group.
inline std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                          std::span<const SweepRow> rows) {
  std::vector<std::filesystem::path> written;
  if (rows.empty()) return written;
  const bool yardage = rows.front().strategy == "fourth:yds_less_than";
  struct Fig {
    const char* name;
    const char* metric;
    double (*get)(const StrategySummary&);
  };
  std::vector<Fig> figs;
  if (yardage) {
    figs = {{"fig_y_pct_score.csv", "pct_score", [](const StrategySummary& s) { return s.pct_fg + s.pct_td; }},
            {"fig_y_mean_score.csv", "mean_score", [](const StrategySummary& s) { return s.mean_score; }},
            {"fig_y_turnover_yardline.csv", "mean_turnover_yardline",
             [](const StrategySummary& s) { return s.mean_turnover_yardline.value_or(std::nan("")); }}};
  } else {
    figs = {{"fig_p_mean_score.csv", "mean_score", [](const StrategySummary& s) { return s.mean_score; }},
            {"fig_p_pct_score.csv", "pct_score", [](const StrategySummary& s) { return s.pct_fg + s.pct_td; }},
            {"fig_p_pct_td.csv", "pct_td", [](const StrategySummary& s) { return s.pct_td; }}};
  }
  for (const auto& f : figs) {
    const auto path = dir / f.name;
    auto out = detail::open_out(path);
    out << (yardage ? "Y" : "p") << ",group," << f.metric << ",ci95_low,ci95_high\n";
    for (const auto& r : rows) {
      const double v = f.get(r.summary);
      const bool with_ci = std::string_view(f.metric) == "mean_score";
      out << fmt_num(r.parameter) << ',' << csv_escape(r.group) << ',' << (std::isnan(v) ? "" : fmt_num(v)) << ','
          << (with_ci ? fmt_num(r.summary.ci95_low) : "") << ',' << (with_ci ? fmt_num(r.summary.ci95_high) : "")
          << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace nflsim
