#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nflsim/report.hpp"
#include "support.hpp"

using namespace nflsim;
using namespace testing_support;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

SweepRow row(double param, std::string group, double mean) {
  SweepRow r;
  r.strategy = "pass_rush";
  r.group = std::move(group);
  r.parameter = param;
  r.summary.n = 10;
  r.summary.pct_td = 0.2;
  r.summary.pct_fg = 0.1;
  r.summary.pct_no_score = 0.7;
  r.summary.mean_score = mean;
  r.summary.ci95_low = mean - 0.5;
  r.summary.ci95_high = mean + 0.5;
  return r;
}

}  // namespace

TEST(FmtNum, ShortestRoundTrip) {
  EXPECT_EQ(fmt_num(0.1), "0.1");
  EXPECT_EQ(fmt_num(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(fmt_num(2), "2");
  EXPECT_EQ(fmt_num(-1.25), "-1.25");
  std::mt19937_64 g(80);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(g);
    EXPECT_EQ(std::strtod(fmt_num(v).c_str(), nullptr), v);
  }
}

TEST(Records, CsvLayout) {
  DriveRecord td;
  td.outcome = DriveOutcome::touchdown;
  td.points = 7;
  td.n_plays = 9;
  td.end_yards_from_own_goal = 99;
  DriveRecord punt;
  punt.outcome = DriveOutcome::punt;
  punt.n_plays = 3;
  punt.end_yards_from_own_goal = 31;
  punt.turnover_yardline = 31;
  punt.scoring_team = Scorer::none;
  std::vector<DriveRecord> recs{td, punt};
  std::ostringstream out;
  write_records_csv(out, recs);
  auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], kRecordsHeader);
  EXPECT_EQ(l[1], "0,touchdown,7,9,99,,strategy,1");
  EXPECT_EQ(l[2], "1,punt,0,3,31,31,none,1");
}

TEST(Records, JsonLines) {
  std::mt19937_64 g(81);
  auto recs = random_records(g, 50);
  std::ostringstream out;
  write_records_jsonl(out, recs);
  auto l = lines(out.str());
  ASSERT_EQ(l.size(), 50u);
  for (std::size_t i = 0; i < l.size(); ++i) {
    auto j = nlohmann::json::parse(l[i]);
    EXPECT_EQ(j["drive"], i);
    EXPECT_EQ(j["outcome"], std::string(to_string(recs[i].outcome)));
    EXPECT_EQ(j["points"], recs[i].points);
    if (recs[i].turnover_yardline) {
      EXPECT_EQ(j["turnover_yardline"], *recs[i].turnover_yardline);
    } else {
      EXPECT_TRUE(j["turnover_yardline"].is_null());
    }
  }
}

TEST(Summary, JsonFields) {
  auto s = row(0.5, "all", 2.0).summary;
  s.label = "pass_rush(p=0.5)";
  auto j = summary_json(s);
  EXPECT_EQ(j["label"], "pass_rush(p=0.5)");
  EXPECT_EQ(j["n"], 10);
  EXPECT_DOUBLE_EQ(j["mean_score"].get<double>(), 2.0);
  EXPECT_TRUE(j["mean_turnover_yardline"].is_null());
  s.mean_turnover_yardline = 41.5;
  s.turnover_ci95 = std::make_pair(40.0, 43.0);
  j = summary_json(s);
  EXPECT_DOUBLE_EQ(j["mean_turnover_yardline"].get<double>(), 41.5);
  EXPECT_EQ(j["turnover_ci95"].size(), 2u);
}

TEST(Sweep, WideAndTidyCsv) {
  std::vector<SweepRow> rows{row(0, "high", 1.5), row(0.1, "low", 2.25)};
  std::ostringstream wide, tidy;
  write_sweep_csv(wide, rows);
  write_tidy_csv(tidy, rows);
  auto w = lines(wide.str());
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0], kSweepHeader);
  EXPECT_EQ(w[2], "pass_rush,low,0.1,10,0.7,0.1,0.2,0.30000000000000004,2.25,1.75,2.75,");
  auto t = lines(tidy.str());
  EXPECT_EQ(t[0], "strategy,group,parameter,metric,value");
  EXPECT_EQ(t.size(), 1u + 2 * 8);
  EXPECT_EQ(t[1], "pass_rush,high,0,n,10");
}

TEST(Sweep, PlotData) {
  auto dir = std::filesystem::temp_directory_path() / "nflsim_plot_test";
  std::filesystem::remove_all(dir);
  std::vector<SweepRow> rows{row(0, "high", 1.5), row(0, "low", 1.0)};
  auto files = write_plot_data(dir, rows);
  ASSERT_EQ(files.size(), 3u);
  std::ifstream in(dir / "fig_p_mean_score.csv");
  std::stringstream body;
  body << in.rdbuf();
  auto l = lines(body.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "p,group,mean_score,ci95_low,ci95_high");
  EXPECT_EQ(l[1], "0,high,1.5,1,2");

  std::vector<SweepRow> ys{row(4, "all", 2.0)};
  ys[0].strategy = "fourth:yds_less_than";
  files = write_plot_data(dir, ys);
  EXPECT_TRUE(std::filesystem::exists(dir / "fig_y_turnover_yardline.csv"));
  std::filesystem::remove_all(dir);
  EXPECT_TRUE(write_plot_data(dir, {}).empty());
}
