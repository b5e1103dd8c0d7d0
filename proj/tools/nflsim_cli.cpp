#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nflsim/nflsim.hpp"

namespace fs = std::filesystem;
using namespace nflsim;

namespace {

struct UsageError : ValidationError {
  using ValidationError::ValidationError;
};

struct DataOpts {
  std::vector<std::string> data;
  std::string pool;
  std::string seasons;
  std::string config;
  std::string teams_file;
  std::string ep_table;
};

struct SimOpts {
  std::uint64_t seed = 1;
  std::size_t n_sims = 10000;
  int from_yard_line = 25;
  bool until_score = false;
  bool single_drive = false;
  unsigned threads = 0;
  std::string group_by = "none";
  std::string out;
  std::string run_dir = "results";
  bool plot_data = false;
  bool crn = false;
};

struct Inputs {
  ProjectConfig config;
  std::optional<PlayPool> pool;
  std::vector<NextScoreSample> next_score;
  std::vector<fs::path> files;
};

std::vector<std::string> g_argv;

void say(const std::string& msg) { std::cerr << msg << '\n'; }

ProjectConfig load_project_config(const DataOpts& d) {
  ProjectConfig cfg = d.config.empty() ? ProjectConfig{} : load_config(d.config);
  if (!d.seasons.empty()) cfg.filters.seasons = parse_season_list(d.seasons);
  return cfg;
}

std::vector<fs::path> default_data_files(const std::set<int>& seasons) {
  const fs::path dir = default_cache_dir();
  std::vector<fs::path> out;
  for (int s : seasons) {
    for (auto src : {PbpSource::nflfastr, PbpSource::nflscrapr}) {
      const auto p = dir / pbp_file_name(src, s);
      if (fs::exists(p)) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

Inputs load_inputs(const DataOpts& d) {
  Inputs in;
  in.config = load_project_config(d);
  if (!d.pool.empty() && !d.data.empty()) throw UsageError("--pool and --data are mutually exclusive");

  std::vector<Play> plays;
  if (!d.pool.empty()) {
    auto cache = read_pool_cache(d.pool);
    in.files.push_back(d.pool);
    const auto& f = in.config.filters;
    for (auto& p : cache.plays) {
      if (!f.seasons.empty() && !f.seasons.count(p.season)) continue;
      plays.push_back(std::move(p));
    }
    in.next_score = std::move(cache.next_score);
  } else {
    std::vector<fs::path> files(d.data.begin(), d.data.end());
    if (files.empty()) {
      std::set<int> seasons = in.config.filters.seasons;
      if (seasons.empty()) seasons = {2018, 2019};
      files = default_data_files(seasons);
      if (files.empty()) {
        throw UsageError("no input data: pass --data or --pool, or run `fetch` first (looked in " +
                         default_cache_dir().string() + ")");
      }
    }
    for (const auto& f : files) {
      auto parsed = parse_pbp(f);
      say(f.string() + ": " + std::to_string(parsed.report.rows_read) + " rows read, " +
          std::to_string(parsed.report.rows_kept) + " kept");
      auto kept = prep_play_list(parsed.rows, in.config.filters);
      plays.insert(plays.end(), std::make_move_iterator(kept.begin()), std::make_move_iterator(kept.end()));
      auto ns = next_score_samples(parsed.rows, in.config.filters);
      in.next_score.insert(in.next_score.end(), ns.begin(), ns.end());
      in.files.push_back(f);
    }
  }
  if (!d.teams_file.empty()) in.files.push_back(d.teams_file);
  if (!d.ep_table.empty()) in.files.push_back(d.ep_table);
  if (!d.config.empty()) in.files.push_back(d.config);
  if (plays.empty()) throw EmptyPoolError("no plays survive the filters");
  in.pool.emplace(std::move(plays));
  say("pool: " + std::to_string(in.pool->size()) + " plays");
  return in;
}

std::optional<EPModel> ep_model_for(const Inputs& in, const DataOpts& d, bool needed) {
  if (!needed) return std::nullopt;
  EPModel m = d.ep_table.empty() ? fit_ep_model(*in.pool, in.next_score)
                                 : fit_ep_model(*in.pool, load_ep_table(d.ep_table));
  for (const auto& w : m.warnings) warn("EP fit: " + w);
  return m;
}

std::vector<std::pair<std::string, PlayPool>> grouped_pools(const Inputs& in, const DataOpts& d,
                                                            const std::string& group_by) {
  std::vector<std::pair<std::string, PlayPool>> out;
  const PlayPool& pool = *in.pool;
  if (group_by == "none") {
    if (d.teams_file.empty()) {
      out.emplace_back("all", pool);
    } else {
      out.emplace_back("teams", subset_by_teams(pool, load_team_list(d.teams_file)));
    }
  } else if (group_by == "playoff") {
    TeamGroup g;
    if (!d.teams_file.empty()) {
      g.name = "playoff";
      g.any_season = load_team_list(d.teams_file);
    } else if (auto it = in.config.groups.find("playoff"); it != in.config.groups.end()) {
      g = it->second;
    } else {
      throw UsageError("--group-by playoff needs --teams-file or a [group.playoff] section in --config");
    }
    out.emplace_back("playoff", subset_by_group(pool, g));
    out.emplace_back("non_playoff", subset_by_group(pool, g, true));
  } else if (group_by == "rtg") {
    auto t = passer_rating_terciles(pool);
    out.emplace_back("rtg_high", std::move(t.high));
    out.emplace_back("rtg_medium", std::move(t.medium));
    out.emplace_back("rtg_low", std::move(t.low));
  } else {
    throw UsageError("--group-by must be none, playoff or rtg");
  }
  return out;
}

fs::path results_dir(const SimOpts& s, const std::string& command) {
  fs::path dir;
  if (!s.out.empty()) {
    dir = s.out;
  } else {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream name;
    name << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << '-' << command;
    dir = fs::path(s.run_dir) / name.str();
    for (int k = 2; fs::exists(dir); ++k) dir = fs::path(s.run_dir) / (name.str() + "-" + std::to_string(k));
  }
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_file(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void write_manifest(const fs::path& dir, const Inputs& in, const SimOpts& s,
                    std::map<std::string, std::string> extra) {
  RunManifest m;
  m.command_line = g_argv;
  m.master_seed = s.seed;
  const auto& f = in.config.filters;
  std::string seasons;
  for (int y : f.seasons) seasons += (seasons.empty() ? "" : ",") + std::to_string(y);
  std::string types;
  for (const auto& t : f.season_types) types += (types.empty() ? "" : ",") + t;
  m.config = {{"n_sims", std::to_string(s.n_sims)},
              {"from_yard_line", std::to_string(s.from_yard_line)},
              {"single_drive", s.until_score ? "false" : "true"},
              {"group_by", s.group_by},
              {"filters.exclude_final_two_minutes", f.exclude_final_two_minutes ? "true" : "false"},
              {"filters.max_abs_score_differential", std::to_string(f.max_abs_score_differential)},
              {"filters.seasons", seasons},
              {"filters.season_types", types},
              {"filters.scrambles_as_passes", f.scrambles_as_passes ? "true" : "false"}};
  for (auto& [k, v] : extra) m.config[k] = v;
  for (const auto& p : in.files) m.add_input(p);
  nlohmann::ordered_json j = m;
  open_file(dir / "manifest.json") << j.dump(2) << '\n';
}

SimConfig sim_config(const SimOpts& s, const ProjectConfig& cfg, const CLI::App& app) {
  SimConfig c;
  c.n_sims = app.count("--n-sims") || !cfg.n_sims ? s.n_sims : *cfg.n_sims;
  c.from_yard_line = app.count("--from-yard-line") || !cfg.from_yard_line ? s.from_yard_line : *cfg.from_yard_line;
  c.master_seed = app.count("--seed") || !cfg.seed ? s.seed : *cfg.seed;
  c.single_drive = !s.until_score;
  c.validate();
  return c;
}

void print_summary(const std::string& group, const StrategySummary& s) {
  std::printf("%-12s %-34s n=%zu  fg=%5.1f%%  td=%5.1f%%  mean=%.3f  95%% CI (%.3f, %.3f)\n", group.c_str(),
              s.label.c_str(), s.n, 100 * s.pct_fg, 100 * s.pct_td, s.mean_score, s.ci95_low, s.ci95_high);
}

void add_data_options(CLI::App* cmd, DataOpts& d) {
  cmd->add_option("--data", d.data, "Play-by-play CSV files (plain or .gz)");
  cmd->add_option("--pool", d.pool, "Prepped pool cache written by `prep`");
  cmd->add_option("--seasons", d.seasons, "Seasons to keep, e.g. 2018,2019 or 2009-2019");
  cmd->add_option("--config", d.config, "INI file with filters and team groups");
  cmd->add_option("--teams-file", d.teams_file, "Team list restricting the pool, or the playoff set");
  cmd->add_option("--ep-table", d.ep_table, "Expected points table (CSV: yardline,ep)");
}

void add_sim_options(CLI::App* cmd, SimOpts& s) {
  cmd->add_option("--seed", s.seed, "Master seed");
  cmd->add_option("--n-sims", s.n_sims, "Drives per batch");
  cmd->add_option("--from-yard-line", s.from_yard_line, "Start yardline (yards from own goal)");
  auto* single = cmd->add_flag("--single-drive", s.single_drive, "One drive per simulation (default)");
  cmd->add_flag("--until-score", s.until_score, "Alternate possessions until either side scores")->excludes(single);
  cmd->add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--group-by", s.group_by, "none, playoff or rtg")
      ->check(CLI::IsMember({"none", "playoff", "rtg"}));
  cmd->add_option("--out", s.out, "Exact results directory");
  cmd->add_option("--run-dir", s.run_dir, "Parent of timestamped results directories");
}

std::vector<double> value_range(const std::vector<double>& values, std::optional<double> from, std::optional<double> to,
                                double step) {
  if (!values.empty()) {
    if (from || to) throw UsageError("give either --values or --from/--to, not both");
    return values;
  }
  if (!from || !to) throw UsageError("sweep needs --values or both --from and --to");
  if (step <= 0) throw UsageError("--step must be positive");
  if (*to < *from) throw UsageError("empty sweep range");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((*to - *from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(std::round((*from + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Monte Carlo drive simulator over NFL play-by-play data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // fetch
  std::string seasons_arg, source_arg = "nflfastr", dest, base_url;
  bool force = false;
  auto* fetch = app.add_subcommand("fetch", "Download play-by-play CSVs into the local cache");
  fetch->add_option("--seasons", seasons_arg, "Seasons, e.g. 2018,2019")->required();
  fetch->add_option("--source", source_arg, "nflfastr or nflscrapr")->check(CLI::IsMember({"nflfastr", "nflscrapr"}));
  fetch->add_option("--dest", dest, "Destination directory (default: $NFLSIM_CACHE_DIR or data/pbp)");
  fetch->add_option("--base-url", base_url, "Override the download base URL");
  fetch->add_flag("--force", force, "Re-download cached files");

  // prep
  DataOpts prep_d;
  std::string prep_out;
  auto* prep = app.add_subcommand("prep", "Parse, filter and cache a play pool");
  prep->add_option("--data", prep_d.data, "Play-by-play CSV files");
  prep->add_option("--seasons", prep_d.seasons, "Seasons to keep");
  prep->add_option("--config", prep_d.config, "INI file with filters");
  prep->add_option("--out", prep_out, "Pool cache path")->required();

  // simulate
  DataOpts sim_d;
  SimOpts sim_s;
  std::string strategy_arg = "empirical";
  std::optional<int> y_arg;
  std::optional<double> p_arg;
  auto* simulate = app.add_subcommand("simulate", "Simulate drives under one strategy");
  add_data_options(simulate, sim_d);
  add_sim_options(simulate, sim_s);
  simulate->add_option("--strategy", strategy_arg,
                       "empirical | pass_rush | fourth:{empirical,always_go,never_go,yds_less_than,expected_points}");
  simulate->add_option("--y", y_arg, "Yardage threshold for fourth:yds_less_than");
  simulate->add_option("--p", p_arg, "Pass probability for pass_rush");

  // compare
  DataOpts cmp_d;
  SimOpts cmp_s;
  std::vector<std::string> cmp_strategies{"fourth:always_go", "fourth:never_go", "fourth:empirical",
                                          "fourth:expected_points", "fourth:yds_less_than"};
  int cmp_y = 4;
  auto* compare = app.add_subcommand("compare", "Simulate several strategies side by side");
  add_data_options(compare, cmp_d);
  add_sim_options(compare, cmp_s);
  compare->add_option("--strategies", cmp_strategies, "Strategy tokens")->delimiter(',');
  compare->add_option("--y", cmp_y, "Y used by fourth:yds_less_than");

  // sweep
  DataOpts sw_d;
  SimOpts sw_s;
  std::vector<double> sw_values;
  std::optional<double> sw_from, sw_to;
  double sw_step = 1;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
  sweep->require_subcommand(1);
  std::string sweep_kind;
  for (const char* kind : {"y", "p"}) {
    auto* sub = sweep->add_subcommand(kind, std::string(kind) == "y" ? "Sweep Y for fourth:yds_less_than"
                                                                     : "Sweep p for pass_rush");
    add_data_options(sub, sw_d);
    add_sim_options(sub, sw_s);
    sub->add_option("--values", sw_values, "Explicit values")->delimiter(',');
    sub->add_option("--from", sw_from, "Range start");
    sub->add_option("--to", sw_to, "Range end (inclusive)");
    sub->add_option("--step", sw_step, "Range step");
    sub->add_flag("--plot-data", sw_s.plot_data, "Write per-figure CSVs under plot/");
    sub->add_flag("--crn", sw_s.crn, "Common random numbers across parameter values");
    sub->callback([&sweep_kind, kind] { sweep_kind = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (fetch->parsed()) {
    DownloadOptions opts;
    opts.source = *parse_pbp_source(source_arg);
    opts.base_url = base_url;
    opts.force = force;
    opts.progress = [](const std::string& m) { say(m); };
    const auto files = download_pbp(parse_season_list(seasons_arg), dest.empty() ? default_cache_dir() : fs::path(dest), opts);
    for (const auto& f : files) std::cout << f.path.string() << '\n';
    return 0;
  }

  if (prep->parsed()) {
    Inputs in = load_inputs(prep_d);
    write_pool_cache(prep_out, in.pool->plays(), in.next_score);
    std::cout << prep_out << ": " << in.pool->size() << " plays, " << in.next_score.size() << " next-score samples\n";
    return 0;
  }

  if (simulate->parsed() || compare->parsed()) {
    const bool is_sim = simulate->parsed();
    const DataOpts& d = is_sim ? sim_d : cmp_d;
    SimOpts& s = is_sim ? sim_s : cmp_s;
    CLI::App& cmd = is_sim ? *simulate : *compare;

    std::vector<StrategySpec> strategies;
    if (is_sim) {
      strategies.push_back(parse_strategy(strategy_arg, y_arg, p_arg));
    } else {
      for (const auto& t : cmp_strategies) {
        const bool wants_y = t == "fourth:yds_less_than";
        strategies.push_back(parse_strategy(t, wants_y ? std::optional<int>(cmp_y) : std::nullopt));
      }
    }
    Inputs in = load_inputs(d);
    const SimConfig cfg = sim_config(s, in.config, cmd);
    s.n_sims = cfg.n_sims;
    s.from_yard_line = cfg.from_yard_line;
    s.seed = cfg.master_seed;
    const bool need_ep = std::any_of(strategies.begin(), strategies.end(), [](auto& x) { return x.needs_ep_model(); });
    const auto ep = ep_model_for(in, d, need_ep);
    const auto pools = grouped_pools(in, d, s.group_by);

    const fs::path dir = results_dir(s, is_sim ? "simulate" : "compare");
    auto records_out = open_file(dir / "records.csv");
    std::ofstream jsonl;
    if (is_sim) jsonl = open_file(dir / "records.jsonl");
    records_out << "strategy,group," << kRecordsHeader << '\n';
    nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
    std::size_t batch = 0;
    for (const auto& strategy : strategies) {
      for (const auto& [group, pool] : pools) {
        SimConfig c = cfg;
        // Each (strategy, group) batch gets its own stream family, except a
        // single batch which uses the master seed directly.
        if (strategies.size() * pools.size() > 1) c.master_seed = derive_seed(cfg.master_seed, 0xBA7C0000ull + batch);
        ++batch;
        const auto records = sample_drives(pool, strategy, c, {}, ep ? &*ep : nullptr, s.threads);
        for (std::size_t i = 0; i < records.size(); ++i) {
          records_out << strategy.label() << ',' << group << ',';
          write_record_row(records_out, i, records[i]);
        }
        if (is_sim) write_records_jsonl(jsonl, records);
        const auto summary = summarize(records, strategy.label());
        auto j = summary_json(summary);
        j["group"] = group;
        summaries.push_back(j);
        print_summary(group, summary);
      }
    }
    open_file(dir / "summary.json") << summaries.dump(2) << '\n';
    std::map<std::string, std::string> extra;
    std::string tokens;
    for (const auto& st : strategies) tokens += (tokens.empty() ? "" : ",") + st.label();
    extra["strategies"] = tokens;
    write_manifest(dir, in, s, extra);
    std::cout << "results: " << dir.string() << '\n';
    return 0;
  }

  if (sweep->parsed()) {
    const auto values = value_range(sw_values, sw_from, sw_to, sw_step);
    if (values.empty()) throw UsageError("empty sweep range");
    CLI::App& cmd = *sweep->get_subcommand(sweep_kind);
    Inputs in = load_inputs(sw_d);
    const SimConfig cfg = sim_config(sw_s, in.config, cmd);
    sw_s.n_sims = cfg.n_sims;
    sw_s.from_yard_line = cfg.from_yard_line;
    sw_s.seed = cfg.master_seed;
    SweepOptions opts;
    opts.threads = sw_s.threads;
    opts.common_random_numbers = sw_s.crn;

    const auto pools = grouped_pools(in, sw_d, sw_s.group_by);
    std::vector<SweepRow> rows;
    nlohmann::ordered_json extra_json = nlohmann::ordered_json::object();
    if (sweep_kind == "y") {
      std::vector<int> ys;
      for (double v : values) {
        if (v != std::floor(v) || v < 0) throw UsageError("Y values must be non-negative integers");
        ys.push_back(static_cast<int>(v));
      }
      for (std::size_t g = 0; g < pools.size(); ++g) {
        SimConfig c = cfg;
        if (pools.size() > 1) c.master_seed = derive_seed(cfg.master_seed, 0x6B0000ull + g);
        auto part = sweep_yardage(pools[g].second, ys, c, {}, opts);
        for (auto& r : part) r.group = pools[g].first;
        rows.insert(rows.end(), part.begin(), part.end());
      }
    } else {
      for (double p : values) {
        if (p < 0 || p > 1) throw UsageError("p values must lie in [0, 1]");
      }
      std::vector<NamedPool> named;
      for (const auto& [name, pool] : pools) named.push_back(NamedPool{name, &pool});
      auto res = sweep_pass_probability(*in.pool, values, cfg, {}, named, opts);
      rows = std::move(res.rows);
      for (const auto& [g, share] : res.baseline_pass_share) extra_json["baseline_pass_share"][g] = share;
    }

    const fs::path dir = results_dir(sw_s, "sweep-" + sweep_kind);
    {
      auto wide = open_file(dir / "sweep.csv");
      write_sweep_csv(wide, rows);
      auto tidy = open_file(dir / "tidy.csv");
      write_tidy_csv(tidy, rows);
    }
    nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      auto j = summary_json(r.summary);
      j["group"] = r.group;
      j["parameter"] = r.parameter;
      summaries.push_back(j);
      print_summary(r.group, r.summary);
    }
    nlohmann::ordered_json summary{{"sweep", sweep_kind}, {"rows", summaries}};
    for (auto& [k, v] : extra_json.items()) summary[k] = v;
    open_file(dir / "summary.json") << summary.dump(2) << '\n';
    if (sw_s.plot_data) write_plot_data(dir / "plot", rows);
    std::ostringstream vals;
    for (std::size_t i = 0; i < values.size(); ++i) vals << (i ? "," : "") << fmt_num(values[i]);
    write_manifest(dir, in, sw_s, {{"sweep", sweep_kind}, {"values", vals.str()}, {"crn", sw_s.crn ? "true" : "false"}});
    std::cout << "results: " << dir.string() << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv, argv + argc);
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n(run with --help for usage)\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
