#ifndef SOCIALZONE_CLI_HPP
#define SOCIALZONE_CLI_HPP

// `socialzone` command line: learn, simulate, export-plots.
// Exit codes: 0 ok, 1 input error, 2 safety violation, 3 goal timeout.

#include "core.hpp"
#include "log.hpp"
#include "pipeline.hpp"
#include "plots.hpp"
#include "scenarios.hpp"
#include "simulator.hpp"
#include "zone_model.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace socialzone {

enum ExitCode : int { exit_ok = 0, exit_input = 1, exit_unsafe = 2, exit_timeout = 3 };

inline constexpr double kSafetyTolerance = 1e-6;

namespace cli_detail {

namespace fs = std::filesystem;

inline void write_text(const fs::path & path, const std::string & text)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

struct LearnArgs
{
  std::vector<std::string> inputs;
  std::string config;
  std::string out;
  std::optional<double> period;
  bool strict{false};
  bool parallel{false};
};

inline int cmd_learn(const LearnArgs & a, std::ostream & out, std::ostream & err)
{
  try {
    PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : read_pipeline_config(a.config);
    if (a.period) cfg.period = *a.period;
    std::vector<fs::path> inputs(a.inputs.begin(), a.inputs.end());
    const PipelineResult res = run_pipeline(inputs, cfg, a.strict, a.parallel);
    if (!res.warnings.empty()) err << res.warnings.size() << " warning(s); see the report\n";

    ZoneModel model = res.learned.model;
    std::ostringstream zs;
    write_zone_model(zs, model);
    const fs::path out_path(a.out);
    write_text(out_path, zs.str());
    fs::path report = out_path;
    report.replace_extension(".report.json");
    write_text(report, report_json(res).dump(2) + "\n");

    const auto & c = res.counts;
    out << "learned " << model.speeds.size() << " zone(s) -> " << out_path.string() << '\n'
        << "  parsed " << c.parsed << ", in region " << c.in_region << ", interactions " << c.interactions
        << ", inliers " << c.inliers << '\n';
    return exit_ok;
  } catch (const std::exception & e) {
    err << "learn: " << e.what() << '\n';
    return exit_input;
  }
}

struct SimulateArgs
{
  std::vector<std::string> scenarios;
  std::string zones;
  std::string out{"sim_out"};
  bool list{false};
  bool parallel{false};
  bool timing{false};
};

struct ResolvedScenario
{
  ScenarioConfig config;
  ZoneModel model;
};

inline ResolvedScenario resolve_scenario(const std::string & what, const std::optional<ZoneModel> & zones_override)
{
  ResolvedScenario r;
  if (auto b = find_builtin(what)) {
    r.config = *b;
    r.model = zones_override ? *zones_override : reconstructed_zone_model();
    return r;
  }
  if (!fs::exists(what)) throw ParseError("unknown scenario '" + what + "' (not a built-in name or a file)");
  r.config = read_scenario(what);
  if (zones_override) {
    r.model = *zones_override;
  } else if (r.config.zone_inline) {
    r.model = *r.config.zone_inline;
  } else if (r.config.zone_file) {
    r.model = read_zone_model(*r.config.zone_file);
  } else {
    throw ParseError("scenario " + what + " names no zone model; pass --zones");
  }
  return r;
}

struct SimOutcome
{
  int code{exit_ok};
  std::string message;
};

inline SimOutcome simulate_one(const ResolvedScenario & rs, const fs::path & out_dir, bool timing)
{
  const ScenarioConfig & cfg = rs.config;
  const SimLog log = run_scenario(cfg, rs.model, SimOptions{timing});

  std::ostringstream csv;
  write_simlog_csv(csv, log);
  write_text(out_dir / (cfg.name + ".simlog.csv"), csv.str());
  write_text(out_dir / (cfg.name + ".summary.json"), summary_json(log).dump(2) + "\n");
  write_plot_bundle(out_dir / (cfg.name + "_plots"), scenario_plot_bundle(cfg, log, rs.model));

  const SimSummary & s = log.summary;
  std::ostringstream msg;
  msg << cfg.name << ": min h " << s.min_h_overall << ", ";
  if (s.goal_reached) {
    msg << "goal at " << s.goal_time << " s";
  } else {
    msg << "goal not reached in " << cfg.duration << " s";
  }
  if (s.infeasible_steps > 0) msg << ", " << s.infeasible_steps << " fallback step(s)";

  SimOutcome o;
  o.message = msg.str();
  if (s.min_h_overall < -kSafetyTolerance) {
    o.code = exit_unsafe;
  } else if (!s.goal_reached) {
    o.code = exit_timeout;
  }
  return o;
}

// Input errors dominate, then safety, then timeout.
inline int worst(int a, int b)
{
  auto rank = [](int c) { return c == exit_input ? 3 : c == exit_unsafe ? 2 : c == exit_timeout ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

inline int cmd_simulate(const SimulateArgs & a, std::ostream & out, std::ostream & err)
{
  if (a.list) {
    for (const auto & s : builtin_scenarios()) out << s.name << "  " << s.description << '\n';
    return exit_ok;
  }
  std::vector<ResolvedScenario> todo;
  try {
    std::optional<ZoneModel> zones;
    if (!a.zones.empty()) zones = read_zone_model(a.zones);
    std::vector<std::string> names = a.scenarios;
    if (names.empty() || (names.size() == 1 && names[0] == "all")) {
      names.clear();
      for (const auto & s : builtin_scenarios()) names.push_back(s.name);
    }
    for (const auto & n : names) todo.push_back(resolve_scenario(n, zones));
  } catch (const std::exception & e) {
    err << "simulate: " << e.what() << '\n';
    return exit_input;
  }

  const fs::path out_dir(a.out);
  auto run = [&](const ResolvedScenario & rs) {
    try {
      return simulate_one(rs, out_dir, a.timing);
    } catch (const std::exception & e) {
      return SimOutcome{exit_input, rs.config.name + ": " + e.what()};
    }
  };
  std::vector<SimOutcome> outcomes;
  if (a.parallel && todo.size() > 1) {
    std::vector<std::future<SimOutcome>> jobs;
    for (const auto & rs : todo) jobs.push_back(std::async(std::launch::async, run, std::cref(rs)));
    for (auto & j : jobs) outcomes.push_back(j.get());
  } else {
    for (const auto & rs : todo) outcomes.push_back(run(rs));
  }

  int code = exit_ok;
  for (const auto & o : outcomes) {
    (o.code == exit_ok ? out : err) << o.message << (o.code == exit_ok ? "" : " [FAIL]") << '\n';
    code = worst(code, o.code);
  }
  return code;
}

inline bool looks_like_json(const fs::path & p)
{
  std::ifstream in(p);
  char c = 0;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
  }
  return false;
}

inline int cmd_export_plots(const std::string & input, const std::string & out_dir, std::ostream & out,
                            std::ostream & err)
{
  try {
    if (!fs::exists(input)) throw ParseError("no such file: " + input);
    PlotBundle bundle;
    if (looks_like_json(input)) {
      bundle = zone_plot_bundle(read_zone_model(input));
    } else {
      std::ifstream in(input);
      bundle = simlog_plot_bundle(read_simlog_csv(in));
    }
    write_plot_bundle(out_dir, bundle);
    out << "wrote " << bundle.series.size() << " series to " << out_dir << '\n';
    return exit_ok;
  } catch (const std::exception & e) {
    err << "export-plots: " << e.what() << '\n';
    return exit_input;
  }
}

}  // namespace cli_detail

inline int run_cli(int argc, const char * const * argv, std::ostream & out = std::cout, std::ostream & err = std::cerr)
{
  CLI::App app{"Speed-dependent social zones and CBF-MPC navigation"};
  app.require_subcommand(1);

  cli_detail::LearnArgs la;
  auto * learn = app.add_subcommand("learn", "learn a zone model from trajectory logs or interaction records");
  learn->add_option("inputs", la.inputs, "ATC CSV logs or interaction-record files")->required();
  learn->add_option("--config", la.config, "pipeline config (socialzone.pipeline JSON)");
  learn->add_option("--out", la.out, "output zone model path")->required();
  learn->add_option("--period", la.period, "resampling period in seconds (overrides the config)");
  learn->add_flag("--strict", la.strict, "fail on the first malformed line");
  learn->add_flag("--parallel", la.parallel, "process input files concurrently");

  cli_detail::SimulateArgs sa;
  auto * sim = app.add_subcommand("simulate", "run built-in or file scenarios");
  sim->add_option("scenarios", sa.scenarios, "built-in names, scenario files, or 'all' (default)");
  sim->add_option("--scenario", sa.scenarios, "same as the positional argument; repeatable");
  sim->add_option("--zones", sa.zones, "zone model overriding the scenario's own");
  sim->add_option("--out", sa.out, "output directory")->capture_default_str();
  sim->add_flag("--list", sa.list, "print built-in scenario names and exit");
  sim->add_flag("--parallel", sa.parallel, "run scenarios concurrently");
  sim->add_flag("--timing", sa.timing, "record wall-clock solve times in the log");

  std::string plot_input, plot_out;
  auto * plots = app.add_subcommand("export-plots", "write plot-ready CSV from a zone model or a simlog");
  plots->add_option("input", plot_input, "zone model JSON or simlog CSV")->required();
  plots->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_ok : exit_input;
  }

  if (*learn) return cli_detail::cmd_learn(la, out, err);
  if (*sim) return cli_detail::cmd_simulate(sa, out, err);
  return cli_detail::cmd_export_plots(plot_input, plot_out, out, err);
}

}  // namespace socialzone

#endif  // SOCIALZONE_CLI_HPP
