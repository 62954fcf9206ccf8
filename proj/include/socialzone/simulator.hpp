#ifndef SOCIALZONE_SIMULATOR_HPP
#define SOCIALZONE_SIMULATOR_HPP

/**
 * @file
 * @brief Closed-loop scenario engine and its file formats.
 *
 * A scenario is a robot start state and goal, constant-velocity people and wall
 * segments. Every step logs the state, the applied control and the barrier value
 * of each person (their zone at that instant) and each wall.
 */

#include "controller.hpp"
#include "core.hpp"
#include "dynamics.hpp"
#include "geometry.hpp"
#include "log.hpp"
#include "zone_model.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace socialzone {

struct ScenarioConfig
{
  std::string name;
  std::string description;
  RobotState start;
  Vec2 goal{Vec2::Zero()};
  std::vector<HumanState> humans;
  std::vector<Segment> walls;
  std::optional<std::string> zone_file;  ///< resolved against the scenario file's directory
  std::optional<ZoneModel> zone_inline;
  MpcConfig mpc;
  BarrierSettings barrier;
  double zone_query_speed{1.1};
  double duration{30.0};
  double termination_radius{0.1};
  double stop_speed{0.05};

  void validate() const
  {
    mpc.validate();
    if (!(duration > 0.0)) throw ConfigError("scenario " + name + ": duration must be positive");
    if (!(termination_radius > 0.0)) throw ConfigError("scenario " + name + ": termination radius must be positive");
  }
};

/// Barrier values of every person (zone at the humans' current state) then every wall.
inline std::vector<double> barrier_values(const Vec2 & p, std::span<const HumanState> humans,
                                          std::span<const Segment> walls, const ZoneModel & model, double query_speed,
                                          const BarrierSettings & bs)
{
  std::vector<double> h;
  for (const auto & hu : humans) {
    h.push_back(barrier_value(p, Barrier(zone_at(hu, model, query_speed).world, bs.robot_radius, bs.margin)));
  }
  for (const auto & w : walls) h.push_back(barrier_value(p, Barrier(w, bs.robot_radius, bs.margin)));
  return h;
}

struct SimRow
{
  double t{0.0};
  RobotState state;
  ControlInput u;
  std::vector<double> h;
  std::string status;  ///< solver status, "fallback:infeasible", or "terminal" on the last row
  double solve_ms{0.0};
};

struct SimSummary
{
  std::vector<double> min_h;  ///< per barrier
  double min_h_overall{std::numeric_limits<double>::infinity()};
  bool goal_reached{false};
  double goal_time{-1.0};
  double min_speed{0.0};
  double max_speed{0.0};
  double path_length{0.0};
  std::size_t steps{0};
  std::size_t infeasible_steps{0};
};

struct SimLog
{
  std::string scenario;
  double dt{0.1};
  double gamma{0.3};
  std::vector<std::string> barrier_names;
  std::vector<SimRow> rows;
  bool goal_reached{false};
  SimSummary summary;
};

/// Recomputes the summary from the rows alone.
inline SimSummary summarize(const SimLog & log)
{
  SimSummary s;
  s.min_h.assign(log.barrier_names.size(), std::numeric_limits<double>::infinity());
  s.min_speed = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const auto & r = log.rows[i];
    for (std::size_t j = 0; j < r.h.size() && j < s.min_h.size(); ++j) {
      s.min_h[j] = std::min(s.min_h[j], r.h[j]);
      s.min_h_overall = std::min(s.min_h_overall, r.h[j]);
    }
    const double v = r.state.velocity.norm();
    s.min_speed = std::min(s.min_speed, v);
    s.max_speed = std::max(s.max_speed, v);
    if (i > 0) s.path_length += (r.state.position - log.rows[i - 1].state.position).norm();
    if (r.status.rfind("fallback", 0) == 0) ++s.infeasible_steps;
  }
  if (log.rows.empty()) s.min_speed = 0.0;
  s.steps = log.rows.empty() ? 0 : log.rows.size() - 1;
  s.goal_reached = log.goal_reached;
  s.goal_time = log.goal_reached && !log.rows.empty() ? log.rows.back().t : -1.0;
  return s;
}

struct SimOptions
{
  bool record_timing{false};  ///< write wall-clock solve times; off keeps logs byte-reproducible
};

/**
 * @brief Runs @p cfg to goal or timeout.
 *
 * Throws ConfigError when any barrier starts non-positive.
 */
inline SimLog run_scenario(const ScenarioConfig & cfg, const ZoneModel & model, const SimOptions & opt = {})
{
  cfg.validate();
  if (model.empty()) throw ConfigError("scenario " + cfg.name + ": zone model is empty");
  const double dt = cfg.mpc.dt;

  SimLog log;
  log.scenario = cfg.name;
  log.dt = dt;
  log.gamma = cfg.mpc.gamma;
  for (std::size_t i = 0; i < cfg.humans.size(); ++i) log.barrier_names.push_back("human_" + std::to_string(i));
  for (std::size_t i = 0; i < cfg.walls.size(); ++i) log.barrier_names.push_back("wall_" + std::to_string(i));

  const auto h0 = barrier_values(cfg.start.position, cfg.humans, cfg.walls, model, cfg.zone_query_speed, cfg.barrier);
  for (std::size_t j = 0; j < h0.size(); ++j) {
    if (!(h0[j] > 0.0)) {
      throw ConfigError("scenario " + cfg.name + ": start violates " + log.barrier_names[j] + " (h = " +
                        std::to_string(h0[j]) + ")");
    }
  }

  MpcCbfController ctrl(cfg.mpc, cfg.barrier, cfg.zone_query_speed);
  RobotState x = cfg.start;
  std::vector<HumanState> humans = cfg.humans;
  const auto max_steps = static_cast<long>(std::floor(cfg.duration / dt + 1e-9));
  for (long k = 0;; ++k) {
    SimRow row;
    row.t = static_cast<double>(k) * dt;
    row.state = x;
    row.h = barrier_values(x.position, humans, cfg.walls, model, cfg.zone_query_speed, cfg.barrier);
    if ((x.position - cfg.goal).norm() <= cfg.termination_radius && x.velocity.norm() < cfg.stop_speed) {
      log.goal_reached = true;
      row.status = "terminal";
      log.rows.push_back(std::move(row));
      break;
    }
    if (k >= max_steps) {
      row.status = "terminal";
      log.rows.push_back(std::move(row));
      break;
    }
    const ControlStep step = ctrl.control_step(x, cfg.goal, humans, cfg.walls, model);
    row.u = step.u;
    row.status = step.fallback ? "fallback:" + to_string(step.solution.status) : to_string(step.solution.status);
    row.solve_ms = opt.record_timing ? step.solution.solve_ms : 0.0;
    if (step.fallback) log::warn("scenario ", cfg.name, " t=", row.t, ": solver infeasible, braking");
    log.rows.push_back(std::move(row));

    x = step_robot(x, step.u, dt);
    for (auto & h : humans) h = predict_human(h, 1, dt);
  }
  log.summary = summarize(log);
  return log;
}

// ---------------------------------------------------------------------------
// SimLog CSV: `t,x,y,vx,vy,ux,uy,h_<name>...,status,solve_ms`, preceded by
// `# socialzone simlog v1 scenario=<name> dt=<dt> gamma=<gamma> goal_reached=<0|1>`.

inline void write_simlog_csv(std::ostream & os, const SimLog & log)
{
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "# socialzone simlog v1 scenario=" << log.scenario << " dt=" << num(log.dt) << " gamma=" << num(log.gamma)
     << " goal_reached=" << (log.goal_reached ? 1 : 0) << '\n';
  os << "t,x,y,vx,vy,ux,uy";
  for (const auto & n : log.barrier_names) os << ",h_" << n;
  os << ",status,solve_ms\n";
  for (const auto & r : log.rows) {
    os << num(r.t) << ',' << num(r.state.position.x()) << ',' << num(r.state.position.y()) << ','
       << num(r.state.velocity.x()) << ',' << num(r.state.velocity.y()) << ',' << num(r.u.accel.x()) << ','
       << num(r.u.accel.y());
    for (const double h : r.h) os << ',' << num(h);
    os << ',' << r.status << ',' << num(r.solve_ms) << '\n';
  }
}

inline SimLog read_simlog_csv(std::istream & in)
{
  SimLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# socialzone simlog v1", 0) != 0) {
    throw ParseError("simlog: missing '# socialzone simlog v1' header");
  }
  std::istringstream meta(line.substr(22));
  for (std::string kv; meta >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    try {
      if (key == "scenario") log.scenario = val;
      if (key == "dt") log.dt = std::stod(val);
      if (key == "gamma") log.gamma = std::stod(val);
      if (key == "goal_reached") log.goal_reached = val == "1";
    } catch (const std::exception &) {
      throw ParseError("simlog: bad header field " + kv);
    }
  }
  if (!std::getline(in, line)) throw ParseError("simlog: missing column header");
  std::vector<std::string> cols;
  {
    std::istringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
  }
  if (cols.size() < 9 || cols[0] != "t" || cols[cols.size() - 2] != "status" || cols.back() != "solve_ms") {
    throw ParseError("simlog: unexpected column header");
  }
  const std::size_t nh = cols.size() - 9;
  for (std::size_t j = 0; j < nh; ++j) {
    const std::string & c = cols[7 + j];
    if (c.rfind("h_", 0) != 0) throw ParseError("simlog: barrier column must start with h_: " + c);
    log.barrier_names.push_back(c.substr(2));
  }
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
    if (f.size() != cols.size()) throw ParseError("simlog line " + std::to_string(lineno) + ": wrong field count");
    SimRow r;
    try {
      std::vector<double> v;
      for (std::size_t i = 0; i < 7 + nh; ++i) v.push_back(std::stod(f[i]));
      r.t = v[0];
      r.state = {Vec2(v[1], v[2]), Vec2(v[3], v[4])};
      r.u = {Vec2(v[5], v[6])};
      r.h.assign(v.begin() + 7, v.end());
      r.status = f[7 + nh];
      r.solve_ms = std::stod(f.back());
    } catch (const std::exception &) {
      throw ParseError("simlog line " + std::to_string(lineno) + ": non-numeric field");
    }
    log.rows.push_back(std::move(r));
  }
  if (!log.rows.empty()) log.dt = log.rows.size() > 1 ? log.rows[1].t - log.rows[0].t : log.dt;
  log.summary = summarize(log);
  return log;
}

inline nlohmann::json summary_json(const SimLog & log)
{
  const SimSummary & s = log.summary;
  nlohmann::json min_h = nlohmann::json::object();
  for (std::size_t j = 0; j < s.min_h.size(); ++j) min_h[log.barrier_names[j]] = s.min_h[j];
  return {{"format", "socialzone.sim_summary"},
          {"version", 1},
          {"scenario", log.scenario},
          {"goal_reached", s.goal_reached},
          {"goal_time_s", s.goal_reached ? nlohmann::json(s.goal_time) : nlohmann::json(nullptr)},
          {"min_h", min_h},
          {"min_h_overall", s.min_h.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.min_h_overall)},
          {"min_speed_m_s", s.min_speed},
          {"max_speed_m_s", s.max_speed},
          {"path_length_m", s.path_length},
          {"steps", s.steps},
          {"infeasible_steps", s.infeasible_steps}};
}

// ---------------------------------------------------------------------------
// Scenario JSON (socialzone.scenario v1).

inline constexpr const char * kScenarioFormat = "socialzone.scenario";

namespace detail {

inline Vec2 vec2_from_json(const nlohmann::json & j, const char * what)
{
  if (!j.is_array() || j.size() != 2) throw ParseError(std::string("scenario: ") + what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json vec2_to_json(const Vec2 & v) { return nlohmann::json::array({v.x(), v.y()}); }

template<int R>
nlohmann::json diag_to_json(const Eigen::Matrix<double, R, R> & M)
{
  if (!M.isDiagonal()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < R; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < R; ++k) row.push_back(M(i, k));
      rows.push_back(row);
    }
    return rows;
  }
  nlohmann::json d = nlohmann::json::array();
  for (int i = 0; i < R; ++i) d.push_back(M(i, i));
  return {{"diag", d}};
}

template<int R>
Eigen::Matrix<double, R, R> matrix_from_json(const nlohmann::json & j, const char * what)
{
  Eigen::Matrix<double, R, R> M = Eigen::Matrix<double, R, R>::Zero();
  if (j.is_object()) {
    const auto & d = j.at("diag");
    if (d.size() != R) throw ParseError(std::string("scenario: ") + what + ".diag has wrong length");
    for (int i = 0; i < R; ++i) M(i, i) = d[i].get<double>();
    return M;
  }
  if (!j.is_array() || j.size() != R) throw ParseError(std::string("scenario: ") + what + " has wrong shape");
  for (int i = 0; i < R; ++i) {
    if (!j[i].is_array() || j[i].size() != R) throw ParseError(std::string("scenario: ") + what + " has wrong shape");
    for (int k = 0; k < R; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

}  // namespace detail

inline nlohmann::json to_json(const ScenarioConfig & c)
{
  nlohmann::json humans = nlohmann::json::array();
  for (const auto & h : c.humans) {
    humans.push_back({{"position", detail::vec2_to_json(h.position)},
                      {"velocity", detail::vec2_to_json(h.velocity)},
                      {"facing_rad", h.facing}});
  }
  nlohmann::json walls = nlohmann::json::array();
  for (const auto & w : c.walls) walls.push_back({detail::vec2_to_json(w.a()), detail::vec2_to_json(w.b())});
  nlohmann::json zones;
  if (c.zone_inline) {
    zones = {{"inline", to_json(*c.zone_inline)}};
  } else if (c.zone_file) {
    zones = {{"file", *c.zone_file}};
  }
  return {{"format", kScenarioFormat},
          {"version", 1},
          {"name", c.name},
          {"description", c.description},
          {"robot", {{"position", detail::vec2_to_json(c.start.position)}, {"velocity", detail::vec2_to_json(c.start.velocity)}}},
          {"goal", detail::vec2_to_json(c.goal)},
          {"humans", humans},
          {"walls", walls},
          {"zones", zones},
          {"zone_query_speed_m_s", c.zone_query_speed},
          {"robot_radius_m", c.barrier.robot_radius},
          {"margin_m", c.barrier.margin},
          {"mpc",
           {{"N", c.mpc.N},
            {"N_h", c.mpc.Nh},
            {"dt_s", c.mpc.dt},
            {"gamma", c.mpc.gamma},
            {"Q", detail::diag_to_json<4>(c.mpc.Q)},
            {"P", detail::diag_to_json<4>(c.mpc.P)},
            {"R", detail::diag_to_json<2>(c.mpc.R)},
            {"v_max_m_s", c.mpc.v_max},
            {"u_max_m_s2", c.mpc.u_max}}},
          {"duration_s", c.duration},
          {"termination_radius_m", c.termination_radius},
          {"stop_speed_m_s", c.stop_speed}};
}

/// Missing optional keys keep their defaults.
inline ScenarioConfig scenario_from_json(const nlohmann::json & j)
{
  try {
    if (j.at("format").get<std::string>() != kScenarioFormat) throw ParseError("scenario: wrong format tag");
    if (j.at("version").get<int>() != 1) throw ParseError("scenario: unsupported version");
    ScenarioConfig c;
    c.name = j.at("name").get<std::string>();
    c.description = j.value("description", std::string{});
    const auto & robot = j.at("robot");
    c.start.position = detail::vec2_from_json(robot.at("position"), "robot.position");
    if (robot.contains("velocity")) c.start.velocity = detail::vec2_from_json(robot.at("velocity"), "robot.velocity");
    c.goal = detail::vec2_from_json(j.at("goal"), "goal");
    for (const auto & h : j.value("humans", nlohmann::json::array())) {
      HumanState hs;
      hs.position = detail::vec2_from_json(h.at("position"), "human.position");
      if (h.contains("velocity")) hs.velocity = detail::vec2_from_json(h.at("velocity"), "human.velocity");
      hs.facing = h.value("facing_rad", 0.0);
      c.humans.push_back(hs);
    }
    for (const auto & w : j.value("walls", nlohmann::json::array())) {
      if (!w.is_array() || w.size() != 2) throw ParseError("scenario: wall must be [[x, y], [x, y]]");
      c.walls.emplace_back(detail::vec2_from_json(w[0], "wall end"), detail::vec2_from_json(w[1], "wall end"));
    }
    if (j.contains("zones") && !j.at("zones").is_null()) {
      const auto & z = j.at("zones");
      if (z.contains("inline")) {
        c.zone_inline = zone_model_from_json(z.at("inline"));
      } else if (z.contains("file")) {
        c.zone_file = z.at("file").get<std::string>();
      }
    }
    c.zone_query_speed = j.value("zone_query_speed_m_s", c.zone_query_speed);
    c.barrier.robot_radius = j.value("robot_radius_m", c.barrier.robot_radius);
    c.barrier.margin = j.value("margin_m", c.barrier.margin);
    if (j.contains("mpc")) {
      const auto & m = j.at("mpc");
      c.mpc.N = m.value("N", c.mpc.N);
      c.mpc.Nh = m.value("N_h", c.mpc.Nh);
      c.mpc.dt = m.value("dt_s", c.mpc.dt);
      c.mpc.gamma = m.value("gamma", c.mpc.gamma);
      if (m.contains("Q")) c.mpc.Q = detail::matrix_from_json<4>(m.at("Q"), "mpc.Q");
      if (m.contains("P")) c.mpc.P = detail::matrix_from_json<4>(m.at("P"), "mpc.P");
      if (m.contains("R")) c.mpc.R = detail::matrix_from_json<2>(m.at("R"), "mpc.R");
      c.mpc.v_max = m.value("v_max_m_s", c.mpc.v_max);
      c.mpc.u_max = m.value("u_max_m_s2", c.mpc.u_max);
    }
    c.duration = j.value("duration_s", c.duration);
    c.termination_radius = j.value("termination_radius_m", c.termination_radius);
    c.stop_speed = j.value("stop_speed_m_s", c.stop_speed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("scenario schema: ") + e.what());
  } catch (const ConfigError & e) {
    throw ParseError(e.what());
  }
}

/// Reads a scenario file; a relative zone file path becomes relative to the scenario's directory.
inline ScenarioConfig read_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  ScenarioConfig c = scenario_from_json(j);
  if (c.zone_file && std::filesystem::path(*c.zone_file).is_relative()) {
    c.zone_file = (path.parent_path() / *c.zone_file).lexically_normal().string();
  }
  return c;
}

}  // namespace socialzone

#endif  // SOCIALZONE_SIMULATOR_HPP
