#ifndef SOCIALZONE_SCENARIOS_HPP
#define SOCIALZONE_SCENARIOS_HPP

// Built-in scenarios and the reconstructed zone model they run against.
// Coordinates are reconstructions (no published geometry); see docs/scenarios.md.

#include "simulator.hpp"
#include "zone_model.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace socialzone {

/**
 * @brief Hand-built speed-indexed zone model.
 *
 * Zones grow with speed and reach further forward; the center sits 4 cm to the
 * walker's right so the left side is slightly tighter.
 */
inline ZoneModel reconstructed_zone_model()
{
  ZoneModel m;
  for (int i = 0; i < 7; ++i) {
    const double s = 0.3 + 0.2 * i;
    auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
    m.speeds.push_back(r3(s));
    m.zones.push_back({Vec2(r3(0.25 * s), -0.04), r3(0.45 + 0.45 * s), r3(0.40 + 0.15 * s), 0.0});
  }
  m.provenance = {0, 20, 0.002, 2.0, "reconstructed"};
  return m;
}

namespace detail {

inline ScenarioConfig scenario_base(std::string name, std::string description)
{
  ScenarioConfig c;
  c.name = std::move(name);
  c.description = std::move(description) + " [reconstructed geometry]";
  c.zone_file = "../data/zone_model_reconstructed.json";
  c.mpc.gamma = 0.15;
  return c;
}

inline ScenarioConfig gap_scenario(bool mirrored)
{
  const double m = mirrored ? -1.0 : 1.0;
  ScenarioConfig c = scenario_base(mirrored ? "s3b" : "s3a",
                                   std::string("restricted pathway, person transits a 1.6 m gap in a wall") +
                                     (mirrored ? " (mirror of s3a)" : ""));
  c.start.position = Vec2(-4.0, -2.0 * m);
  c.goal = Vec2(4.0, 2.0 * m);
  c.humans.push_back({Vec2(3.0, 0.3 * m), Vec2(-0.5, 0.0), kPi});
  c.walls.emplace_back(Vec2(0.0, -6.0), Vec2(0.0, -0.8));
  c.walls.emplace_back(Vec2(0.0, 0.8), Vec2(0.0, 6.0));
  c.duration = 40.0;
  return c;
}

}  // namespace detail

inline std::vector<ScenarioConfig> builtin_scenarios()
{
  std::vector<ScenarioConfig> out;

  ScenarioConfig s1 = detail::scenario_base("s1", "open space, stationary person facing the robot, head-on approach");
  s1.start.position = Vec2(0.0, 0.0);
  s1.goal = Vec2(8.0, 0.0);
  s1.humans.push_back({Vec2(4.0, 0.0), Vec2::Zero(), kPi});
  s1.duration = 30.0;
  out.push_back(s1);

  ScenarioConfig s2 = detail::scenario_base("s2", "2.4 m corridor, person walking toward the robot at 0.5 m/s near one wall");
  s2.start.position = Vec2(0.0, 0.0);
  s2.goal = Vec2(10.0, 0.0);
  s2.humans.push_back({Vec2(9.0, -0.8), Vec2(-0.5, 0.0), kPi});
  s2.walls.emplace_back(Vec2(-2.0, -1.2), Vec2(14.0, -1.2));
  s2.walls.emplace_back(Vec2(-2.0, 1.2), Vec2(14.0, 1.2));
  s2.duration = 40.0;
  out.push_back(s2);

  out.push_back(detail::gap_scenario(false));
  out.push_back(detail::gap_scenario(true));
  return out;
}

inline std::optional<ScenarioConfig> find_builtin(const std::string & name)
{
  for (auto & s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

}  // namespace socialzone

#endif  // SOCIALZONE_SCENARIOS_HPP
