#ifndef SOCIALZONE_PLOTS_HPP
#define SOCIALZONE_PLOTS_HPP

// Plot-ready numeric series written as CSV; no plotting happens here.

#include "core.hpp"
#include "geometry.hpp"
#include "simulator.hpp"
#include "zone_model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace socialzone {

struct PlotSeries
{
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct PlotBundle
{
  std::vector<PlotSeries> series;

  /// Throws Error when a row has the wrong width or a non-finite value.
  void validate() const
  {
    for (const auto & s : series) {
      for (const auto & r : s.rows) {
        if (r.size() != s.columns.size()) throw Error("plot series " + s.name + ": ragged row");
        for (const double v : r) {
          if (!std::isfinite(v)) throw Error("plot series " + s.name + ": non-finite value");
        }
      }
    }
  }
};

inline constexpr int kBoundarySamples = 128;

inline std::vector<Vec2> sample_boundary(const Ellipse & e, int count = kBoundarySamples)
{
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(e.boundary_point(2.0 * kPi * i / count));
  return pts;
}

inline std::string speed_tag(double speed)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", speed);
  return buf;
}

/// One body-frame boundary polyline per modeled speed: `zone_<speed>`.
inline PlotBundle zone_plot_bundle(const ZoneModel & model)
{
  PlotBundle b;
  for (std::size_t i = 0; i < model.zones.size(); ++i) {
    PlotSeries s{"zone_" + speed_tag(model.speeds[i]), {"x", "y"}, {}};
    for (const Vec2 & p : sample_boundary(model.zones[i].to_ellipse())) s.rows.push_back({p.x(), p.y()});
    b.series.push_back(std::move(s));
  }
  return b;
}

/// Robot trajectory and barrier values over time.
inline PlotBundle simlog_plot_bundle(const SimLog & log)
{
  PlotBundle b;
  PlotSeries traj{"trajectory", {"t", "x", "y", "vx", "vy", "speed"}, {}};
  PlotSeries hs{"h_series", {"t"}, {}};
  for (const auto & n : log.barrier_names) hs.columns.push_back("h_" + n);
  for (const auto & r : log.rows) {
    traj.rows.push_back({r.t, r.state.position.x(), r.state.position.y(), r.state.velocity.x(), r.state.velocity.y(),
                         r.state.velocity.norm()});
    std::vector<double> row{r.t};
    row.insert(row.end(), r.h.begin(), r.h.end());
    hs.rows.push_back(std::move(row));
  }
  b.series.push_back(std::move(traj));
  b.series.push_back(std::move(hs));
  return b;
}

/// simlog_plot_bundle plus people, their zones every @p zone_every steps, and walls.
inline PlotBundle scenario_plot_bundle(const ScenarioConfig & cfg, const SimLog & log, const ZoneModel & model,
                                       int zone_every = 10)
{
  PlotBundle b = simlog_plot_bundle(log);
  PlotSeries people{"humans", {"t", "human", "x", "y"}, {}};
  PlotSeries zones{"human_zones", {"t", "human", "x", "y"}, {}};
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const double t = log.rows[k].t;
    for (std::size_t i = 0; i < cfg.humans.size(); ++i) {
      const HumanState h = predict_human(cfg.humans[i], static_cast<long>(k), log.dt);
      people.rows.push_back({t, static_cast<double>(i), h.position.x(), h.position.y()});
      if (zone_every > 0 && k % static_cast<std::size_t>(zone_every) == 0) {
        for (const Vec2 & p : sample_boundary(zone_at(h, model, cfg.zone_query_speed).world)) {
          zones.rows.push_back({t, static_cast<double>(i), p.x(), p.y()});
        }
      }
    }
  }
  PlotSeries walls{"walls", {"wall", "x", "y"}, {}};
  for (std::size_t i = 0; i < cfg.walls.size(); ++i) {
    walls.rows.push_back({static_cast<double>(i), cfg.walls[i].a().x(), cfg.walls[i].a().y()});
    walls.rows.push_back({static_cast<double>(i), cfg.walls[i].b().x(), cfg.walls[i].b().y()});
  }
  b.series.push_back(std::move(people));
  b.series.push_back(std::move(zones));
  b.series.push_back(std::move(walls));
  return b;
}

/// Writes `<dir>/<name>.csv` per series, each starting with `# socialzone plot <name> v1`.
inline void write_plot_bundle(const std::filesystem::path & dir, const PlotBundle & bundle)
{
  bundle.validate();
  std::filesystem::create_directories(dir);
  char buf[64];
  for (const auto & s : bundle.series) {
    std::ofstream os(dir / (s.name + ".csv"));
    if (!os) throw Error("cannot write " + (dir / (s.name + ".csv")).string());
    os << "# socialzone plot " << s.name << " v1\n";
    for (std::size_t c = 0; c < s.columns.size(); ++c) os << (c ? "," : "") << s.columns[c];
    os << '\n';
    for (const auto & r : s.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", r[c]);
        os << (c ? "," : "") << buf;
      }
      os << '\n';
    }
  }
}

}  // namespace socialzone

#endif  // SOCIALZONE_PLOTS_HPP
