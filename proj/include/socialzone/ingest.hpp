#ifndef SOCIALZONE_INGEST_HPP
#define SOCIALZONE_INGEST_HPP

/**
 * @file
 * @brief ATC-format pedestrian logs: parsing, resampling onto a fixed grid and
 * region-of-interest clipping.
 *
 * Input lines follow
 * `time_ms,person_id,x_mm,y_mm,z_mm,velocity_mm_s,motion_angle_rad[,facing_angle_rad]`.
 * Units are converted to seconds and meters on parse. The height and facing
 * columns are read but not used downstream.
 */

#include "core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socialzone {

struct TrajectorySample
{
  double time{0.0};  ///< seconds
  std::int64_t person_id{0};
  Vec2 position{Vec2::Zero()};  ///< meters
  double speed{0.0};            ///< m/s, >= 0
  double motion_angle{0.0};     ///< radians in (-pi, pi]
};

/// One person's samples on a uniform grid. Sample i sits at time (first_step + i) * period.
struct Track
{
  std::int64_t person_id{0};
  double period{0.1};
  std::int64_t first_step{0};
  std::vector<TrajectorySample> samples;

  std::int64_t step_of(std::size_t i) const { return first_step + static_cast<std::int64_t>(i); }
  std::int64_t last_step() const { return first_step + static_cast<std::int64_t>(samples.size()) - 1; }
};

struct RegionOfInterest
{
  Vec2 min_corner{Vec2::Zero()};
  Vec2 max_corner{Vec2::Ones()};

  RegionOfInterest() = default;
  RegionOfInterest(Vec2 lo, Vec2 hi) : min_corner(std::move(lo)), max_corner(std::move(hi))
  {
    if (!(min_corner.x() < max_corner.x() && min_corner.y() < max_corner.y())) {
      throw ConfigError("region of interest requires min_corner < max_corner componentwise");
    }
  }

  bool contains(const Vec2 & p) const
  {
    return p.x() >= min_corner.x() && p.y() >= min_corner.y() && p.x() <= max_corner.x() &&
           p.y() <= max_corner.y();
  }
};

/// Closed interval of source timestamps (milliseconds) to drop before analysis.
struct ExcludeInterval
{
  double start_ms{0.0};
  double end_ms{0.0};
};

struct ParseIssue
{
  std::size_t line{0};  ///< 1-based
  std::string message;
};

struct ParseReport
{
  std::size_t lines_read{0};
  std::size_t samples_parsed{0};
  std::vector<ParseIssue> issues;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double & out)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_int(std::string_view s, std::int64_t & out)
{
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc{} && ptr == s.data() + s.size()) return true;
  // integral values written as floats ("42.0")
  double d;
  if (!parse_double(s, d) || d != std::floor(d) || std::abs(d) > 9.0e15) return false;
  out = static_cast<std::int64_t>(d);
  return true;
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

/**
 * @brief Parse an ATC CSV stream.
 *
 * Malformed lines are recorded in @p report and skipped; with @p strict the first
 * malformed line raises ParseError instead. Blank lines and lines starting with
 * '#' are ignored.
 */
inline std::vector<TrajectorySample> parse_atc_csv(std::istream & in, ParseReport & report, bool strict = false)
{
  std::vector<TrajectorySample> out;
  std::string buf;
  std::size_t lineno = 0;
  auto fail = [&](std::string msg) {
    if (strict) throw ParseError("line " + std::to_string(lineno) + ": " + msg);
    report.issues.push_back({lineno, std::move(msg)});
  };
  while (std::getline(in, buf)) {
    ++lineno;
    const auto line = detail::trim(buf);
    if (line.empty() || line.front() == '#') continue;
    ++report.lines_read;
    const auto f = detail::split(line, ',');
    if (f.size() < 7) {
      fail("expected at least 7 fields, got " + std::to_string(f.size()));
      continue;
    }
    double t_ms, x_mm, y_mm, z_mm, v_mm, angle;
    std::int64_t id;
    if (!detail::parse_double(f[0], t_ms)) { fail("bad time"); continue; }
    if (!detail::parse_int(f[1], id)) { fail("bad person id"); continue; }
    if (!detail::parse_double(f[2], x_mm) || !detail::parse_double(f[3], y_mm) ||
        !detail::parse_double(f[4], z_mm)) {
      fail("bad position");
      continue;
    }
    if (!detail::parse_double(f[5], v_mm) || v_mm < 0.0) { fail("bad speed"); continue; }
    if (!detail::parse_double(f[6], angle)) { fail("bad motion angle"); continue; }
    if (f.size() > 7) {
      double facing;
      if (!detail::parse_double(f[7], facing)) { fail("bad facing angle"); continue; }
    }
    TrajectorySample s;
    s.time = t_ms / 1000.0;
    s.person_id = id;
    s.position = Vec2(x_mm / 1000.0, y_mm / 1000.0);
    s.speed = v_mm / 1000.0;
    s.motion_angle = normalize_angle(angle);
    out.push_back(s);
  }
  report.samples_parsed = out.size();
  return out;
}

inline std::vector<TrajectorySample> parse_atc_csv(std::istream & in)
{
  ParseReport report;
  return parse_atc_csv(in, report, false);
}

/// Drops samples whose source timestamp falls in any closed interval.
inline std::vector<TrajectorySample> drop_excluded(std::vector<TrajectorySample> samples,
                                                   std::span<const ExcludeInterval> intervals)
{
  if (intervals.empty()) return samples;
  std::erase_if(samples, [&](const TrajectorySample & s) {
    const double ms = s.time * 1000.0;
    return std::ranges::any_of(intervals, [&](const ExcludeInterval & iv) {
      return ms >= iv.start_ms && ms <= iv.end_ms;
    });
  });
  return samples;
}

namespace detail {

// Finite-difference kinematics on a uniform grid; central in the interior.
inline void recompute_kinematics(std::vector<TrajectorySample> & s, double period)
{
  const std::size_t n = s.size();
  if (n < 2) return;
  std::vector<Vec2> vel(n);
  vel[0] = (s[1].position - s[0].position) / period;
  vel[n - 1] = (s[n - 1].position - s[n - 2].position) / period;
  for (std::size_t i = 1; i + 1 < n; ++i) vel[i] = (s[i + 1].position - s[i - 1].position) / (2.0 * period);

  // heading of a momentarily stationary walker is inherited from its neighbours
  std::size_t first_moving = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (vel[i].norm() > 1e-12) {
      first_moving = i;
      break;
    }
  }
  double heading = first_moving < n ? std::atan2(vel[first_moving].y(), vel[first_moving].x()) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i].speed = vel[i].norm();
    if (s[i].speed > 1e-12) heading = std::atan2(vel[i].y(), vel[i].x());
    s[i].motion_angle = normalize_angle(heading);
  }
}

}  // namespace detail

/**
 * @brief Group samples by person and linearly resample onto the grid k * period.
 *
 * Raw gaps longer than 2 * period split a person's data. Speed and heading are
 * recomputed from the resampled positions. Runs yielding fewer than two grid
 * samples are dropped.
 */
inline std::vector<Track> build_tracks(std::span<const TrajectorySample> samples, double period)
{
  if (!(period > 0.0)) throw ConfigError("resample period must be positive");
  std::map<std::int64_t, std::vector<TrajectorySample>> by_id;
  for (const auto & s : samples) by_id[s.person_id].push_back(s);

  constexpr double kGridEps = 1e-9;
  std::vector<Track> tracks;
  for (auto & [id, raw] : by_id) {
    std::ranges::stable_sort(raw, {}, &TrajectorySample::time);
    raw.erase(std::unique(raw.begin(), raw.end(),
                          [](const auto & a, const auto & b) { return a.time == b.time; }),
              raw.end());

    std::size_t seg_begin = 0;
    while (seg_begin < raw.size()) {
      std::size_t seg_end = seg_begin + 1;
      while (seg_end < raw.size() && raw[seg_end].time - raw[seg_end - 1].time <= 2.0 * period + kGridEps) {
        ++seg_end;
      }
      const double t0 = raw[seg_begin].time, t1 = raw[seg_end - 1].time;
      const auto n0 = static_cast<std::int64_t>(std::ceil(t0 / period - kGridEps));
      const auto n1 = static_cast<std::int64_t>(std::floor(t1 / period + kGridEps));
      if (n1 - n0 + 1 >= 2) {
        Track tr;
        tr.person_id = id;
        tr.period = period;
        tr.first_step = n0;
        std::size_t j = seg_begin;
        for (std::int64_t n = n0; n <= n1; ++n) {
          const double t = static_cast<double>(n) * period;
          while (j + 2 < seg_end && raw[j + 1].time < t) ++j;
          TrajectorySample out;
          out.time = t;
          out.person_id = id;
          if (seg_end - seg_begin == 1) {
            out.position = raw[j].position;
          } else {
            const auto & a = raw[j];
            const auto & b = raw[j + 1];
            const double w = std::clamp((t - a.time) / (b.time - a.time), 0.0, 1.0);
            out.position = a.position + w * (b.position - a.position);
          }
          tr.samples.push_back(out);
        }
        detail::recompute_kinematics(tr.samples, period);
        tracks.push_back(std::move(tr));
      }
      seg_begin = seg_end;
    }
  }
  return tracks;
}

/// Splits every track into its maximal runs inside @p roi.
inline std::vector<Track> clip_to_region(std::span<const Track> tracks, const RegionOfInterest & roi)
{
  std::vector<Track> out;
  for (const auto & tr : tracks) {
    std::size_t i = 0;
    while (i < tr.samples.size()) {
      if (!roi.contains(tr.samples[i].position)) {
        ++i;
        continue;
      }
      Track run;
      run.person_id = tr.person_id;
      run.period = tr.period;
      run.first_step = tr.step_of(i);
      while (i < tr.samples.size() && roi.contains(tr.samples[i].position)) run.samples.push_back(tr.samples[i++]);
      out.push_back(std::move(run));
    }
  }
  return out;
}

/// Writes tracks back in ATC line format (integer millimeters and milliseconds).
inline void write_atc_csv(std::ostream & os, std::span<const Track> tracks)
{
  char buf[256];
  for (const auto & tr : tracks) {
    for (const auto & s : tr.samples) {
      std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%lld,0,%lld,%.6f,%.6f\n",
                    static_cast<long long>(std::llround(s.time * 1000.0)), static_cast<long long>(s.person_id),
                    static_cast<long long>(std::llround(s.position.x() * 1000.0)),
                    static_cast<long long>(std::llround(s.position.y() * 1000.0)),
                    static_cast<long long>(std::llround(s.speed * 1000.0)), s.motion_angle, s.motion_angle);
      os << buf;
    }
  }
}

}  // namespace socialzone

#endif  // SOCIALZONE_INGEST_HPP
