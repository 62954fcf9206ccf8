#ifndef SOCIALZONE_INTERACTION_HPP
#define SOCIALZONE_INTERACTION_HPP

/**
 * @file
 * @brief Two-person encounter harvesting.
 *
 * For each reference walker we look at a heading-aligned rectangle ahead of them
 * (the attentional space). Windows in which exactly one other walker stays inside
 * that rectangle are turned into per-step (line-of-sight angle, distance, speed)
 * records.
 */

#include "core.hpp"
#include "ingest.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace socialzone {

/// Heading-aligned rectangle: `depth` ahead of the walker, `width / 2` to each side.
struct AttentionalSpace
{
  double width{4.0};
  double depth{5.0};

  /// Corners in world frame for a walker at @p pos heading @p angle.
  std::array<Vec2, 4> corners(const Vec2 & pos, double angle) const
  {
    const Vec2 fwd(std::cos(angle), std::sin(angle));
    const Vec2 left(-fwd.y(), fwd.x());
    const double h = 0.5 * width;
    return {pos + h * left, pos - h * left, pos + depth * fwd - h * left, pos + depth * fwd + h * left};
  }

  bool contains(const Vec2 & pos, double angle, const Vec2 & p) const
  {
    const Vec2 rel = rotate(p - pos, -angle);
    return rel.x() >= 0.0 && rel.x() <= depth && std::abs(rel.y()) <= 0.5 * width;
  }
};

struct InteractionRecord
{
  double los_angle{0.0};  ///< bearing of the other walker in the reference's heading frame
  double distance{0.0};   ///< meters
  double ref_speed{0.0};  ///< m/s
};

struct LineOfSight
{
  double los_angle{0.0};
  double distance{0.0};
  bool coincident{false};  ///< positions identical; angle set to 0
};

/// Bearing and range of @p other as seen by @p ref.
inline LineOfSight los_of(const TrajectorySample & ref, const TrajectorySample & other)
{
  const Vec2 d = other.position - ref.position;
  const double dist = d.norm();
  if (dist == 0.0) return {0.0, 0.0, true};
  const Vec2 rel = rotate(d, -ref.motion_angle);
  return {normalize_angle(std::atan2(rel.y(), rel.x())), dist, false};
}

struct ExtractionParams
{
  AttentionalSpace space{};
  double window{3.0};         ///< seconds the encounter must last
  double min_init_dist{1.0};  ///< meters, at window start
  double min_speed{0.4};      ///< m/s, reference walker at every step
};

/**
 * @brief Harvest encounter records from tracks on a shared time grid.
 *
 * A window is a maximal run of consecutive steps of one reference track where the
 * attentional space lies inside @p roi, the reference moves at least min_speed and
 * exactly one other person (the same one throughout) is inside the attentional
 * space. Windows lasting at least `window` seconds whose initial separation is at
 * least min_init_dist emit one record per step.
 */
inline std::vector<InteractionRecord> extract_interactions(std::span<const Track> tracks,
                                                           const RegionOfInterest & roi,
                                                           const ExtractionParams & params = {})
{
  std::vector<InteractionRecord> out;
  if (tracks.empty()) return out;
  const double period = tracks.front().period;

  struct Ref
  {
    std::size_t track;
    std::size_t sample;
  };
  std::unordered_map<std::int64_t, std::vector<Ref>> at_step;
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    for (std::size_t si = 0; si < tracks[ti].samples.size(); ++si) at_step[tracks[ti].step_of(si)].push_back({ti, si});
  }

  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    const Track & ref = tracks[ti];
    const std::size_t n = ref.samples.size();

    // Per step: the sample of the single other walker inside the space, if the
    // step qualifies at all.
    std::vector<std::optional<TrajectorySample>> partner(n);
    for (std::size_t si = 0; si < n; ++si) {
      const auto & s = ref.samples[si];
      if (s.speed < params.min_speed) continue;
      const auto corners = params.space.corners(s.position, s.motion_angle);
      if (!std::ranges::all_of(corners, [&](const Vec2 & c) { return roi.contains(c); })) continue;
      const TrajectorySample * found = nullptr;
      int count = 0;
      for (const Ref & r : at_step[ref.step_of(si)]) {
        const auto & o = tracks[r.track].samples[r.sample];
        if (o.person_id == ref.person_id) continue;
        if (params.space.contains(s.position, s.motion_angle, o.position)) {
          ++count;
          found = &o;
        }
      }
      if (count == 1) partner[si] = *found;
    }

    std::size_t i = 0;
    while (i < n) {
      if (!partner[i]) {
        ++i;
        continue;
      }
      const std::int64_t other_id = partner[i]->person_id;
      std::size_t j = i;
      while (j < n && partner[j] && partner[j]->person_id == other_id) ++j;
      const double duration = static_cast<double>(j - i - 1) * period;
      const double init_dist = (partner[i]->position - ref.samples[i].position).norm();
      if (duration >= params.window - 1e-9 && init_dist >= params.min_init_dist) {
        for (std::size_t k = i; k < j; ++k) {
          const auto los = los_of(ref.samples[k], *partner[k]);
          if (los.coincident) continue;
          out.push_back({los.los_angle, los.distance, ref.samples[k].speed});
        }
      }
      i = j;
    }
  }
  return out;
}

/// Record dump: a version comment, a header, then `los_angle_rad,distance_m,ref_speed_m_s` rows.
inline void write_records_csv(std::ostream & os, std::span<const InteractionRecord> records)
{
  os << "# socialzone interaction-records v1\n";
  os << "los_angle_rad,distance_m,ref_speed_m_s\n";
  char buf[128];
  for (const auto & r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.los_angle, r.distance, r.ref_speed);
    os << buf;
  }
}

inline std::vector<InteractionRecord> read_records_csv(std::istream & in)
{
  std::vector<InteractionRecord> out;
  std::string buf;
  std::size_t lineno = 0;
  while (std::getline(in, buf)) {
    ++lineno;
    const auto line = detail::trim(buf);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("los_angle_rad")) continue;
    const auto f = detail::split(line, ',');
    InteractionRecord r;
    if (f.size() != 3 || !detail::parse_double(f[0], r.los_angle) || !detail::parse_double(f[1], r.distance) ||
        !detail::parse_double(f[2], r.ref_speed) || r.distance < 0.0 || r.ref_speed < 0.0) {
      throw ParseError("records line " + std::to_string(lineno) + ": expected los_angle_rad,distance_m,ref_speed_m_s");
    }
    r.los_angle = normalize_angle(r.los_angle);
    out.push_back(r);
  }
  return out;
}

}  // namespace socialzone

#endif  // SOCIALZONE_INTERACTION_HPP
