#ifndef SOCIALZONE_ZONE_MODEL_HPP
#define SOCIALZONE_ZONE_MODEL_HPP

// Speed-indexed social zones and their JSON file format (socialzone.zone_model v1).

#include "core.hpp"
#include "geometry.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace socialzone {

/// Ellipse in a pedestrian's body frame (x forward, y to the left).
struct SocialZone
{
  Vec2 center{Vec2::Zero()};
  double a{1.0};
  double b{1.0};
  double theta{0.0};

  Ellipse to_ellipse() const { return Ellipse(center, a, b, theta); }
  static SocialZone from_ellipse(const Ellipse & e) { return {e.center(), e.a(), e.b(), e.theta()}; }
};

struct ZoneProvenance
{
  std::size_t record_count{0};
  std::size_t k{20};
  double fraction{0.002};
  double r_max{2.0};
  std::string source;  ///< free text, e.g. "learned" or "reconstructed"
};

struct ZoneModel
{
  std::vector<double> speeds;  ///< strictly ascending, m/s
  std::vector<SocialZone> zones;
  ZoneProvenance provenance;

  bool empty() const { return zones.empty(); }

  void validate() const
  {
    if (speeds.size() != zones.size()) throw ParseError("zone model: speeds and zones differ in length");
    for (std::size_t i = 1; i < speeds.size(); ++i) {
      if (!(speeds[i] > speeds[i - 1])) throw ParseError("zone model: speeds must be strictly ascending");
    }
    for (const auto & z : zones) {
      if (!(z.b > 0.0) || !(z.a >= z.b)) throw ParseError("zone model: each zone needs a >= b > 0");
    }
  }
};

inline constexpr const char * kZoneModelFormat = "socialzone.zone_model";
inline constexpr int kZoneModelVersion = 1;

inline nlohmann::json to_json(const ZoneModel & m)
{
  nlohmann::json zones = nlohmann::json::array();
  for (std::size_t i = 0; i < m.zones.size(); ++i) {
    const auto & z = m.zones[i];
    zones.push_back({{"speed_m_s", m.speeds[i]},
                     {"center", {z.center.x(), z.center.y()}},
                     {"a", z.a},
                     {"b", z.b},
                     {"theta_rad", z.theta}});
  }
  return {{"format", kZoneModelFormat},
          {"version", kZoneModelVersion},
          {"frame", "body: x forward, y left, meters"},
          {"zones", zones},
          {"provenance",
           {{"record_count", m.provenance.record_count},
            {"k", m.provenance.k},
            {"fraction", m.provenance.fraction},
            {"r_max", m.provenance.r_max},
            {"source", m.provenance.source}}}};
}

inline ZoneModel zone_model_from_json(const nlohmann::json & j)
{
  try {
    if (j.at("format").get<std::string>() != kZoneModelFormat) throw ParseError("zone model: wrong format tag");
    if (j.at("version").get<int>() != kZoneModelVersion) throw ParseError("zone model: unsupported version");
    ZoneModel m;
    for (const auto & z : j.at("zones")) {
      const auto & c = z.at("center");
      if (!c.is_array() || c.size() != 2) throw ParseError("zone model: center must be [x, y]");
      m.speeds.push_back(z.at("speed_m_s").get<double>());
      m.zones.push_back({Vec2(c[0].get<double>(), c[1].get<double>()), z.at("a").get<double>(), z.at("b").get<double>(),
                         z.at("theta_rad").get<double>()});
    }
    if (j.contains("provenance")) {
      const auto & p = j.at("provenance");
      m.provenance.record_count = p.value("record_count", std::size_t{0});
      m.provenance.k = p.value("k", std::size_t{20});
      m.provenance.fraction = p.value("fraction", 0.002);
      m.provenance.r_max = p.value("r_max", 2.0);
      m.provenance.source = p.value("source", std::string{});
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("zone model schema: ") + e.what());
  }
}

inline ZoneModel read_zone_model(std::istream & in)
{
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("zone model is not valid JSON: ") + e.what());
  }
  return zone_model_from_json(j);
}

inline ZoneModel read_zone_model(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open zone model " + path);
  return read_zone_model(in);
}

inline void write_zone_model(std::ostream & os, const ZoneModel & m) { os << to_json(m).dump(2) << '\n'; }

}  // namespace socialzone

#endif  // SOCIALZONE_ZONE_MODEL_HPP
