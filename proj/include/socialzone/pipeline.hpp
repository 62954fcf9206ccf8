#ifndef SOCIALZONE_PIPELINE_HPP
#define SOCIALZONE_PIPELINE_HPP

/**
 * @file
 * @brief End-to-end zone learning: trajectory files to a ZoneModel.
 *
 * Each input is either an ATC CSV log or a pre-extracted interaction-record dump
 * (recognized by its `# socialzone interaction-records` first line). Logs are
 * processed independently, so person ids only need to be unique within a file.
 */

#include "core.hpp"
#include "ingest.hpp"
#include "interaction.hpp"
#include "log.hpp"
#include "zone_model.hpp"
#include "zonelearn.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace socialzone {

struct PipelineConfig
{
  double period{0.1};
  std::optional<RegionOfInterest> region;  ///< unbounded when absent
  std::vector<ExcludeInterval> exclude;
  ExtractionParams extraction;
  ZoneLearnParams learn;
};

inline constexpr const char * kPipelineFormat = "socialzone.pipeline";

inline PipelineConfig pipeline_config_from_json(const nlohmann::json & j)
{
  try {
    if (j.at("format").get<std::string>() != kPipelineFormat) throw ParseError("pipeline config: wrong format tag");
    if (j.at("version").get<int>() != 1) throw ParseError("pipeline config: unsupported version");
    PipelineConfig c;
    c.period = j.value("period_s", c.period);
    if (!(c.period > 0.0)) throw ParseError("pipeline config: period_s must be positive");
    if (j.contains("region")) {
      const auto & r = j.at("region");
      const auto lo = r.at("min"), hi = r.at("max");
      c.region = RegionOfInterest(Vec2(lo.at(0).get<double>(), lo.at(1).get<double>()),
                                  Vec2(hi.at(0).get<double>(), hi.at(1).get<double>()));
    }
    for (const auto & e : j.value("exclude_ms", nlohmann::json::array())) {
      c.exclude.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    }
    auto & x = c.extraction;
    x.space.width = j.value("attention_width_m", x.space.width);
    x.space.depth = j.value("attention_depth_m", x.space.depth);
    x.window = j.value("window_s", x.window);
    x.min_init_dist = j.value("min_initial_distance_m", x.min_init_dist);
    x.min_speed = j.value("min_speed_m_s", x.min_speed);
    auto & l = c.learn;
    l.r_max = j.value("r_max_m", l.r_max);
    l.k = j.value("lof_k", l.k);
    l.fraction = j.value("outlier_fraction", l.fraction);
    l.speed_scale = j.value("speed_scale_m_per_m_s", l.speed_scale);
    l.speeds = j.value("speeds_m_s", l.speeds);
    l.boundary_rays = j.value("boundary_rays", l.boundary_rays);
    l.support_gap = j.value("support_gap_rad", l.support_gap);
    return c;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("pipeline config schema: ") + e.what());
  } catch (const ConfigError & e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
}

inline PipelineConfig read_pipeline_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pipeline config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw ParseError("pipeline config " + path.string() + " is not valid JSON: " + e.what());
  }
  return pipeline_config_from_json(j);
}

/// Counts after each filter stage; parsed >= in_region >= interactions >= inliers
/// whenever the logs are sampled at least as fast as the resampling period.
struct StageCounts
{
  std::size_t lines_read{0};
  std::size_t parsed{0};
  std::size_t malformed{0};
  std::size_t after_exclusion{0};
  std::size_t in_region{0};
  std::size_t tracks{0};
  std::size_t interactions{0};
  std::size_t inliers{0};
  std::size_t outliers{0};
};

struct PipelineResult
{
  ZoneLearnResult learned;
  StageCounts counts;
  std::vector<std::string> warnings;
  std::vector<InteractionRecord> records;
};

namespace detail {

struct FileHarvest
{
  StageCounts counts;
  std::vector<InteractionRecord> records;
  bool is_records{false};
};

inline FileHarvest harvest_stream(std::istream & in, const PipelineConfig & cfg, bool strict)
{
  FileHarvest out;
  if (in.peek() == '#') {
    std::string first;
    std::getline(in, first);
    if (first.starts_with("# socialzone interaction-records")) {
      out.is_records = true;
      out.records = read_records_csv(in);
      out.counts.interactions = out.records.size();
      return out;
    }
  }
  ParseReport report;
  auto samples = parse_atc_csv(in, report, strict);
  out.counts.lines_read = report.lines_read;
  out.counts.parsed = samples.size();
  out.counts.malformed = report.issues.size();
  samples = drop_excluded(std::move(samples), cfg.exclude);
  out.counts.after_exclusion = samples.size();

  const double inf = std::numeric_limits<double>::infinity();
  const RegionOfInterest roi = cfg.region.value_or(RegionOfInterest(Vec2(-inf, -inf), Vec2(inf, inf)));
  for (const auto & s : samples) out.counts.in_region += roi.contains(s.position) ? 1 : 0;

  auto tracks = build_tracks(samples, cfg.period);
  if (cfg.region) tracks = clip_to_region(tracks, *cfg.region);
  out.counts.tracks = tracks.size();
  out.records = extract_interactions(tracks, roi, cfg.extraction);
  out.counts.interactions = out.records.size();
  return out;
}

inline void accumulate(StageCounts & total, const StageCounts & c)
{
  total.lines_read += c.lines_read;
  total.parsed += c.parsed;
  total.malformed += c.malformed;
  total.after_exclusion += c.after_exclusion;
  total.in_region += c.in_region;
  total.tracks += c.tracks;
  total.interactions += c.interactions;
}

}  // namespace detail

/**
 * @brief Runs the whole pipeline over @p inputs.
 *
 * Throws ParseError for unreadable or malformed (strict) inputs and Error("no
 * tracks") when nothing usable was found. A model missing some speeds is returned
 * with warnings; a model missing all speeds raises DegenerateInputError.
 */
inline PipelineResult run_pipeline(const std::vector<std::filesystem::path> & inputs, const PipelineConfig & cfg,
                                   bool strict = false, bool parallel = false)
{
  auto one = [&](const std::filesystem::path & p) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    return detail::harvest_stream(in, cfg, strict);
  };
  std::vector<detail::FileHarvest> parts;
  if (parallel && inputs.size() > 1) {
    std::vector<std::future<detail::FileHarvest>> jobs;
    for (const auto & p : inputs) jobs.push_back(std::async(std::launch::async, one, p));
    for (auto & j : jobs) parts.push_back(j.get());
  } else {
    for (const auto & p : inputs) parts.push_back(one(p));
  }

  PipelineResult res;
  bool any_records_file = false;
  for (auto & part : parts) {
    detail::accumulate(res.counts, part.counts);
    any_records_file = any_records_file || part.is_records;
    res.records.insert(res.records.end(), part.records.begin(), part.records.end());
  }
  if (res.counts.tracks == 0 && !any_records_file) throw Error("no tracks in input");
  if (res.records.empty()) throw Error("no interactions found; nothing to learn from");

  res.learned = build_zone_model(res.records, cfg.learn);
  res.counts.inliers = res.learned.inliers;
  res.counts.outliers = res.learned.outliers;
  res.warnings = res.learned.warnings;
  if (res.learned.model.empty()) throw DegenerateInputError("no zone could be fitted at any requested speed");
  return res;
}

inline nlohmann::json report_json(const PipelineResult & r)
{
  const auto & c = r.counts;
  return {{"format", "socialzone.learn_report"},
          {"version", 1},
          {"stages",
           {{"lines_read", c.lines_read},
            {"parsed", c.parsed},
            {"malformed", c.malformed},
            {"after_exclusion", c.after_exclusion},
            {"in_region", c.in_region},
            {"tracks", c.tracks},
            {"interactions", c.interactions},
            {"inliers", c.inliers},
            {"outliers", c.outliers}}},
          {"hull_vertices", r.learned.hull_vertices},
          {"speeds_fitted", r.learned.model.speeds},
          {"warnings", r.warnings}};
}

}  // namespace socialzone

#endif  // SOCIALZONE_PIPELINE_HPP
