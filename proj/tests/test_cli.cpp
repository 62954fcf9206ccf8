#include <socialzone/cli.hpp>
#include <socialzone/pipeline.hpp>
#include <socialzone/plots.hpp>

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace socialzone;
namespace fs = std::filesystem;

namespace {

struct Run
{
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "socialzone");
  std::vector<const char *> argv;
  for (const auto & a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("socialzone_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string & name) const { return (dir / name).string(); }

  fs::path dir;
};

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> data_lines(const fs::path & p)
{
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(in, l)) {
    if (!l.empty() && l[0] != '#') lines.push_back(l);
  }
  return lines;  // header row first
}

}  // namespace

using Cli = TempDir;

TEST_F(Cli, ListPrintsBuiltins)
{
  const auto r = cli({"simulate", "--list"});
  EXPECT_EQ(r.code, 0);
  for (const char * n : {"s1", "s2", "s3a", "s3b"}) EXPECT_NE(r.out.find(n), std::string::npos);
}

TEST_F(Cli, SimulateS1WritesOutputs)
{
  const auto r = cli({"simulate", "s1", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "s1.simlog.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "s1.summary.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "s1_plots" / "trajectory.csv"));
}

TEST_F(Cli, SimulateIsIdempotent)
{
  ASSERT_EQ(cli({"simulate", "s2", "--out", path("a")}).code, 0);
  ASSERT_EQ(cli({"simulate", "s2", "--out", path("b")}).code, 0);
  for (const char * f : {"s2.simlog.csv", "s2.summary.json"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f));
  EXPECT_EQ(slurp(dir / "a" / "s2_plots" / "h_series.csv"), slurp(dir / "b" / "s2_plots" / "h_series.csv"));
}

TEST_F(Cli, SimulateParallelMatchesSequential)
{
  ASSERT_EQ(cli({"simulate", "all", "--out", path("seq")}).code, 0);
  ASSERT_EQ(cli({"simulate", "--parallel", "--out", path("par")}).code, 0);
  for (const char * n : {"s1", "s2", "s3a", "s3b"}) {
    EXPECT_EQ(slurp(dir / "seq" / (std::string(n) + ".simlog.csv")), slurp(dir / "par" / (std::string(n) + ".simlog.csv")));
  }
}

TEST_F(Cli, CorruptZoneModelIsInputError)
{
  std::ofstream(path("bad.json")) << "{\"format\": \"socialzone.zone_model\", \"version\": 1, \"zones\": [{\"a\": 1}]}";
  const auto r = cli({"simulate", "s1", "--zones", path("bad.json"), "--out", path("out")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("zone"), std::string::npos);
}

TEST_F(Cli, UnknownScenarioIsInputError)
{
  EXPECT_EQ(cli({"simulate", "s9", "--out", path("out")}).code, 1);
}

TEST_F(Cli, TimeoutAndSafetyExitCodes)
{
  auto slow = *find_builtin("s1");
  slow.name = "short";
  slow.duration = 1.0;
  slow.zone_file.reset();
  slow.zone_inline = reconstructed_zone_model();
  std::ofstream(path("short.json")) << to_json(slow).dump(2);
  EXPECT_EQ(cli({"simulate", path("short.json"), "--out", path("out")}).code, 3);

  ScenarioConfig crash;
  crash.name = "overwhelmed";
  crash.goal = Vec2(0, 5);
  crash.mpc.u_max = 0.1;
  crash.duration = 5;
  crash.humans.push_back({Vec2(4, 0), Vec2(-3, 0), kPi});
  crash.zone_inline = reconstructed_zone_model();
  std::ofstream(path("crash.json")) << to_json(crash).dump(2);
  EXPECT_EQ(cli({"simulate", path("crash.json"), "--out", path("out")}).code, 2);
}

TEST_F(Cli, LearnEmptyInputFails)
{
  std::ofstream(path("empty.csv")).flush();
  const auto r = cli({"learn", path("empty.csv"), "--out", path("zones.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no tracks"), std::string::npos);
}

TEST_F(Cli, LearnMissingInputFails)
{
  EXPECT_EQ(cli({"learn", path("nope.csv"), "--out", path("zones.json")}).code, 1);
}

TEST_F(Cli, LearnSyntheticRecordsRecoversCircle)
{
  {
    std::ofstream os(path("records.csv"));
    write_records_csv(os, synth::records(20000, synth::circle_06, 31));
  }
  const auto r = cli({"learn", path("records.csv"), "--out", path("zones.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_zone_model(path("zones.json"));
  ASSERT_EQ(m.zones.size(), 7u);
  for (const auto & z : m.zones) {
    const Ellipse e = z.to_ellipse();
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(e.boundary_point(2 * kPi * i / 64).norm(), 0.6, 0.02);
  }
  EXPECT_TRUE(fs::exists(dir / "zones.report.json"));
}

TEST_F(Cli, LearnTrajectoryLogReportsMonotoneStages)
{
  {
    std::ofstream os(path("log.csv"));
    write_atc_csv(os, synth::passing_pairs(120, 0.6, 32));
  }
  const auto r = cli({"learn", path("log.csv"), "--out", path("zones.json"), "--parallel"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "zones.report.json");
  const auto rep = nlohmann::json::parse(in);
  const auto & s = rep.at("stages");
  const std::size_t chain[] = {s["lines_read"], s["parsed"], s["after_exclusion"], s["in_region"], s["interactions"],
                               s["inliers"]};
  for (std::size_t i = 1; i < std::size(chain); ++i) EXPECT_LE(chain[i], chain[i - 1]) << i;
  EXPECT_GT(s["interactions"].get<std::size_t>(), 0u);
  // passing lanes are at least 0.6 m apart, so no fitted zone can be smaller
  for (const auto & z : read_zone_model(path("zones.json")).zones) EXPECT_GE(z.b, 0.6 - 0.02);
}

TEST_F(Cli, LearnConfigOverrides)
{
  std::ofstream(path("cfg.json")) << R"({"format": "socialzone.pipeline", "version": 1, "period_s": 0.2,
    "region": {"min": [-100, -100], "max": [100, 100]}, "window_s": 2.0})";
  const auto cfg = read_pipeline_config(path("cfg.json"));
  EXPECT_DOUBLE_EQ(cfg.period, 0.2);
  EXPECT_DOUBLE_EQ(cfg.extraction.window, 2.0);
  ASSERT_TRUE(cfg.region.has_value());
  std::ofstream(path("bad.json")) << R"({"format": "socialzone.pipeline", "version": 2})";
  EXPECT_THROW(read_pipeline_config(path("bad.json")), ParseError);
}

TEST_F(Cli, ExportZonePlots)
{
  ZoneModel m;
  m.speeds = {0.5, 1.0, 1.5};
  m.zones = {{Vec2(0.1, 0), 0.6, 0.5, 0.0}, {Vec2(0.2, 0), 0.8, 0.55, 0.1}, {Vec2(0.3, 0), 1.0, 0.6, -0.2}};
  {
    std::ofstream os(path("zones.json"));
    write_zone_model(os, m);
  }
  ASSERT_EQ(cli({"export-plots", path("zones.json"), "--out", path("plots")}).code, 0);
  std::size_t files = 0;
  for (const auto & e : fs::directory_iterator(dir / "plots")) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto lines = data_lines(dir / "plots" / ("zone_" + speed_tag(m.speeds[i]) + ".csv"));
    ASSERT_EQ(lines.size(), 129u);
    const Ellipse e = m.zones[i].to_ellipse();
    for (std::size_t k = 1; k < lines.size(); ++k) {
      double x = 0, y = 0;
      ASSERT_EQ(std::sscanf(lines[k].c_str(), "%lf,%lf", &x, &y), 2);
      EXPECT_LE(std::abs(e.implicit_residual(Vec2(x, y))), 1e-9);
    }
  }
}

TEST_F(Cli, ExportSimlogPlots)
{
  auto c = *find_builtin("s1");
  c.walls.emplace_back(Vec2(-2, 3), Vec2(10, 3));
  std::stringstream ss;
  write_simlog_csv(ss, run_scenario(c, reconstructed_zone_model()));
  std::ofstream(path("two.simlog.csv")) << ss.str();
  ASSERT_EQ(cli({"export-plots", path("two.simlog.csv"), "--out", path("plots")}).code, 0);
  const auto lines = data_lines(dir / "plots" / "h_series.csv");
  EXPECT_EQ(lines.front(), "t,h_human_0,h_wall_0");
}

TEST_F(Cli, ExportGarbageFails)
{
  std::ofstream(path("junk.csv")) << "not,a,simlog\n1,2\n";
  EXPECT_EQ(cli({"export-plots", path("junk.csv"), "--out", path("plots")}).code, 1);
}

TEST(PlotBundle, ValidationCatchesBadSeries)
{
  PlotBundle b;
  b.series.push_back({"ragged", {"a", "b"}, {{1.0, 2.0}, {3.0}}});
  EXPECT_THROW(b.validate(), Error);
  b.series[0] = {"nan", {"a"}, {{std::nan("")}}};
  EXPECT_THROW(b.validate(), Error);
}

TEST(CliParse, NoSubcommandIsUsageError)
{
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
