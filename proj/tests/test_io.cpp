#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgflow/run.hpp"

using namespace pgflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pgflow_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("value formatting is deterministic and lossless") {
  for (double v : {1.0 / 3.0, -2.5e-17, 3.14159265358979, 0.0, 1e300}) {
    std::string s = format_value(v);
    CHECK(format_value(v) == s);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("grid field round trip") {
  TempDir tmp;
  Grid g;
  g.x0 = -1.25;
  g.y0 = 0.5;
  g.h = 0.125;
  g.nx = 5;
  g.ny = 3;
  GridField f = GridField::zeros(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f.values(i, j) = std::sin(i + 10.0 * j);
  std::string p = (tmp.path / "field.dat").string();
  write_gridfield(f, p);
  GridField r = read_gridfield(p);
  CHECK(r.grid.same_as(g));
  CHECK((r.values - f.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("rational map json round trip") {
  RationalMap g;
  g.lead = {-2.5, 0.125};
  g.zeros = {{{1.0, 0.5}, 1}, {{-3.0, 0.0}, 2}};
  g.poles = {{{2.0, -1.0}, 2}};
  nlohmann::json j = rational_map_to_json(g);
  RationalMap r = rational_map_from_json(j);
  CHECK(r.lead == g.lead);
  REQUIRE(r.zeros.size() == 2);
  CHECK(r.zeros[1].mult == 2);
  CHECK(r.zeros[0].location == g.zeros[0].location);
  REQUIRE(r.poles.size() == 1);
  CHECK(r.poles[0].location == g.poles[0].location);
  CHECK(r.poles[0].mult == 2);
}

TEST_CASE("config parsing") {
  ConfigFile cfg = ConfigFile::parse_text(
      "# comment\n"
      "[run]\n"
      "t0 = 0.5   # trailing comment\n"
      "dt=1e-3\n"
      "\n"
      "[scenario]\n"
      "name = sakai\n");
  CHECK(cfg.get_double("run", "t0", 0.0) == 0.5);
  CHECK(cfg.get_double("run", "dt", 0.0) == 1e-3);
  CHECK(cfg.get("scenario", "name") == "sakai");
  CHECK(cfg.get("scenario", "missing", "dflt") == "dflt");
  CHECK_THROWS_AS(cfg.require("scenario", "missing"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_text("[run]\nbadline\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("report json and pass logic") {
  RunReport rep;
  rep.add("alpha", 1.0, 1.0 + 1e-9, 1e-6);
  rep.add_flag("beta", true);
  CHECK(rep.pass());
  nlohmann::json j = rep.to_json();
  CHECK(j["schema"] == 1);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "alpha");
  CHECK(j["checks"][0]["pass"] == true);
  rep.add("gamma", 1.0, 2.0, 1e-6);
  CHECK(!rep.pass());
  CHECK(rep.to_json()["checks"][2]["pass"] == false);
}

TEST_CASE("simulate run writes deterministic artifacts") {
  TempDir tmp;
  ConfigFile cfg = ConfigFile::parse_text(
      "[run]\n"
      "t0 = 0.1\n"
      "t1 = 0.2\n"
      "dt = 1e-3\n"
      "stride = 10\n"
      "moments = 3\n"
      "[scenario]\n"
      "name = cardioid-univalent\n"
      "[output]\n"
      "trajectory = trajectory.csv\n"
      "observables = observables.csv\n"
      "report = report.json\n");
  RunReport rep = run_simulate(cfg, tmp.path.string());
  CHECK(rep.error.empty());
  CHECK(rep.pass());
  fs::path traj = tmp.path / "trajectory.csv";
  fs::path obs = tmp.path / "observables.csv";
  fs::path report = tmp.path / "report.json";
  REQUIRE(fs::exists(traj));
  REQUIRE(fs::exists(obs));
  REQUIRE(fs::exists(report));

  std::string t1 = slurp(traj), o1 = slurp(obs);
  // Header plus 0.1/1e-3/stride 10 = 10 interior rows plus both endpoints.
  std::istringstream lines(t1);
  std::string line;
  int n = 0;
  std::string header;
  while (std::getline(lines, line))
    if (n++ == 0) header = line;
  CHECK(n == 12);
  CHECK(header.rfind("t,Q,b_re,b_im", 0) == 0);

  nlohmann::json j = nlohmann::json::parse(slurp(report));
  CHECK(j["schema"] == 1);

  RunReport rep2 = run_simulate(cfg, tmp.path.string());
  CHECK(slurp(traj) == t1);
  CHECK(slurp(obs) == o1);
}

TEST_CASE("bad simulate config rejected before output") {
  TempDir tmp;
  ConfigFile cfg = ConfigFile::parse_text(
      "[run]\n"
      "t0 = 0.2\n"
      "t1 = 0.1\n"
      "dt = 1e-3\n"
      "[scenario]\n"
      "name = cardioid-univalent\n");
  CHECK_THROWS_AS(run_simulate(cfg, tmp.path.string()), ConfigError);
  CHECK(!fs::exists(tmp.path / "trajectory.csv"));
  CHECK(!fs::exists(tmp.path / "report.json"));
}

TEST_CASE("balayage run writes fields and report") {
  TempDir tmp;
  ConfigFile cfg = ConfigFile::parse_text(
      "[balayage]\n"
      "op = point-source\n"
      "Q = 0.5\n"
      "[grid]\n"
      "x0 = -2.01\n"
      "y0 = -2.01\n"
      "h = 0.02\n"
      "nx = 201\n"
      "ny = 201\n"
      "[output]\n"
      "mask = mask.dat\n");
  RunReport rep = run_balayage(cfg, tmp.path.string());
  CHECK(rep.error.empty());
  CHECK(rep.pass());
  REQUIRE(fs::exists(tmp.path / "report.json"));
  REQUIRE(fs::exists(tmp.path / "mask.dat"));
  GridField mask = read_gridfield((tmp.path / "mask.dat").string());
  CHECK(std::abs(mask.mass() - M_PI) < 0.05 * M_PI);
}
