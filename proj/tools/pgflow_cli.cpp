// Command-line runner: simulate/balayage scenario drivers and the
// verification suite.
#include <cstdio>

#include <CLI11.hpp>

#include "pgflow/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hele-Shaw rational-map dynamics and partial balayage"};
  app.require_subcommand(1);

  std::string config_path, filter;
  auto* sim = app.add_subcommand("simulate", "integrate a trajectory");
  sim->add_option("config", config_path, "config file")->required();
  auto* bala = app.add_subcommand("balayage", "run a balayage operation");
  bala->add_option("config", config_path, "config file")->required();
  auto* ver = app.add_subcommand("verify", "run the verification suite");
  ver->add_option("--filter", filter, "only checks whose name contains this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    pgflow::RunReport rep;
    if (app.got_subcommand(sim) || app.got_subcommand(bala)) {
      pgflow::ConfigFile cfg = pgflow::ConfigFile::parse_file(config_path);
      std::string out_dir = pgflow::resolve_out_dir(cfg);
      rep = app.got_subcommand(sim) ? pgflow::run_simulate(cfg, out_dir)
                                    : pgflow::run_balayage(cfg, out_dir);
      for (const auto& c : rep.checks)
        std::printf("%s %s actual=%.12g expected=%.12g tol=%.3g\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.actual,
                    c.expected, c.tol);
      if (!rep.error.empty()) std::printf("ERROR %s\n", rep.error.c_str());
    } else {
      rep = pgflow::run_verify(filter);
      for (const auto& line : pgflow::verify_summary_lines(rep))
        std::printf("%s\n", line.c_str());
    }
    return rep.pass() ? 0 : 1;
  } catch (const pgflow::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
