// Scenario runner: parse configs, drive trajectories and balayage runs,
// emit CSV/JSON artifacts and pass/fail reports.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pgflow/io.hpp"
#include "pgflow/observables.hpp"
#include "pgflow/reference.hpp"

namespace pgflow {

struct CheckResult {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct RunReport {
  std::vector<CheckResult> checks;
  nlohmann::json events = nlohmann::json::array();
  double elapsed_seconds = 0.0;
  bool q_went_negative = false;
  std::string error;  // non-empty when the run aborted
  nlohmann::json config_echo;

  bool pass() const;
  nlohmann::json to_json() const;  // versioned, "schema": 1
  void add(const std::string& name, double expected, double actual, double tol);
  void add_flag(const std::string& name, bool ok);
};

// Resolves the output directory: PGFLOW_OUT env var, else [output] dir, else ".".
std::string resolve_out_dir(const ConfigFile& cfg);

RunReport run_simulate(const ConfigFile& cfg, const std::string& out_dir);
RunReport run_balayage(const ConfigFile& cfg, const std::string& out_dir);

}  // namespace pgflow
