// Closed-form reference solutions: the three cardioid evolutions, the Sakai
// two-sheeted example and the growing disk. Used as oracles and scenario seeds.
#pragma once

#include <string>

#include "pgflow/dynamics.hpp"

namespace pgflow {

enum class Scenario {
  CardioidUnivalent,
  CardioidPG,
  CardioidLK,
  Sakai,
  GrowingDisk,
};

struct ScenarioTag {
  Scenario name = Scenario::CardioidUnivalent;
  double a = 1.0;  // scale parameter for Sakai / GrowingDisk
};

ScenarioTag scenario_from_string(const std::string& s, double a = 1.0);
std::string scenario_to_string(const ScenarioTag& tag);

struct LKCoefficients {
  double zeta1, b1, b2, b3, Q, q;
};

// Exact coefficient trajectory of the cardioid continued past the cusp,
// parametrized so b1 = e^t.
LKCoefficients reference_coefficients_lk(double t);

// Closed-form state and source strength at time t.
std::pair<PGState, double> reference_state(const ScenarioTag& tag, double t);

// q(t) for the scenario, usable as a QSchedule.
double reference_q(const ScenarioTag& tag, double t);

// Accumulated source Q(t) (from the start of the scenario's history).
double reference_Q(const ScenarioTag& tag, double t);

}  // namespace pgflow
