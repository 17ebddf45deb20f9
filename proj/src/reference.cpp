#include "pgflow/reference.hpp"

#include <cmath>

namespace pgflow {

ScenarioTag scenario_from_string(const std::string& s, double a) {
  ScenarioTag tag;
  tag.a = a;
  if (s == "cardioid-univalent")
    tag.name = Scenario::CardioidUnivalent;
  else if (s == "cardioid-pg")
    tag.name = Scenario::CardioidPG;
  else if (s == "cardioid-lk")
    tag.name = Scenario::CardioidLK;
  else if (s == "sakai")
    tag.name = Scenario::Sakai;
  else if (s == "growing-disk")
    tag.name = Scenario::GrowingDisk;
  else
    throw ConfigError("unknown scenario: " + s);
  return tag;
}

std::string scenario_to_string(const ScenarioTag& tag) {
  switch (tag.name) {
    case Scenario::CardioidUnivalent: return "cardioid-univalent";
    case Scenario::CardioidPG: return "cardioid-pg";
    case Scenario::CardioidLK: return "cardioid-lk";
    case Scenario::Sakai: return "sakai";
    case Scenario::GrowingDisk: return "growing-disk";
  }
  return "?";
}

LKCoefficients reference_coefficients_lk(double t) {
  double et = std::exp(t);
  LKCoefficients c;
  c.b1 = et;
  c.zeta1 = std::sqrt(0.5 * (1.0 + 2.0 * et - std::exp(-2.0 * t)));
  c.b2 = -0.25 * c.zeta1 * (1.0 + 2.0 * et + 3.0 * std::exp(-2.0 * t));
  c.b3 = 0.25 * (2.0 * std::exp(-t) + std::exp(-2.0 * t) - std::exp(-4.0 * t));
  c.Q = (4.0 * std::exp(2.0 * t) + 2.0 * et - 12.0 + std::exp(-2.0 * t) +
         6.0 * std::exp(-3.0 * t) + 2.0 * std::exp(-4.0 * t) -
         3.0 * std::exp(-6.0 * t)) /
        16.0;
  c.q = (4.0 * std::exp(2.0 * t) + et - std::exp(-2.0 * t) -
         9.0 * std::exp(-3.0 * t) - 4.0 * std::exp(-4.0 * t) +
         9.0 * std::exp(-6.0 * t)) /
        8.0;
  return c;
}

double reference_q(const ScenarioTag& tag, double t) {
  double a = tag.a;
  switch (tag.name) {
    case Scenario::CardioidUnivalent:
      return std::exp(2.0 * t) - std::exp(-4.0 * t);
    case Scenario::CardioidPG:
      return std::exp(4.0 * t) - std::exp(-2.0 * t);
    case Scenario::CardioidLK:
      return reference_coefficients_lk(t).q;
    case Scenario::Sakai:
      return a * a * t * (4.0 * t * t - 1.0);
    case Scenario::GrowingDisk:
      return a * a * t;
  }
  return 0.0;
}

double reference_Q(const ScenarioTag& tag, double t) {
  double a = tag.a;
  switch (tag.name) {
    case Scenario::CardioidUnivalent:
      return 0.5 * (std::exp(2.0 * t) - 1.0) + 0.25 * (std::exp(-4.0 * t) - 1.0);
    case Scenario::CardioidPG:
      return 0.25 * (std::exp(4.0 * t) - 1.0) + 0.5 * (std::exp(-2.0 * t) - 1.0);
    case Scenario::CardioidLK:
      return reference_coefficients_lk(t).Q;
    case Scenario::Sakai:
      return a * a * (t * t * t * t - 0.5 * t * t);
    case Scenario::GrowingDisk:
      return 0.5 * a * a * t * t;
  }
  return 0.0;
}

std::pair<PGState, double> reference_state(const ScenarioTag& tag, double t) {
  PGState s;
  s.t = t;
  s.Q = reference_Q(tag, t);
  double a = tag.a;
  switch (tag.name) {
    case Scenario::CardioidUnivalent: {
      if (t < 0.0) throw RangeError("cardioid-univalent needs t >= 0");
      s.g.lead = Complex(-std::exp(-2.0 * t), 0.0);
      s.g.zeros = {{Complex(std::exp(3.0 * t), 0.0), 1}};
      break;
    }
    case Scenario::CardioidPG: {
      if (t < 0.0) throw RangeError("cardioid-pg needs t >= 0");
      s.g.lead = Complex(-std::exp(2.0 * t), 0.0);
      s.g.zeros = {{Complex(std::exp(-3.0 * t), 0.0), 1}};
      break;
    }
    case Scenario::CardioidLK: {
      if (t < 0.0) throw RangeError("cardioid-lk needs t >= 0");
      LKCoefficients c = reference_coefficients_lk(t);
      s.g.lead = Complex(-2.0 * c.b3, 0.0);
      if (t < 1e-14) {
        // Degenerate initial data: all structural points at 1.
        s.g.zeros = {{Complex(1.0, 0.0), 1},
                     {Complex(1.0, 0.0), 1},
                     {Complex(1.0, 0.0), 1}};
        s.g.poles = {{Complex(1.0, 0.0), 2}};
        break;
      }
      // Remaining zeros solve z^2 - (b1^2+3)/2 * zeta1 * z + b1^3 = 0.
      double B = -0.5 * (c.b1 * c.b1 + 3.0) * c.zeta1;
      double C0 = c.b1 * c.b1 * c.b1;
      Complex disc = Complex(B * B - 4.0 * C0, 0.0);
      Complex sq = std::sqrt(disc);
      Complex q1 = (B >= 0.0) ? (-B - sq) / 2.0 : (-B + sq) / 2.0;
      Complex w2 = q1;
      Complex w3 = Complex(C0, 0.0) / q1;
      s.g.zeros = {{Complex(1.0 / c.zeta1, 0.0), 1}, {w2, 1}, {w3, 1}};
      s.g.poles = {{Complex(c.zeta1, 0.0), 2}};
      break;
    }
    case Scenario::Sakai: {
      if (t <= 1.0) throw RangeError("sakai rational branch needs t > 1");
      s.g.lead = Complex(a * t * t * t, 0.0);
      s.g.zeros = {{Complex(1.0 / t, 0.0), 1},
                   {Complex(2.0 * t - 1.0 / t, 0.0), 1}};
      s.g.poles = {{Complex(t, 0.0), 2}};
      break;
    }
    case Scenario::GrowingDisk: {
      if (t <= 0.0 || t >= 1.0) throw RangeError("growing-disk needs 0 < t < 1");
      s.g.lead = Complex(a * t, 0.0);
      break;
    }
  }
  return {s, reference_q(tag, t)};
}

}  // namespace pgflow
