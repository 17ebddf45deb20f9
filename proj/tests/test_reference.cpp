#include <doctest.h>

#include <cmath>

#include "pgflow/observables.hpp"
#include "pgflow/reference.hpp"

using namespace pgflow;

TEST_CASE("scenario name round trip") {
  for (const char* n : {"cardioid-univalent", "cardioid-pg", "cardioid-lk",
                        "sakai", "growing-disk"}) {
    ScenarioTag tag = scenario_from_string(n, 1.25);
    CHECK(scenario_to_string(tag) == n);
  }
  CHECK_THROWS_AS(scenario_from_string("no-such"), ConfigError);
}

TEST_CASE("continued cardioid coefficients at t = 0") {
  LKCoefficients c = reference_coefficients_lk(0.0);
  CHECK(c.zeta1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.b1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.b2 == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(c.b3 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(c.Q) < 1e-14);
  CHECK(std::abs(c.q) < 1e-13);
}

TEST_CASE("continued cardioid coefficients at t = 1") {
  LKCoefficients c = reference_coefficients_lk(1.0);
  double e = std::exp(1.0);
  double z1 = std::sqrt(0.5 * (1.0 + 2.0 * e - std::exp(-2.0)));
  CHECK(c.zeta1 == doctest::Approx(z1).epsilon(1e-12));
  CHECK(c.zeta1 == doctest::Approx(1.774996).epsilon(1e-5));
  CHECK(c.b3 == doctest::Approx(0.2131946).epsilon(1e-5));
  // q and Q are consistent: dQ/dt = q by central difference.
  double dt = 1e-5;
  double qc = (reference_coefficients_lk(1.0 + dt).Q -
               reference_coefficients_lk(1.0 - dt).Q) /
              (2.0 * dt);
  CHECK(qc == doctest::Approx(c.q).epsilon(1e-7));
}

TEST_CASE("continued cardioid short-time laws") {
  // Near the cusp instant Q ~ 4 t^3 and q ~ 12 t^2.
  for (double t : {0.01, 0.02, 0.05}) {
    LKCoefficients c = reference_coefficients_lk(t);
    CHECK(std::abs(c.q / (12.0 * t * t) - 1.0) < 0.15);
    CHECK(std::abs(c.Q / (4.0 * t * t * t) - 1.0) < 0.15);
  }
}

TEST_CASE("reference states satisfy the boundary identity") {
  struct Probe {
    ScenarioTag tag;
    double t;
  };
  const Probe probes[] = {
      {{Scenario::CardioidUnivalent, 1.0}, 0.3},
      {{Scenario::CardioidPG, 1.0}, 0.25},
      {{Scenario::CardioidLK, 1.0}, 0.4},
      {{Scenario::Sakai, 1.0}, 1.5},
      {{Scenario::Sakai, 0.7}, 2.0},
      {{Scenario::GrowingDisk, 1.0}, 0.5},
  };
  for (const Probe& p : probes) {
    auto [s, q] = reference_state(p.tag, p.t);
    CHECK(pg_residual(s, q) < 1e-9);
    CHECK(q == doctest::Approx(reference_q(p.tag, p.t)).epsilon(1e-13));
  }
}

TEST_CASE("sakai state oracle at t = 2") {
  auto [s, q] = reference_state({Scenario::Sakai, 1.0}, 2.0);
  CHECK(std::abs(s.g.lead - Complex(8.0, 0.0)) < 1e-13);
  REQUIRE(s.g.zeros.size() == 2);
  REQUIRE(s.g.poles.size() == 1);
  CHECK(s.g.poles[0].mult == 2);
  CHECK(std::abs(s.g.poles[0].location - Complex(2.0, 0.0)) < 1e-13);
  CHECK(q == doctest::Approx(30.0).epsilon(1e-13));
  CHECK(s.Q == doctest::Approx(14.0).epsilon(1e-13));
  // Branch point value: f(1/t) = a exactly.
  for (double t : {1.2, 1.7, 2.0, 3.0}) {
    auto [st, qt] = reference_state({Scenario::Sakai, 1.0}, t);
    Complex fv = eval_f(st.g, Complex(1.0 / t, 0.0));
    CHECK(std::abs(fv - Complex(1.0, 0.0)) < 1e-10);
  }
  // Scale parameter enters quadratically in q.
  auto [s2, q2] = reference_state({Scenario::Sakai, 2.0}, 2.0);
  CHECK(q2 == doctest::Approx(4.0 * q).epsilon(1e-13));
}

TEST_CASE("cardioid scenarios agree at the initial instant") {
  auto [su, qu] = reference_state({Scenario::CardioidUnivalent, 1.0}, 0.0);
  auto [sp, qp] = reference_state({Scenario::CardioidPG, 1.0}, 0.0);
  for (int i = 0; i < 16; ++i) {
    Complex z = std::polar(0.9, 2.0 * M_PI * i / 16);
    CHECK(std::abs(eval_g(su.g, z) - eval_g(sp.g, z)) < 1e-13);
  }
  CHECK(std::abs(qu - qp) < 1e-13);
}

TEST_CASE("admissibility of the continued branches") {
  auto [slk, qlk] = reference_state({Scenario::CardioidLK, 1.0}, 0.5);
  CHECK(lk_admissible(slk));
  auto [spg, qpg] = reference_state({Scenario::CardioidPG, 1.0}, 0.5);
  CHECK(!lk_admissible(spg));
  auto [ssa, qsa] = reference_state({Scenario::Sakai, 1.0}, 1.5);
  CHECK(lk_admissible(ssa));
  auto [suv, quv] = reference_state({Scenario::CardioidUnivalent, 1.0}, 0.3);
  CHECK(lk_admissible(suv));  // no zeros inside the disk
}

TEST_CASE("reference time ranges") {
  CHECK_THROWS_AS(reference_state({Scenario::CardioidUnivalent, 1.0}, -0.1),
                  RangeError);
  CHECK_THROWS_AS(reference_state({Scenario::Sakai, 1.0}, 1.0), RangeError);
  CHECK_THROWS_AS(reference_state({Scenario::Sakai, 1.0}, 0.5), RangeError);
  CHECK_THROWS_AS(reference_state({Scenario::GrowingDisk, 1.0}, 1.5),
                  RangeError);
  CHECK_THROWS_AS(reference_state({Scenario::GrowingDisk, 1.0}, 0.0),
                  RangeError);
}

TEST_CASE("growing disk state") {
  auto [s, q] = reference_state({Scenario::GrowingDisk, 2.0}, 0.5);
  CHECK(s.g.zeros.empty());
  CHECK(s.g.poles.empty());
  CHECK(std::abs(s.g.lead - Complex(1.0, 0.0)) < 1e-14);  // a t = 2 * 0.5
  CHECK(q == doctest::Approx(2.0).epsilon(1e-14));        // a^2 t
  CHECK(s.Q == doctest::Approx(0.5).epsilon(1e-14));      // a^2 t^2 / 2
}
