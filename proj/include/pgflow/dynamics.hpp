// Zero/pole/coefficient ODE system for the Polubarinova-Galin equation,
// RK4 stepping with boundary-crossing event detection, structure transitions
// and subordination trajectories.
#pragma once

#include <functional>
#include <vector>

#include "pgflow/rational_map.hpp"

namespace pgflow {

struct PGState {
  double t = 0.0;
  RationalMap g;
  double Q = 0.0;
};

struct DynCoefficients {
  PartialFractionData pf;
  Complex C{0.0, 0.0};
  Complex D{0.0, 0.0};
};

enum class EventKind {
  BoundaryCrossing,
  ZeroCollision,
  ReflectionCoincidence,
  PoleApproachesCircle,
};

struct DynEvent {
  EventKind kind;
  double t_event = 0.0;
  int index = -1;   // zero or pole index
  int index2 = -1;  // second member for pair events
};

using QSchedule = std::function<double(double)>;

struct StateDerivative {
  std::vector<Complex> dzeros;
  std::vector<Complex> dpoles;
  Complex db{0.0, 0.0};
  double dQ = 0.0;
};

DynCoefficients dynamics_coefficients(const PGState& s, double q);

// Disk-holomorphic extension P of q/|g|^2 on the circle, Im P(0) = 0.
Complex poisson_P(const PGState& s, double q, Complex zeta);

// Purely imaginary boundary correction R restoring the rational form of
// zeta f' (P+R); zero when no zeros of g lie in the open disk.
Complex correction_R(const PGState& s, double q, Complex zeta);

// P + R in its pole-sum form C + sum_j 2 A_j/(zeta - omega_j).
Complex poisson_PR(const PGState& s, double q, Complex zeta);

StateDerivative state_derivative(const PGState& s, double q);

// One RK4 step of size at most dt. If a zero crosses the unit circle inside
// the step, the step is shortened by bisection to land on the crossing
// (||omega|-1| < 1e-8) and a BoundaryCrossing event is reported.
std::pair<PGState, std::vector<DynEvent>> step(const PGState& s, double dt,
                                               const QSchedule& q_schedule);

// Augments the structure at a boundary-crossing event: double pole at the
// reflected point plus cancelling zeros, so g is pointwise unchanged.
PGState transition_boundary(const PGState& s, int k);

// Advances through the degenerate instant by solving the coefficient
// constraint system of the cubic-over-simple-pole family (branch value,
// moment conservation, reflected zero). Supported for real residue-free
// structures with a single crossing zero.
PGState restart_after_transition(const PGState& s, double dt0,
                                 const QSchedule& q_schedule);

// True iff every zero inside the disk reflects onto a pole of strictly
// greater order.
bool lk_admissible(const PGState& s);

struct TrajectoryPoint {
  double t;
  PGState state;
  double q;
};

// Densely recorded trajectory (one point per integrator step, uniform dt).
using Trajectory = std::vector<TrajectoryPoint>;

Trajectory record_trajectory(const PGState& s0, double t1, double dt,
                             const QSchedule& q_schedule);

// Solves dw/dt = -w P(w,t) from w(s_time)=zeta to t_time along the recorded
// trajectory; the image point f(w(t),t) stays fixed.
Complex subordination_trajectory(const Trajectory& history, Complex zeta,
                                 double s_time, double t_time);

}  // namespace pgflow
