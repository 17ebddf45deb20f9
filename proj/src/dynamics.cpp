#include "pgflow/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pgflow {

namespace {

constexpr double kPairTol = 1e-6;  // excused-pair tracking while stepping

struct RawCoeffs {
  std::vector<Complex> A;
  Complex a_inf{0.0, 0.0};
  Complex C{0.0, 0.0};
};

// Residue coefficients without the strict structural checks of
// partial_fractions; used at RK4 substages where a zero may sit inside the
// kEpsCircle band while a step is being bisected onto a crossing.
RawCoeffs raw_coeffs(const RationalMap& g, double q,
                     const std::vector<char>* forced) {
  RawCoeffs rc;
  if (g.zero_count() == g.pole_count())
    rc.a_inf = q / (g.lead * std::conj(eval_g(g, Complex(0.0, 0.0))));
  rc.A.resize(g.zeros.size());
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    if ((forced && (*forced)[k]) || zero_is_excused(g, int(k))) {
      rc.A[k] = {0.0, 0.0};
      continue;
    }
    rc.A[k] = q / (derivative_at_zero(g, int(k)) *
                   eval_g_star(g, g.zeros[k].location));
  }
  Complex re_part = rc.a_inf;  // a_inf is real by normalization
  Complex im_sum{0.0, 0.0};
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    re_part += rc.A[k] / g.zeros[k].location;
    im_sum += 2.0 * rc.A[k] / g.zeros[k].location;
  }
  rc.C = Complex(re_part.real(), im_sum.imag());
  return rc;
}

StateDerivative assemble_derivative(const RationalMap& g, double q,
                                    const RawCoeffs& rc) {
  StateDerivative d;
  d.dzeros.resize(g.zeros.size());
  d.dpoles.resize(g.poles.size());
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    Complex w = g.zeros[k].location;
    Complex rhs = -rc.C - 2.0 * rc.A[k] / w;
    for (size_t j = 0; j < g.zeros.size(); ++j) {
      if (j == k) continue;
      rhs -= 2.0 * (rc.A[k] + rc.A[j]) / (w - g.zeros[j].location);
    }
    for (const auto& p : g.poles)
      rhs += double(p.mult) * 2.0 * rc.A[k] / (w - p.location);
    d.dzeros[k] = w * rhs;
  }
  for (size_t j = 0; j < g.poles.size(); ++j) {
    Complex z = g.poles[j].location;
    Complex rhs = -rc.C;
    for (size_t k = 0; k < g.zeros.size(); ++k)
      rhs -= 2.0 * rc.A[k] / (z - g.zeros[k].location);
    d.dpoles[j] = z * rhs;
  }
  int mn = g.zero_count() - g.pole_count() + 1;
  d.db = g.lead * double(mn) * rc.C;
  d.dQ = q;
  return d;
}

RationalMap advance(const RationalMap& g, const StateDerivative& d, double h) {
  RationalMap out = g;
  for (size_t k = 0; k < out.zeros.size(); ++k)
    out.zeros[k].location += h * d.dzeros[k];
  for (size_t j = 0; j < out.poles.size(); ++j)
    out.poles[j].location += h * d.dpoles[j];
  out.lead += h * d.db;
  return out;
}

StateDerivative combine_rk4(const StateDerivative& k1, const StateDerivative& k2,
                            const StateDerivative& k3, const StateDerivative& k4) {
  StateDerivative d;
  d.dzeros.resize(k1.dzeros.size());
  d.dpoles.resize(k1.dpoles.size());
  for (size_t i = 0; i < d.dzeros.size(); ++i)
    d.dzeros[i] =
        (k1.dzeros[i] + 2.0 * k2.dzeros[i] + 2.0 * k3.dzeros[i] + k4.dzeros[i]) /
        6.0;
  for (size_t i = 0; i < d.dpoles.size(); ++i)
    d.dpoles[i] =
        (k1.dpoles[i] + 2.0 * k2.dpoles[i] + 2.0 * k3.dpoles[i] + k4.dpoles[i]) /
        6.0;
  d.db = (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db) / 6.0;
  d.dQ = (k1.dQ + 2.0 * k2.dQ + 2.0 * k3.dQ + k4.dQ) / 6.0;
  return d;
}

// One classical RK4 step of size h from state s, using forced excused pairs.
PGState rk4_once(const PGState& s, double h, const QSchedule& qs,
                 const std::vector<char>* forced) {
  auto F = [&](const RationalMap& g, double t) {
    return assemble_derivative(g, qs(t), raw_coeffs(g, qs(t), forced));
  };
  StateDerivative k1 = F(s.g, s.t);
  StateDerivative k2 = F(advance(s.g, k1, 0.5 * h), s.t + 0.5 * h);
  StateDerivative k3 = F(advance(s.g, k2, 0.5 * h), s.t + 0.5 * h);
  StateDerivative k4 = F(advance(s.g, k3, h), s.t + h);
  StateDerivative d = combine_rk4(k1, k2, k3, k4);
  PGState out;
  out.t = s.t + h;
  out.g = advance(s.g, d, h);
  out.Q = s.Q + h * d.dQ;
  return out;
}

// RK4 step with a colliding zero pair integrated in symmetric coordinates
// e1 = w_i + w_j, e2 = w_i w_j. Individual zero trajectories have a
// square-root branch point at a collision, but the symmetric functions stay
// analytic (g itself does), so stepping in (e1, e2) passes smoothly through.
PGState rk4_once_pair(const PGState& s, double h, const QSchedule& qs,
                      const std::vector<char>* forced, size_t i, size_t j) {
  auto make_map = [&](RationalMap g, Complex e1, Complex e2) {
    Complex disc = std::sqrt(e1 * e1 - 4.0 * e2);
    g.zeros[i].location = 0.5 * (e1 + disc);
    g.zeros[j].location = 0.5 * (e1 - disc);
    return g;
  };
  struct PairDeriv {
    StateDerivative d;
    Complex de1, de2;
  };
  auto F = [&](const RationalMap& g, double t) {
    double q = qs(t);
    PairDeriv pd;
    pd.d = assemble_derivative(g, q, raw_coeffs(g, q, forced));
    pd.de1 = pd.d.dzeros[i] + pd.d.dzeros[j];
    pd.de2 = pd.d.dzeros[i] * g.zeros[j].location +
             g.zeros[i].location * pd.d.dzeros[j];
    return pd;
  };
  Complex w1 = s.g.zeros[i].location, w2 = s.g.zeros[j].location;
  Complex e1 = w1 + w2, e2 = w1 * w2;
  auto stage = [&](const PairDeriv& pd, double a) {
    return make_map(advance(s.g, pd.d, a * h), e1 + a * h * pd.de1,
                    e2 + a * h * pd.de2);
  };
  PairDeriv k1 = F(s.g, s.t);
  PairDeriv k2 = F(stage(k1, 0.5), s.t + 0.5 * h);
  PairDeriv k3 = F(stage(k2, 0.5), s.t + 0.5 * h);
  PairDeriv k4 = F(stage(k3, 1.0), s.t + h);
  PairDeriv d;
  d.d = combine_rk4(k1.d, k2.d, k3.d, k4.d);
  d.de1 = (k1.de1 + 2.0 * k2.de1 + 2.0 * k3.de1 + k4.de1) / 6.0;
  d.de2 = (k1.de2 + 2.0 * k2.de2 + 2.0 * k3.de2 + k4.de2) / 6.0;
  PGState out;
  out.t = s.t + h;
  out.g = stage(d, 1.0);
  out.Q = s.Q + h * d.d.dQ;
  return out;
}

// The off-family dynamics stiffen when a zero nears the unit circle (g*
// decays there); cap the RK4 substep by the approach distance. A close zero
// pair is handed to the symmetric-coordinate stepper instead.
PGState rk4_guarded(const PGState& s, double h, const QSchedule& qs,
                    const std::vector<char>* forced) {
  double target = s.t + h;
  PGState cur = s;
  while (cur.t < target - 1e-15) {
    double d = 1e9;
    for (const auto& z : cur.g.zeros)
      d = std::min(d, std::abs(std::abs(z.location) - 1.0));
    double cap = h;
    if (d < 5e-2) cap = std::min(h, std::max(d / 100.0, h / 4096.0));
    double hh = std::min(target - cur.t, cap);

    double scale = std::max(structure_scale(cur.g), 1.0);
    double dp = 1e9;
    size_t pi = 0, pj = 0;
    for (size_t i = 0; i < cur.g.zeros.size(); ++i)
      for (size_t j = i + 1; j < cur.g.zeros.size(); ++j) {
        double dd =
            std::abs(cur.g.zeros[i].location - cur.g.zeros[j].location);
        if (dd < dp) {
          dp = dd;
          pi = i;
          pj = j;
        }
      }
    if (dp < 0.04 * scale)
      cur = rk4_once_pair(cur, hh, qs, forced, pi, pj);
    else
      cur = rk4_once(cur, hh, qs, forced);
  }
  cur.t = target;
  return cur;
}

std::vector<std::pair<int, int>> excused_pairs(const RationalMap& g) {
  std::vector<std::pair<int, int>> pairs;
  double scale = structure_scale(g);
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    if (std::abs(g.zeros[k].location) >= 1.0) continue;
    Complex r = reflect(g.zeros[k].location);
    for (size_t j = 0; j < g.poles.size(); ++j)
      if (std::abs(r - g.poles[j].location) <= kPairTol * scale)
        pairs.emplace_back(int(k), int(j));
  }
  return pairs;
}

Complex contour_moment(const RationalMap& g, int k, int N) {
  Complex acc{0.0, 0.0};
  for (int j = 0; j < N; ++j) {
    double th = 2.0 * M_PI * j / N;
    Complex z = std::polar(1.0, th);
    Complex f = eval_f(g, z);
    Complex term = std::conj(f) * eval_g(g, z) * z;
    for (int i = 0; i < k; ++i) term *= f;
    acc += term;
  }
  return acc / double(N);
}

}  // namespace

DynCoefficients dynamics_coefficients(const PGState& s, double q) {
  DynCoefficients dc;
  dc.pf = partial_fractions(s.g, q);
  Complex re_part = dc.pf.a_inf;
  Complex im_sum{0.0, 0.0};
  for (size_t k = 0; k < s.g.zeros.size(); ++k) {
    re_part += dc.pf.a[k] / s.g.zeros[k].location;
    im_sum += 2.0 * dc.pf.a[k] / s.g.zeros[k].location;
    dc.D += 2.0 * dc.pf.a[k];
  }
  dc.C = Complex(re_part.real(), im_sum.imag());
  return dc;
}

Complex poisson_P(const PGState& s, double q, Complex zeta) {
  DynCoefficients dc = dynamics_coefficients(s, q);
  double scale = structure_scale(s.g);
  Complex a0{dc.pf.a_inf.real(), 0.0};
  for (size_t k = 0; k < s.g.zeros.size(); ++k)
    a0 += Complex((dc.pf.a[k] / s.g.zeros[k].location).real(), 0.0);
  Complex v = a0;
  for (size_t k = 0; k < s.g.zeros.size(); ++k) {
    Complex w = s.g.zeros[k].location;
    Complex A = dc.pf.a[k];
    if (std::abs(w) > 1.0) {
      if (std::abs(zeta - w) < 1e-13 * scale)
        throw PoleEvaluationError("poisson_P: zeta at a pole of P");
      v += 2.0 * A / (zeta - w);
      v += Complex(0.0, (2.0 * A / w).imag());
    } else {
      Complex den = 1.0 - std::conj(w) * zeta;
      if (std::abs(den) < 1e-13)
        throw PoleEvaluationError("poisson_P: zeta at a reflected pole of P");
      v += 2.0 * std::conj(A) * zeta / den;
    }
  }
  return v;
}

Complex correction_R(const PGState& s, double q, Complex zeta) {
  DynCoefficients dc = dynamics_coefficients(s, q);
  Complex v{0.0, 0.0};
  for (size_t k = 0; k < s.g.zeros.size(); ++k) {
    Complex w = s.g.zeros[k].location;
    if (std::abs(w) >= 1.0) continue;
    Complex A = dc.pf.a[k];
    v += Complex(0.0, (2.0 * A / w).imag());
    v += 2.0 * A / (zeta - w);
    Complex den = 1.0 - std::conj(w) * zeta;
    if (std::abs(den) < 1e-13)
      throw PoleEvaluationError("correction_R: zeta at a reflected pole");
    v -= 2.0 * std::conj(A) * zeta / den;
  }
  return v;
}

Complex poisson_PR(const PGState& s, double q, Complex zeta) {
  DynCoefficients dc = dynamics_coefficients(s, q);
  Complex v = dc.C;
  for (size_t k = 0; k < s.g.zeros.size(); ++k)
    v += 2.0 * dc.pf.a[k] / (zeta - s.g.zeros[k].location);
  return v;
}

StateDerivative state_derivative(const PGState& s, double q) {
  DynCoefficients dc = dynamics_coefficients(s, q);  // strict checks
  RawCoeffs rc{dc.pf.a, dc.pf.a_inf, dc.C};
  return assemble_derivative(s.g, q, rc);
}

std::pair<PGState, std::vector<DynEvent>> step(const PGState& s, double dt,
                                               const QSchedule& q_schedule) {
  std::vector<DynEvent> events;
  if (dt == 0.0) return {s, events};
  if (dt < 0.0) throw PreconditionError("step: dt must be non-negative");

  std::vector<char> forced(s.g.zeros.size(), 0);
  for (auto [k, j] : excused_pairs(s.g)) forced[size_t(k)] = 1;

  PGState end;
  try {
    end = rk4_guarded(s, dt, q_schedule, &forced);
  } catch (const Error& e) {
    throw StepRejectedError(std::string("step rejected (try smaller dt): ") +
                            e.what());
  }

  // Boundary-crossing scan. A transversal crossing shows up as a sign change
  // of |omega_k| - 1 and is bisected to 1e-10. A tangential touch (q -> 0 at
  // the event, as at cusp formation) amplifies roundoff like 1/distance, so
  // the integrated radius may graze the circle without a sign change; those
  // are caught by minimizing the distance over the step.
  double tau = dt;
  int crossing = -1;
  for (size_t k = 0; k < s.g.zeros.size(); ++k) {
    double r0 = std::abs(s.g.zeros[k].location) - 1.0;
    double r1 = std::abs(end.g.zeros[k].location) - 1.0;
    double cand_tau = -1.0;
    PGState cand;
    if (r0 * r1 < 0.0) {
      double lo = 0.0, hi = dt;
      cand = end;
      while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        PGState sm = rk4_guarded(s, mid, q_schedule, &forced);
        double rm = std::abs(sm.g.zeros[k].location) - 1.0;
        if (r0 * rm <= 0.0) {
          hi = mid;
          cand = sm;
        } else {
          lo = mid;
        }
      }
      cand_tau = hi;
    } else if (std::min(std::abs(r0), std::abs(r1)) < 1e-4 &&
               std::abs(r1) < std::abs(r0)) {
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 60 && hi - lo > 1e-11; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        double f1 = std::abs(std::abs(rk4_guarded(s, m1, q_schedule, &forced)
                                          .g.zeros[k]
                                          .location) -
                             1.0);
        double f2 = std::abs(std::abs(rk4_guarded(s, m2, q_schedule, &forced)
                                          .g.zeros[k]
                                          .location) -
                             1.0);
        if (f1 < f2)
          hi = m2;
        else
          lo = m1;
      }
      double tm = 0.5 * (lo + hi);
      PGState sm = tm == dt ? end : rk4_guarded(s, tm, q_schedule, &forced);
      if (std::abs(std::abs(sm.g.zeros[k].location) - 1.0) < 1e-5) {
        cand_tau = tm;
        cand = sm;
      }
    }
    if (cand_tau >= 0.0 && (cand_tau < tau || crossing < 0)) {
      tau = cand_tau;
      end = cand;
      crossing = int(k);
    }
  }
  if (crossing >= 0) {
    DynEvent ev;
    ev.kind = EventKind::BoundaryCrossing;
    ev.t_event = s.t + tau;
    ev.index = crossing;
    events.push_back(ev);
  } else {
    // Keep tracked excused pairs exact: the continuum dynamics conserve the
    // zero/pole reflection pairing (it only drifts by integration roundoff).
    for (auto [k, j] : excused_pairs(s.g)) {
      Complex w = end.g.zeros[size_t(k)].location;
      if (std::abs(w) < 1.0) end.g.poles[size_t(j)].location = reflect(w);
    }
  }

  // Refine Q with Simpson on the landed interval.
  double q0 = q_schedule(s.t), qm = q_schedule(s.t + 0.5 * tau),
         q1 = q_schedule(s.t + tau);
  end.Q = s.Q + tau / 6.0 * (q0 + 4.0 * qm + q1);

  // Degeneracy warnings at the landed state.
  double scale = structure_scale(end.g);
  for (size_t i = 0; i < end.g.zeros.size(); ++i)
    for (size_t j = i + 1; j < end.g.zeros.size(); ++j) {
      Complex wi = end.g.zeros[i].location, wj = end.g.zeros[j].location;
      if (std::abs(wi - wj) < 1e-7 * scale)
        events.push_back({EventKind::ZeroCollision, end.t, int(i), int(j)});
      if (std::abs(wi - reflect(wj)) < 1e-7 * scale)
        events.push_back(
            {EventKind::ReflectionCoincidence, end.t, int(i), int(j)});
    }
  for (size_t j = 0; j < end.g.poles.size(); ++j)
    if (std::abs(end.g.poles[j].location) < 1.0 + 1e-6)
      events.push_back({EventKind::PoleApproachesCircle, end.t, int(j), -1});
  return {end, events};
}

PGState transition_boundary(const PGState& s, int k) {
  if (k < 0 || size_t(k) >= s.g.zeros.size())
    throw PreconditionError("transition_boundary: bad zero index");
  Complex w = s.g.zeros[size_t(k)].location;
  if (std::abs(std::abs(w) - 1.0) >= kEpsCircle)
    throw PreconditionError("transition_boundary: state not at a crossing");
  Complex p = reflect(w);
  PGState out = s;
  double scale = structure_scale(s.g);
  for (auto& pe : out.g.poles) {
    if (std::abs(pe.location - p) <= kEpsCoincide * scale) {
      // Existing pole at the reflected point: raise its order, one new zero.
      pe.mult += 1;
      out.g.zeros.push_back({pe.location, 1});
      return out;
    }
  }
  out.g.poles.push_back({p, 2});
  out.g.zeros.push_back({p, 1});
  out.g.zeros.push_back({p, 1});
  return out;
}

bool lk_admissible(const PGState& s) {
  double scale = structure_scale(s.g);
  for (const auto& z : s.g.zeros) {
    if (std::abs(z.location) >= 1.0) continue;
    Complex r = reflect(z.location);
    bool ok = false;
    for (const auto& p : s.g.poles)
      if (std::abs(p.location - r) <= kEpsCoincide * scale && p.mult > z.mult) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

namespace {

struct RestartFamily {
  double c;    // branch value f at the crossing point
  double M0;   // pre-transition area moment
  double M1;   // conserved first moment
};

struct RestartSolution {
  double b1, b2, b3, z1, Q;
};

// Coefficient constraints of the cubic-over-simple-pole family
// f = -(b1 z + b2 z^2 + b3 z^3)/(z - z1):
//   g(1/z1) = 0, f(1/z1) = c, M1 conserved, M0 grows by 2Q.
double inner_zeta1(double b1, const RestartFamily& fam, double* b2o,
                   double* b3o) {
  auto coeffs = [&](double z1, double* b2, double* b3) {
    *b3 = -fam.M1 * z1 * z1 / (b1 * b1);
    *b2 = -(b1 * z1 * z1 + *b3 + fam.c * z1 * z1 * (1.0 - z1 * z1)) / z1;
  };
  auto E = [&](double z1) {
    double b2, b3;
    coeffs(z1, &b2, &b3);
    return b1 * std::pow(z1, 4) + 2.0 * b2 * std::pow(z1, 3) -
           (b2 - 3.0 * b3 * z1) * z1 - 2.0 * b3;
  };
  double arg = 0.5 * (1.0 + 2.0 * b1 - 1.0 / (b1 * b1));
  double z1 = std::sqrt(std::max(1.0, arg));
  for (int it = 0; it < 60; ++it) {
    double e = E(z1);
    double h = 1e-7 * std::max(1.0, z1);
    double de = (E(z1 + h) - E(z1 - h)) / (2.0 * h);
    if (de == 0.0) break;
    double dz = e / de;
    z1 -= dz;
    if (z1 < 1.0) z1 = 1.0 + 1e-12;
    if (std::abs(dz) < 1e-14 * std::max(1.0, z1)) break;
  }
  coeffs(z1, b2o, b3o);
  return z1;
}

double q_of_b1(double b1, const RestartFamily& fam, RestartSolution* out) {
  double b2, b3;
  double z1 = inner_zeta1(b1, fam, &b2, &b3);
  double num = b1 * b2 * z1 + 2.0 * b2 * b3 * z1 + b1 * b3 * (z1 * z1 + 2.0);
  double Q = 0.5 * (-num / (z1 * z1) - fam.M0);
  if (out) *out = {b1, b2, b3, z1, Q};
  return Q;
}

}  // namespace

PGState restart_after_transition(const PGState& s, double dt0,
                                 const QSchedule& q_schedule) {
  if (dt0 < 0.0) throw PreconditionError("restart_after_transition: dt0 < 0");
  if (dt0 == 0.0) return s;

  // Supported family: real data, three simple zeros, one double pole at the
  // reflection of a crossing zero near +1, residue-free g.
  if (s.g.poles.size() != 1 || s.g.poles[0].mult != 2 ||
      s.g.zeros.size() != 3)
    throw UnsupportedTransitionError(
        "restart: structure outside the cubic/double-pole family");
  double scale = structure_scale(s.g);
  for (const auto& z : s.g.zeros)
    if (std::abs(z.location.imag()) > 1e-7 * scale ||
        z.mult != 1)
      throw UnsupportedTransitionError("restart: non-real structure");
  if (std::abs(s.g.poles[0].location.imag()) > 1e-7 * scale ||
      std::abs(s.g.lead.imag()) > 1e-7 * std::abs(s.g.lead))
    throw UnsupportedTransitionError("restart: non-real structure");

  bool found_crossing = false;
  for (const auto& z : s.g.zeros)
    if (std::abs(z.location - Complex(1.0, 0.0)) < 1e-6) found_crossing = true;
  if (!found_crossing || std::abs(s.g.poles[0].location - Complex(1.0, 0.0)) > 1e-6)
    throw UnsupportedTransitionError(
        "restart: crossing away from +1 unsupported");

  RationalMap pre = s.g.reduced(1e-6);
  RestartFamily fam;
  fam.c = eval_f(pre, Complex(1.0, 0.0)).real();
  fam.M0 = contour_moment(pre, 0, kDefaultContourNodes).real();
  fam.M1 = contour_moment(pre, 1, kDefaultContourNodes).real();

  // Target accumulated source after dt0 (Simpson).
  double t0 = s.t, t1 = s.t + dt0;
  double Qt = s.Q + dt0 / 6.0 *
                        (q_schedule(t0) + 4.0 * q_schedule(0.5 * (t0 + t1)) +
                         q_schedule(t1));

  // Outer solve for b1 >= 1 matching the accumulated source.
  double lo = 1.0, hi = 1.0 + std::max(4.0 * dt0, 1e-6);
  while (q_of_b1(hi, fam, nullptr) < Qt) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (hi > 1e6)
      throw UnsupportedTransitionError("restart: source target unreachable");
  }
  RestartSolution sol{};
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (q_of_b1(mid, fam, &sol) < Qt)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  q_of_b1(0.5 * (lo + hi), fam, &sol);

  // g = (-2 b3 z^3 - (b2 - 3 b3 z1) z^2 + 2 b2 z1 z + b1 z1)/(z - z1)^2.
  // One cubic root is 1/z1; deflate and take the quadratic's roots.
  double c3 = -2.0 * sol.b3;
  double c2 = -(sol.b2 - 3.0 * sol.b3 * sol.z1);
  double c1 = 2.0 * sol.b2 * sol.z1;
  double r = 1.0 / sol.z1;
  double d2 = c3;
  double d1 = c2 + r * d2;
  // Deflated quadratic d2 z^2 + d1 z + d0 with d0 = c1 + r*d1.
  double d0 = c1 + r * d1;
  Complex disc = Complex(d1 * d1 - 4.0 * d2 * d0, 0.0);
  Complex sq = std::sqrt(disc);
  Complex q1 = (-d1 + (d1 >= 0 ? -sq : sq)) / 2.0;
  Complex w2 = q1 / d2;
  Complex w3 = (q1 == Complex(0.0, 0.0)) ? Complex(0.0, 0.0)
                                         : Complex(d0, 0.0) / q1;

  PGState out;
  out.t = t1;
  out.Q = Qt;
  out.g.lead = Complex(c3, 0.0);
  out.g.zeros = {{Complex(r, 0.0), 1}, {w2, 1}, {w3, 1}};
  out.g.poles = {{Complex(sol.z1, 0.0), 2}};
  return out;
}

Trajectory record_trajectory(const PGState& s0, double t1, double dt,
                             const QSchedule& q_schedule) {
  Trajectory traj;
  PGState s = s0;
  traj.push_back({s.t, s, q_schedule(s.t)});
  while (s.t < t1 - 1e-12) {
    double h = std::min(dt, t1 - s.t);
    auto [next, events] = step(s, h, q_schedule);
    s = next;
    traj.push_back({s.t, s, q_schedule(s.t)});
    if (!events.empty() && events.front().kind == EventKind::BoundaryCrossing)
      break;
  }
  return traj;
}

Complex subordination_trajectory(const Trajectory& history, Complex zeta,
                                 double s_time, double t_time) {
  if (std::abs(zeta) >= 1.0)
    throw PreconditionError("subordination: |zeta| must be < 1");
  if (t_time < s_time)
    throw PreconditionError("subordination: t_time < s_time");
  auto find = [&](double t) -> size_t {
    for (size_t i = 0; i < history.size(); ++i)
      if (std::abs(history[i].t - t) < 1e-9) return i;
    throw PreconditionError("subordination: time not on the recorded grid");
  };
  size_t i0 = find(s_time), i1 = find(t_time);
  for (size_t i = i0; i <= i1; ++i)
    if (!lk_admissible(history[i].state))
      throw SubordinationError("subordination: non-admissible state in history");

  auto W = [&](const TrajectoryPoint& p, Complex w) {
    return -w * poisson_P(p.state, p.q, w);
  };
  Complex w = zeta;
  size_t i = i0;
  while (i + 2 <= i1) {
    // Classical RK4 over two history intervals; stages use stored states.
    double h = history[i + 2].t - history[i].t;
    Complex k1 = W(history[i], w);
    Complex k2 = W(history[i + 1], w + 0.5 * h * k1);
    Complex k3 = W(history[i + 1], w + 0.5 * h * k2);
    Complex k4 = W(history[i + 2], w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    i += 2;
  }
  if (i + 1 <= i1) {
    // Odd leftover interval: Heun.
    double h = history[i + 1].t - history[i].t;
    Complex k1 = W(history[i], w);
    Complex k2 = W(history[i + 1], w + h * k1);
    w += 0.5 * h * (k1 + k2);
  }
  return w;
}

}  // namespace pgflow
