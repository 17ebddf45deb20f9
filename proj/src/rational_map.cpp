#include "pgflow/rational_map.hpp"

#include <algorithm>
#include <cmath>

#include "pgflow/quadrature.hpp"

namespace pgflow {

namespace {

bool close(Complex a, Complex b, double tol, double scale) {
  return std::abs(a - b) <= tol * scale;
}

Complex gl_panel(const RationalMap& g, Complex a, Complex b) {
  static const auto rule = gauss_legendre(15);
  const auto& [x, w] = rule;
  Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Complex acc{0.0, 0.0};
  for (int i = 0; i < 15; ++i)
    acc += w[size_t(i)] * eval_g(g, mid + x[size_t(i)] * half);
  return half * acc;
}

Complex adaptive(const RationalMap& g, Complex a, Complex b, Complex whole,
                 double tol, int depth) {
  Complex mid = 0.5 * (a + b);
  Complex left = gl_panel(g, a, mid);
  Complex right = gl_panel(g, mid, b);
  Complex sum = left + right;
  if (depth >= 28 || std::abs(sum - whole) <= tol * (1.0 + std::abs(sum)))
    return sum;
  return adaptive(g, a, mid, left, 0.5 * tol, depth + 1) +
         adaptive(g, mid, b, right, 0.5 * tol, depth + 1);
}

double segment_distance(Complex p, Complex a, Complex b) {
  Complex d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

int RationalMap::zero_count() const {
  int m = 0;
  for (const auto& z : zeros) m += z.mult;
  return m;
}

int RationalMap::pole_count() const {
  int n = 0;
  for (const auto& p : poles) n += p.mult;
  return n;
}

RationalMap RationalMap::reduced(double tol) const {
  RationalMap out;
  out.lead = lead;
  out.zeros = zeros;
  double scale = structure_scale(*this);
  for (const auto& p : poles) {
    int remaining = p.mult;
    for (auto& z : out.zeros) {
      if (remaining == 0) break;
      if (z.mult > 0 && close(z.location, p.location, tol, scale)) {
        int c = std::min(z.mult, remaining);
        z.mult -= c;
        remaining -= c;
      }
    }
    if (remaining > 0) out.poles.push_back({p.location, remaining});
  }
  std::erase_if(out.zeros, [](const RootEntry& z) { return z.mult == 0; });
  return out;
}

double structure_scale(const RationalMap& g) {
  double s = 1.0;
  for (const auto& z : g.zeros) s = std::max(s, std::abs(z.location));
  for (const auto& p : g.poles) s = std::max(s, std::abs(p.location));
  return s;
}

void validate_pg_structure(const RationalMap& g) {
  if (g.zero_count() < g.pole_count())
    throw UnsupportedStructureError("g must have at least as many zeros as poles");
  for (const auto& p : g.poles)
    if (std::abs(p.location) <= 1.0)
      throw UnsupportedStructureError("pole inside the closed unit disk");
  double scale = structure_scale(g);
  for (const auto& z : g.zeros)
    for (const auto& p : g.poles)
      if (close(z.location, p.location, kEpsCoincide, scale))
        throw DegenerateStructureError("zero coincides with a pole");
  Complex g0 = eval_g(g, Complex(0.0, 0.0));
  if (!(g0.real() > 0.0) || std::abs(g0.imag()) > 1e-10 * std::abs(g0))
    throw UnsupportedStructureError("g(0) must be real positive");
}

Complex eval_g(const RationalMap& g, Complex zeta) {
  Complex num = g.lead;
  for (const auto& z : g.zeros)
    for (int i = 0; i < z.mult; ++i) num *= zeta - z.location;
  Complex den{1.0, 0.0};
  for (const auto& p : g.poles) {
    Complex d = zeta - p.location;
    if (d == Complex(0.0, 0.0))
      throw PoleEvaluationError("eval_g: zeta at a pole");
    for (int i = 0; i < p.mult; ++i) den *= d;
  }
  return num / den;
}

Complex eval_g_prime(const RationalMap& g, Complex zeta) {
  Complex logd{0.0, 0.0};
  for (const auto& z : g.zeros) logd += double(z.mult) / (zeta - z.location);
  for (const auto& p : g.poles) logd -= double(p.mult) / (zeta - p.location);
  return eval_g(g, zeta) * logd;
}

Complex derivative_at_zero(const RationalMap& g, int k) {
  const auto& zk = g.zeros[size_t(k)];
  if (zk.mult != 1)
    throw DegenerateStructureError("derivative_at_zero: zero not simple");
  Complex v = g.lead;
  for (size_t j = 0; j < g.zeros.size(); ++j) {
    if (int(j) == k) continue;
    for (int i = 0; i < g.zeros[j].mult; ++i) v *= zk.location - g.zeros[j].location;
  }
  for (const auto& p : g.poles)
    for (int i = 0; i < p.mult; ++i) v /= zk.location - p.location;
  return v;
}

Complex eval_g_star(const RationalMap& g, Complex zeta) {
  return std::conj(eval_g(g, reflect(zeta)));
}

RationalMap conjugate_reflect(const RationalMap& g) {
  double scale = structure_scale(g);
  for (const auto& z : g.zeros)
    if (std::abs(z.location) <= kEpsCoincide * scale)
      throw UnsupportedStructureError("conjugate_reflect: zero at origin");
  for (const auto& p : g.poles)
    if (std::abs(p.location) <= kEpsCoincide * scale)
      throw UnsupportedStructureError("conjugate_reflect: pole at origin");

  RationalMap out;
  Complex lead = std::conj(g.lead);
  for (const auto& z : g.zeros) {
    out.zeros.push_back({reflect(z.location), z.mult});
    for (int i = 0; i < z.mult; ++i) lead *= -std::conj(z.location);
  }
  for (const auto& p : g.poles) {
    out.poles.push_back({reflect(p.location), p.mult});
    for (int i = 0; i < p.mult; ++i) lead /= -std::conj(p.location);
  }
  int excess = g.zero_count() - g.pole_count();
  if (excess > 0)
    out.poles.push_back({Complex(0.0, 0.0), excess});
  else if (excess < 0)
    out.zeros.push_back({Complex(0.0, 0.0), -excess});
  out.lead = lead;
  return out;
}

Complex integrate_g_segment(const RationalMap& g, Complex a, Complex b,
                            double tol) {
  for (const auto& p : g.poles)
    if (segment_distance(p.location, a, b) < 1e-9)
      throw PathSingularityError("integration path passes near a pole");
  return adaptive(g, a, b, gl_panel(g, a, b), tol, 0);
}

Complex eval_f(const RationalMap& g, Complex zeta) {
  if (zeta == Complex(0.0, 0.0)) return {0.0, 0.0};
  return integrate_g_segment(g, Complex(0.0, 0.0), zeta);
}

bool zero_is_excused(const RationalMap& g, int k, double tol) {
  const auto& zk = g.zeros[size_t(k)];
  if (std::abs(zk.location) >= 1.0) return false;
  Complex r = reflect(zk.location);
  double scale = structure_scale(g);
  for (const auto& p : g.poles)
    if (close(r, p.location, tol, scale)) return true;
  return false;
}

PartialFractionData partial_fractions(const RationalMap& g, double q) {
  double scale = structure_scale(g);
  for (const auto& z : g.zeros) {
    if (z.mult != 1)
      throw DegenerateStructureError("partial_fractions: multiple zero");
    if (std::abs(std::abs(z.location) - 1.0) < kEpsCircle)
      throw BoundaryZeroError("partial_fractions: zero on the unit circle");
  }
  for (size_t i = 0; i < g.zeros.size(); ++i)
    for (size_t j = i + 1; j < g.zeros.size(); ++j) {
      if (close(g.zeros[i].location, g.zeros[j].location, kEpsCoincide, scale))
        throw DegenerateStructureError("partial_fractions: coincident zeros");
      if (close(g.zeros[i].location, reflect(g.zeros[j].location), kEpsCoincide,
                scale) ||
          close(g.zeros[j].location, reflect(g.zeros[i].location), kEpsCoincide,
                scale))
        throw DegenerateStructureError(
            "partial_fractions: mutually reflected zeros");
    }

  PartialFractionData pf;
  if (g.zero_count() == g.pole_count()) {
    // q/(g g*) -> q / (g(inf) conj(g(0))) at infinity; g(0) is real positive.
    pf.a_inf = q / (g.lead * std::conj(eval_g(g, Complex(0.0, 0.0))));
  }
  pf.a.resize(g.zeros.size());
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    if (zero_is_excused(g, int(k))) {
      pf.a[k] = {0.0, 0.0};
      continue;
    }
    Complex gp = derivative_at_zero(g, int(k));
    Complex gs = eval_g_star(g, g.zeros[k].location);
    pf.a[k] = q / (gp * gs);
  }
  return pf;
}

Complex partial_fraction_sum(const RationalMap& g, const PartialFractionData& pf,
                             Complex zeta) {
  Complex v = pf.a_inf;
  for (size_t k = 0; k < g.zeros.size(); ++k) {
    Complex w = g.zeros[k].location;
    Complex A = pf.a[k];
    v += std::conj(A / w);
    v += A / (zeta - w);
    v += std::conj(A) * zeta / (1.0 - std::conj(w) * zeta);
  }
  return v;
}

}  // namespace pgflow
