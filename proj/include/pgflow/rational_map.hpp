// Rational derivative g = f' as leading coefficient, zeros and poles with
// multiplicities; evaluation, reflection and partial-fraction analysis.
#pragma once

#include <vector>

#include "pgflow/types.hpp"

namespace pgflow {

struct RootEntry {
  Complex location;
  int mult = 1;
};

// g(zeta) = lead * prod_k (zeta - zero_k)^{m_k} / prod_j (zeta - pole_j)^{n_j}.
struct RationalMap {
  Complex lead{1.0, 0.0};
  std::vector<RootEntry> zeros;
  std::vector<RootEntry> poles;

  int zero_count() const;  // m, with multiplicity
  int pole_count() const;  // n, with multiplicity

  // Cancels coincident zero/pole pairs (within tol, relative). Used before
  // evaluating a transition-instant state whose augmented factors cancel.
  RationalMap reduced(double tol = kEpsCoincide) const;
};

struct PartialFractionData {
  Complex a_inf{0.0, 0.0};
  std::vector<Complex> a;  // indexed like g.zeros
};

// Throws if the stored structure violates the PG normalization: poles must lie
// outside the closed unit disk, m >= n, g(0) real positive, no zero-pole overlap.
void validate_pg_structure(const RationalMap& g);

Complex eval_g(const RationalMap& g, Complex zeta);
Complex eval_g_prime(const RationalMap& g, Complex zeta);

// Derivative at a simple zero of g (the zero factor removed analytically).
Complex derivative_at_zero(const RationalMap& g, int k);

// g*(zeta) = conj(g(1/conj(zeta))), evaluated directly.
Complex eval_g_star(const RationalMap& g, Complex zeta);

// The same function as a structural RationalMap (zeros/poles reflected; a
// power of zeta at the origin absorbs the degree mismatch).
RationalMap conjugate_reflect(const RationalMap& g);

// Integral of g along the straight segment [a,b] by adaptive Gauss-Legendre.
Complex integrate_g_segment(const RationalMap& g, Complex a, Complex b,
                            double tol = 1e-13);

// f(zeta) = int_0^zeta g, radial path.
Complex eval_f(const RationalMap& g, Complex zeta);

// Residue coefficients of q/(g g*) per the exchange-of-polar-parts expansion.
// Zeros must be simple. A zero inside the disk whose reflection lands on a
// pole gets A_k = 0 exactly.
PartialFractionData partial_fractions(const RationalMap& g, double q);

// Value of the expansion reconstructed from its coefficients at zeta.
Complex partial_fraction_sum(const RationalMap& g, const PartialFractionData& pf,
                             Complex zeta);

// True if zero k is inside the disk with its reflection on a pole of g.
bool zero_is_excused(const RationalMap& g, int k, double tol = kEpsCoincide);

double structure_scale(const RationalMap& g);  // max modulus over zeros/poles, >= 1

}  // namespace pgflow
