// Derived quantities along trajectories: harmonic moments, counting function,
// boundary curves and residuals of the defining identities.
#pragma once

#include "pgflow/dynamics.hpp"

namespace pgflow {

struct MomentVector {
  std::vector<Complex> M;  // indices 0..K
};

struct CountingSample {
  Complex z{0.0, 0.0};
  int nu = 0;
  bool indeterminate = false;
};

// M_k = (1/2 pi i) \oint f^k f* f' dzeta by trapezoidal contour quadrature.
MomentVector harmonic_moments(const PGState& s, int K,
                              int N = kDefaultContourNodes);

// Mapping degree at z via the winding integral of d log(f - z).
CountingSample counting_number(const PGState& s, Complex z,
                               int N = kDefaultContourNodes);

// f at N uniform circle points.
std::vector<Complex> boundary_samples(const PGState& s, int N);

// Max over 128 circle points of |Re(fdot conj(zeta f')) - q| with
// fdot = zeta f' (P+R).
double pg_residual(const PGState& s, double q);

// Max over monomials h = zeta^k, k <= degree, of the mismatch between the
// weighted disk integral (1/pi) \int_D h |g|^2 dm and the contour functional
// (1/2 pi i) \oint h f* g dzeta. Requires residue-free g.
double quadrature_identity_residual(const PGState& s, int degree,
                                    int nr = 400, int ntheta = 512);

}  // namespace pgflow
