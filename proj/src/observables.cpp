#include "pgflow/observables.hpp"

#include <cmath>

#include "pgflow/quadrature.hpp"

namespace pgflow {

namespace {

struct CircleCache {
  std::vector<Complex> zeta, f, g;
};

CircleCache circle_cache(const RationalMap& g, int N) {
  CircleCache c;
  c.zeta.resize(N);
  c.f.resize(N);
  c.g.resize(N);
  for (int j = 0; j < N; ++j) {
    c.zeta[j] = std::polar(1.0, 2.0 * M_PI * j / N);
    c.f[j] = eval_f(g, c.zeta[j]);
    c.g[j] = eval_g(g, c.zeta[j]);
  }
  return c;
}

}  // namespace

MomentVector harmonic_moments(const PGState& s, int K, int N) {
  RationalMap g = s.g.reduced();
  CircleCache c = circle_cache(g, N);
  MomentVector mv;
  mv.M.assign(size_t(K) + 1, Complex{0.0, 0.0});
  for (int j = 0; j < N; ++j) {
    Complex base = std::conj(c.f[j]) * c.g[j] * c.zeta[j];
    Complex fp{1.0, 0.0};
    for (int k = 0; k <= K; ++k) {
      mv.M[size_t(k)] += base * fp;
      fp *= c.f[j];
    }
  }
  for (auto& m : mv.M) m /= double(N);
  return mv;
}

CountingSample counting_number(const PGState& s, Complex z, int N) {
  RationalMap g = s.g.reduced();
  CircleCache c = circle_cache(g, N);
  double max_gp = 0.0, min_dist = 1e300;
  Complex acc{0.0, 0.0};
  for (int j = 0; j < N; ++j) {
    max_gp = std::max(max_gp, std::abs(c.g[j]));
    min_dist = std::min(min_dist, std::abs(c.f[j] - z));
    acc += c.g[j] * c.zeta[j] / (c.f[j] - z);
  }
  acc /= double(N);
  double eps_bdry = 2.0 * M_PI * max_gp / N;
  CountingSample out;
  out.z = z;
  double v = acc.real();
  out.nu = int(std::lround(v));
  out.indeterminate = std::abs(v - out.nu) > 1e-3 ||
                      std::abs(acc.imag()) > 1e-3 || min_dist < eps_bdry;
  if (out.nu < 0) out.nu = 0;
  return out;
}

std::vector<Complex> boundary_samples(const PGState& s, int N) {
  if (N < 4) throw PreconditionError("boundary_samples: N >= 4 required");
  RationalMap g = s.g.reduced();
  std::vector<Complex> out(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j)
    out[size_t(j)] = eval_f(g, std::polar(1.0, 2.0 * M_PI * j / N));
  return out;
}

double pg_residual(const PGState& s, double q) {
  DynCoefficients dc = dynamics_coefficients(s, q);
  double worst = 0.0;
  for (int j = 0; j < 128; ++j) {
    Complex zeta = std::polar(1.0, 2.0 * M_PI * j / 128);
    Complex pr = dc.C;
    for (size_t k = 0; k < s.g.zeros.size(); ++k)
      pr += 2.0 * dc.pf.a[k] / (zeta - s.g.zeros[k].location);
    Complex zfp = zeta * eval_g(s.g, zeta);
    double lhs = (pr * zfp * std::conj(zfp)).real();
    worst = std::max(worst, std::abs(lhs - q));
  }
  return worst;
}

double quadrature_identity_residual(const PGState& s, int degree, int nr,
                                    int ntheta) {
  RationalMap g = s.g.reduced();

  // Residue-free precondition, checked by small-circle contour quadrature.
  for (size_t j = 0; j < g.poles.size(); ++j) {
    double rad = 0.3;
    for (size_t i = 0; i < g.poles.size(); ++i)
      if (i != j)
        rad = std::min(rad,
                       0.4 * std::abs(g.poles[i].location - g.poles[j].location));
    for (const auto& z : g.zeros)
      rad = std::min(rad, 0.4 * std::abs(z.location - g.poles[j].location));
    Complex res{0.0, 0.0};
    const int M = 64;
    for (int i = 0; i < M; ++i) {
      Complex d = std::polar(rad, 2.0 * M_PI * i / M);
      res += eval_g(g, g.poles[j].location + d) * d;
    }
    res /= double(M);
    if (std::abs(res) > 1e-10 * std::max(1.0, std::abs(g.lead)))
      throw UnsupportedStructureError(
          "quadrature identity requires residue-free g");
  }

  // LHS: tensor polar quadrature of (1/pi) zeta^k |g|^2 over the unit disk.
  auto [xr, wr] = gauss_legendre(nr);
  std::vector<Complex> lhs(size_t(degree) + 1, Complex{0.0, 0.0});
  for (int ir = 0; ir < nr; ++ir) {
    double r = 0.5 * (xr[size_t(ir)] + 1.0);
    double wrr = 0.5 * wr[size_t(ir)] * r;
    for (int it = 0; it < ntheta; ++it) {
      Complex zeta = std::polar(r, 2.0 * M_PI * it / ntheta);
      double g2 = std::norm(eval_g(g, zeta));
      Complex zp{1.0, 0.0};
      double w = wrr * (2.0 * M_PI / ntheta) * g2;
      for (int k = 0; k <= degree; ++k) {
        lhs[size_t(k)] += w * zp;
        zp *= zeta;
      }
    }
  }
  for (auto& v : lhs) v /= M_PI;

  // RHS: contour functional on the unit circle.
  const int N = 2048;
  CircleCache c = circle_cache(g, N);
  std::vector<Complex> rhs(size_t(degree) + 1, Complex{0.0, 0.0});
  for (int j = 0; j < N; ++j) {
    Complex base = std::conj(c.f[j]) * c.g[j] * c.zeta[j];
    Complex zp{1.0, 0.0};
    for (int k = 0; k <= degree; ++k) {
      rhs[size_t(k)] += base * zp;
      zp *= c.zeta[j];
    }
  }
  for (auto& v : rhs) v /= double(N);

  double worst = 0.0;
  for (int k = 0; k <= degree; ++k)
    worst = std::max(worst, std::abs(lhs[size_t(k)] - rhs[size_t(k)]));
  return worst;
}

}  // namespace pgflow
