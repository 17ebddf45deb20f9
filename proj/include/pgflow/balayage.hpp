// Grid-based partial balayage Bal(mu, lambda) via the discrete obstacle
// problem, weak Hele-Shaw stepping, weighted blow-ups, pushforward and the
// covering-map compatibility check.
#pragma once

#include <Eigen/Dense>

#include "pgflow/dynamics.hpp"

namespace pgflow {

struct Grid {
  double x0 = 0.0, y0 = 0.0;
  double h = 0.01;
  int nx = 0, ny = 0;

  double cx(int i) const { return x0 + (i + 0.5) * h; }
  double cy(int j) const { return y0 + (j + 0.5) * h; }
  // Cell index of a point; returns false when off-grid.
  bool locate(double x, double y, int* i, int* j) const;
  bool same_as(const Grid& o) const;
};

struct GridField {
  Grid grid;
  Eigen::ArrayXXd values;  // (nx, ny), column-major over y

  static GridField zeros(const Grid& g);
  double mass() const { return values.sum() * grid.h * grid.h; }
};

struct BalayageOutcome {
  GridField result;     // density of Bal(mu, lambda)
  GridField u;          // obstacle-problem potential
  GridField saturated;  // 0/1 mask of the saturated set
};

// Projected SOR on the 5-point Laplacian; tol bounds the complementarity
// residual max |min(u, lambda - mu - lap u)|.
BalayageOutcome bal(const GridField& mu, const GridField& lambda,
                    double tol = 1e-10);

// One weak Hele-Shaw step: Bal(2 pi dQ delta_0 + mask lambda, lambda).
GridField weak_step(const GridField& mask, const GridField& lambda,
                    double deltaQ, double tol = 1e-10);

// Bal(2 pi Q delta_0, |g|^2 chi_{complement of D}): the unit disk enters
// pre-saturated at density |g|^2.
BalayageOutcome weighted_blowup(const RationalMap& g, double Q, const Grid& grid,
                                double tol = 1e-10);

struct StarShapedResult {
  bool geometric = false;
  double v_max_outside = 0.0;  // max of r du/dr outside the unit disk
};

StarShapedResult star_shaped(const BalayageOutcome& outcome, int n_rays = 720);

// Plane-to-plane map used by pushforward.
struct PlaneMap {
  enum class Kind { Identity, Square, Conformal };
  Kind kind = Kind::Identity;
  Complex shift{0.0, 0.0};  // Square: p(z) = z^2 + shift
  RationalMap g;            // Conformal: p = f with derivative g

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
};

// Mass re-binning through the map with 4x4 sub-cell sampling.
GridField pushforward(const GridField& src, const PlaneMap& map,
                      const Grid& dst_grid);

// f_*(|f'|^2 chi_D m): the counting-function density of the state's map.
GridField counting_density(const PGState& s, const Grid& dst_grid,
                           int n_sub = 512);

// L1 distance between Bal(p_* Bal(mu, |p'|^2 lambda(p)), lambda) and
// Bal(p_* mu, lambda).
double compatibility_residual(const GridField& mu_src, const PlaneMap& p,
                              const GridField& lambda_dst, double tol = 1e-10);

}  // namespace pgflow
