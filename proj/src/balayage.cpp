#include "pgflow/balayage.hpp"

#include <cmath>

namespace pgflow {

bool Grid::locate(double x, double y, int* i, int* j) const {
  int ii = int(std::floor((x - x0) / h));
  int jj = int(std::floor((y - y0) / h));
  if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return false;
  *i = ii;
  *j = jj;
  return true;
}

bool Grid::same_as(const Grid& o) const {
  return x0 == o.x0 && y0 == o.y0 && h == o.h && nx == o.nx && ny == o.ny;
}

GridField GridField::zeros(const Grid& g) {
  GridField f;
  f.grid = g;
  f.values = Eigen::ArrayXXd::Zero(g.nx, g.ny);
  return f;
}

BalayageOutcome bal(const GridField& mu, const GridField& lambda, double tol) {
  if (!mu.grid.same_as(lambda.grid))
    throw PreconditionError("bal: mu and lambda grids differ");
  const Grid& G = mu.grid;
  const int nx = G.nx, ny = G.ny;
  const double h2 = G.h * G.h;

  // Obstacle data: lap u <= rhs, u >= 0, complementarity.
  Eigen::ArrayXXd rhs = lambda.values - mu.values;
  Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(nx, ny);

  const double omega = 2.0 / (1.0 + std::sin(M_PI / std::max(nx, ny)));
  const long max_sweeps = 200L * std::max(nx, ny);

  double residual = 1e300;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int j = 1; j < ny - 1; ++j) {
      for (int i = 1; i < nx - 1; ++i) {
        double ugs = 0.25 * (u(i - 1, j) + u(i + 1, j) + u(i, j - 1) +
                             u(i, j + 1) - h2 * rhs(i, j));
        double un = u(i, j) + omega * (ugs - u(i, j));
        u(i, j) = un > 0.0 ? un : 0.0;
      }
    }
    if (sweep % 10 == 9 || sweep == max_sweeps - 1) {
      residual = 0.0;
      for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
          double lap = (u(i - 1, j) + u(i + 1, j) + u(i, j - 1) + u(i, j + 1) -
                        4.0 * u(i, j)) /
                       h2;
          double r = rhs(i, j) - lap;
          double m = std::min(u(i, j), r);
          residual = std::max(residual, std::abs(m));
        }
      if (residual < tol) break;
    }
  }
  if (residual >= tol)
    throw IterationLimitError("bal: PSOR failed to reach tolerance");

  for (int i = 0; i < nx; ++i)
    if (u(i, 1) > kEpsU || u(i, ny - 2) > kEpsU)
      throw GridTooSmallError("bal: swept mass reaches the grid boundary");
  for (int j = 0; j < ny; ++j)
    if (u(1, j) > kEpsU || u(nx - 2, j) > kEpsU)
      throw GridTooSmallError("bal: swept mass reaches the grid boundary");

  BalayageOutcome out;
  out.u.grid = G;
  out.u.values = u;
  out.result.grid = G;
  out.result.values = mu.values;
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      double lap = (u(i - 1, j) + u(i + 1, j) + u(i, j - 1) + u(i, j + 1) -
                    4.0 * u(i, j)) /
                   h2;
      out.result.values(i, j) = mu.values(i, j) + lap;
    }
  out.saturated = GridField::zeros(G);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.saturated.values(i, j) =
          (u(i, j) > kEpsU || mu.values(i, j) >= lambda.values(i, j)) ? 1.0
                                                                      : 0.0;
  return out;
}

GridField weak_step(const GridField& mask, const GridField& lambda,
                    double deltaQ, double tol) {
  if (deltaQ < 0.0) throw PreconditionError("weak_step: deltaQ < 0");
  const Grid& G = mask.grid;
  int i0, j0;
  if (!G.locate(0.0, 0.0, &i0, &j0))
    throw PreconditionError("weak_step: origin off-grid");
  if (mask.values(i0, j0) <= 0.0)
    throw PreconditionError("weak_step: origin outside the mask");
  GridField mu = GridField::zeros(G);
  mu.values = mask.values * lambda.values;
  mu.values(i0, j0) += 2.0 * M_PI * deltaQ / (G.h * G.h);
  if (deltaQ == 0.0) return mask;
  return bal(mu, lambda, tol).saturated;
}

BalayageOutcome weighted_blowup(const RationalMap& g, double Q, const Grid& grid,
                                double tol) {
  GridField lambda = GridField::zeros(grid);
  GridField mu = GridField::zeros(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Complex z(grid.cx(i), grid.cy(j));
      double w = std::norm(eval_g(g, z));
      lambda.values(i, j) = w;
      if (std::abs(z) < 1.0) mu.values(i, j) = w;
    }
  int i0, j0;
  if (!grid.locate(0.0, 0.0, &i0, &j0))
    throw PreconditionError("weighted_blowup: origin off-grid");
  mu.values(i0, j0) += 2.0 * M_PI * Q / (grid.h * grid.h);
  double scale = std::max(1.0, lambda.values.maxCoeff());
  return bal(mu, lambda, tol * scale);
}

StarShapedResult star_shaped(const BalayageOutcome& outcome, int n_rays) {
  const Grid& G = outcome.saturated.grid;
  StarShapedResult out;

  double rmax = 0.0;
  for (double x : {G.x0, G.x0 + G.nx * G.h})
    for (double y : {G.y0, G.y0 + G.ny * G.h})
      rmax = std::max(rmax, std::hypot(x, y));
  const double dr = 0.5 * G.h;
  const int gap_allow = 3;  // off-runs up to ~1.5 h are staircase noise

  bool star = true;
  for (int a = 0; a < n_rays && star; ++a) {
    double th = 2.0 * M_PI * a / n_rays;
    double cs = std::cos(th), sn = std::sin(th);
    int on_runs = 0, gap = 0;
    bool in_run = false, seen_any = false, first = true;
    for (double r = 0.0; r <= rmax; r += dr) {
      int i, j;
      bool on = G.locate(r * cs, r * sn, &i, &j) &&
                outcome.saturated.values(i, j) > 0.5;
      if (first) {
        first = false;
        if (!on) {  // ray does not start inside: not star-shaped about 0
          on_runs = -1;
          break;
        }
      }
      if (on) {
        if (!in_run && (!seen_any || gap > gap_allow)) ++on_runs;
        in_run = true;
        seen_any = true;
        gap = 0;
      } else {
        if (in_run) gap = 1;
        else if (seen_any) ++gap;
        in_run = false;
      }
    }
    if (on_runs != 1) star = false;
  }
  out.geometric = star;

  // Diagnostic v = r du/dr by centered differences, outside the unit disk.
  double vmax = -1e300;
  const auto& u = outcome.u.values;
  for (int j = 1; j < G.ny - 1; ++j)
    for (int i = 1; i < G.nx - 1; ++i) {
      double x = G.cx(i), y = G.cy(j);
      if (x * x + y * y <= 1.0) continue;
      double ux = (u(i + 1, j) - u(i - 1, j)) / (2.0 * G.h);
      double uy = (u(i, j + 1) - u(i, j - 1)) / (2.0 * G.h);
      vmax = std::max(vmax, x * ux + y * uy);
    }
  out.v_max_outside = vmax;
  return out;
}

Complex PlaneMap::operator()(Complex z) const {
  switch (kind) {
    case Kind::Identity: return z;
    case Kind::Square: return z * z + shift;
    case Kind::Conformal: return eval_f(g, z);
  }
  return z;
}

Complex PlaneMap::derivative(Complex z) const {
  switch (kind) {
    case Kind::Identity: return {1.0, 0.0};
    case Kind::Square: return 2.0 * z;
    case Kind::Conformal: return eval_g(g, z);
  }
  return {1.0, 0.0};
}

GridField pushforward(const GridField& src, const PlaneMap& map,
                      const Grid& dst_grid) {
  GridField out = GridField::zeros(dst_grid);
  const Grid& S = src.grid;
  const double sub_area = (S.h / 4.0) * (S.h / 4.0);
  const double dst_area = dst_grid.h * dst_grid.h;
  for (int j = 0; j < S.ny; ++j)
    for (int i = 0; i < S.nx; ++i) {
      double v = src.values(i, j);
      if (v == 0.0) continue;
      for (int sj = 0; sj < 4; ++sj)
        for (int si = 0; si < 4; ++si) {
          double x = S.x0 + (i + (si + 0.5) / 4.0) * S.h;
          double y = S.y0 + (j + (sj + 0.5) / 4.0) * S.h;
          Complex w = map(Complex(x, y));
          int di, dj;
          if (!dst_grid.locate(w.real(), w.imag(), &di, &dj))
            throw OutOfRangeError("pushforward: image leaves the grid");
          out.values(di, dj) += v * sub_area / dst_area;
        }
    }
  return out;
}

GridField counting_density(const PGState& s, const Grid& dst_grid, int n_sub) {
  RationalMap g = s.g.reduced();
  GridField out = GridField::zeros(dst_grid);
  const double hs = 2.0 / n_sub;
  const double dst_area = dst_grid.h * dst_grid.h;
  for (int j = 0; j < n_sub; ++j)
    for (int i = 0; i < n_sub; ++i) {
      double x = -1.0 + (i + 0.5) * hs;
      double y = -1.0 + (j + 0.5) * hs;
      if (x * x + y * y >= 1.0) continue;
      Complex z(x, y);
      Complex w = eval_f(g, z);
      int di, dj;
      if (!dst_grid.locate(w.real(), w.imag(), &di, &dj))
        throw OutOfRangeError("counting_density: image leaves the grid");
      out.values(di, dj) += std::norm(eval_g(g, z)) * hs * hs / dst_area;
    }
  return out;
}

double compatibility_residual(const GridField& mu_src, const PlaneMap& p,
                              const GridField& lambda_dst, double tol) {
  const Grid& S = mu_src.grid;
  const Grid& D = lambda_dst.grid;

  // Lifted density |p'|^2 (lambda o p) on the source grid.
  GridField lifted = GridField::zeros(S);
  for (int j = 0; j < S.ny; ++j)
    for (int i = 0; i < S.nx; ++i) {
      Complex z(S.cx(i), S.cy(j));
      Complex w = p(z);
      int di, dj;
      double lam = D.locate(w.real(), w.imag(), &di, &dj)
                       ? lambda_dst.values(di, dj)
                       : 0.0;
      lifted.values(i, j) = std::norm(p.derivative(z)) * lam;
    }

  double scale_src = std::max(1.0, lifted.values.maxCoeff());
  BalayageOutcome up = bal(mu_src, lifted, tol * scale_src);
  GridField side_a_mu = pushforward(up.result, p, D);
  GridField side_b_mu = pushforward(mu_src, p, D);
  double scale_dst = std::max(1.0, lambda_dst.values.maxCoeff());
  BalayageOutcome a = bal(side_a_mu, lambda_dst, tol * scale_dst);
  BalayageOutcome b = bal(side_b_mu, lambda_dst, tol * scale_dst);
  return ((a.result.values - b.result.values).abs().sum()) * D.h * D.h;
}

}  // namespace pgflow
