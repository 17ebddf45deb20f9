#include "pgflow/quadrature.hpp"

#include <cmath>

namespace pgflow {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double a = 1.0, b = t;
      for (int k = 2; k <= n; ++k) {
        double c = ((2 * k - 1) * t * b - (k - 1) * a) / k;
        a = b;
        b = c;
      }
      p1 = b;
      dp = n * (t * b - a) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    {
      double a = 1.0, b = t;
      for (int k = 2; k <= n; ++k) {
        double c = ((2 * k - 1) * t * b - (k - 1) * a) / k;
        a = b;
        b = c;
      }
      dp = n * (t * b - a) / (t * t - 1.0);
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace pgflow
