// Gauss-Legendre rules on [-1,1].
#pragma once

#include <utility>
#include <vector>

namespace pgflow {

// Nodes and weights, computed by Newton iteration on the Legendre polynomial.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace pgflow
