#pragma once

#include <vector>

#include "opshift/common.hpp"

namespace opshift {

/// Gauss-Legendre rule on the open interval (0, 1); weights sum to 1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// Uniform circle grid: theta_k = 2 pi (k + s)/m with s = 1/2 when shifted.
/// Shifted grids avoid theta = 0, where Cayley pullbacks to the line blow up.
double circle_node(int k, int m, bool shifted);

}  // namespace opshift
