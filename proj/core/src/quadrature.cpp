#include "opshift/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace opshift {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: need at least one node");
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
  // recurrence on [-1, 1]; weights come from the first eigenvector components.
  RealMatrix jacobi = RealMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(jacobi);
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double x = es.eigenvalues()(k);           // node on [-1, 1]
    const double w = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
    rule.nodes[k] = 0.5 * (x + 1.0);                // map to (0, 1)
    rule.weights[k] = 0.5 * w;                      // total weight 1
  }
  return rule;
}

double circle_node(int k, int m, bool shifted) {
  if (m <= 0) throw InputError("circle_node: grid size must be positive");
  const double s = shifted ? 0.5 : 0.0;
  return kTwoPi * (static_cast<double>(k) + s) / static_cast<double>(m);
}

}  // namespace opshift
