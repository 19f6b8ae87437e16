#include "opshift/doi.hpp"

#include "opshift/decomp.hpp"
#include "opshift/quadrature.hpp"

namespace opshift {

Matrix doi_spectral(const SchurSymbol& phi, const Matrix& x1, const Matrix& x0,
                    const Matrix& q, double normalityTol) {
  NormalEigen ne1 = normal_eigendecomposition(x1, normalityTol);
  NormalEigen ne0 = normal_eigendecomposition(x0, normalityTol);
  Matrix mixed = ne1.vectors.adjoint() * q * ne0.vectors;
  for (Eigen::Index i = 0; i < mixed.rows(); ++i) {
    for (Eigen::Index j = 0; j < mixed.cols(); ++j) {
      mixed(i, j) *= phi(ne1.values(i), ne0.values(j));
    }
  }
  return ne1.vectors * mixed * ne0.vectors.adjoint();
}

Matrix doi_semispectral(const LaurentPoly& f, const Matrix& t1, const Matrix& t0,
                        const Matrix& q) {
  const auto terms = haagerup_terms(f);
  Matrix out = Matrix::Zero(q.rows(), q.cols());
  for (const HaagerupTerm& term : terms) {
    out += eval_on_contraction(term.left, t1) * q * eval_on_contraction(term.right, t0);
  }
  return out;
}

Matrix lipschitz_difference(const LaurentPoly& f, const Matrix& t1, const Matrix& t0) {
  return doi_semispectral(f, t1, t0, t1 - t0);
}

Matrix parametric_derivative(const LaurentPoly& f, const Matrix& t0, const Matrix& k,
                             double t) {
  const Matrix tt = t0 + t * k;
  return doi_semispectral(f, tt, tt, k);
}

DoiTraceResult doi_trace(const LaurentPoly& f, const Matrix& t, const Matrix& k,
                         int grid, double tol) {
  DoiTraceResult out;
  out.traceValue = doi_semispectral(f, t, t, k).trace();

  const OperatorCircleMeasure em = semi_spectral_measure(t, grid, /*shifted=*/false, tol);
  out.mu.shifted = em.shifted;
  out.mu.density = Vector(grid);
  for (const CircleAtom& a : em.atoms) {
    out.mu.atoms.push_back({a.theta, (k * a.weight).trace()});
  }
  for (int j = 0; j < grid; ++j) {
    out.mu.density(j) = (k * em.density[static_cast<std::size_t>(j)]).trace();
  }

  const LaurentPoly fp = f.derivative();
  Complex integral(0.0);
  for (const ScalarAtom& a : out.mu.atoms) {
    integral += fp(std::exp(Complex(0.0, a.theta))) * a.mass;
  }
  for (int j = 0; j < grid; ++j) {
    const double th = circle_node(j, grid, out.mu.shifted);
    integral += fp(std::exp(Complex(0.0, th))) * out.mu.density(j) /
                static_cast<double>(grid);
  }
  out.identityResidual = std::abs(out.traceValue - integral);
  return out;
}

Matrix doi_dissipative_difference(const LineFn& f, const Matrix& l1, const Matrix& l0) {
  return lipschitz_difference(f.circle_rep(), cayley_contraction(l1),
                              cayley_contraction(l0));
}

}  // namespace opshift
