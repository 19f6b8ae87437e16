#pragma once

#include <functional>

#include "opshift/calculus.hpp"
#include "opshift/common.hpp"
#include "opshift/dilation.hpp"
#include "opshift/laurent.hpp"

namespace opshift {

using SchurSymbol = std::function<Complex(Complex, Complex)>;

/// Double operator integral against spectral measures of two normal
/// matrices: the entrywise (Schur) product of [phi(lambda_i, mu_j)] with Q
/// expressed in the two eigenbases. Throws InputError when either matrix
/// fails the normality check.
Matrix doi_spectral(const SchurSymbol& phi, const Matrix& x1, const Matrix& x0,
                    const Matrix& q, double normalityTol = 1e-9);

/// Double operator integral of the divided difference of an analytic
/// polynomial f against semi-spectral measures of two contractions, evaluated
/// through the finite separated expansion:
///   sum_k phi_k(T1) * Q * psi_k(T0).
Matrix doi_semispectral(const LaurentPoly& f, const Matrix& t1, const Matrix& t0,
                        const Matrix& q);

/// f(T1) - f(T0) realized as the DOI of the divided difference with
/// Q = T1 - T0 (the Lipschitz-type difference formula).
Matrix lipschitz_difference(const LaurentPoly& f, const Matrix& t1, const Matrix& t0);

/// Derivative of t -> f(T0 + tK) at parameter t, as the DOI of the divided
/// difference at the point T_t in both slots with increment K.
Matrix parametric_derivative(const LaurentPoly& f, const Matrix& t0, const Matrix& k,
                             double t);

/// trace(DOI(divided difference of f; T, T, K)) together with the scalar
/// measure mu(.) = trace(K E_T(.)), which satisfies
///   traceValue = integral of f' d(mu).
struct DoiTraceResult {
  Complex traceValue{0.0, 0.0};
  ScalarCircleMeasure mu;
  double identityResidual = 0.0;
};
DoiTraceResult doi_trace(const LaurentPoly& f, const Matrix& t, const Matrix& k,
                         int grid, double tol = 1e-8);

/// f(L1) - f(L0) for dissipative L0, L1 via the Cayley pullback of the
/// circle difference (equals the line DOI of the divided difference of f).
Matrix doi_dissipative_difference(const LineFn& f, const Matrix& l1, const Matrix& l0);

}  // namespace opshift
