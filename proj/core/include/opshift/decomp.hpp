#pragma once

#include <functional>

#include "opshift/common.hpp"

namespace opshift {

/// M = isometry * positive with positive = (M*M)^{1/2}.
/// For invertible M the isometry is unitary; otherwise it is the canonical
/// partial isometry with initial space range(positive), built from the
/// singular vectors with singular value > tol (phases canonicalized so the
/// result is deterministic).
struct PolarDecomposition {
  Matrix isometry;
  Matrix positive;
  int rank = 0;
};
PolarDecomposition polar_decompose(const Matrix& m, double tol = 1e-12);

/// C = log(P) for positive definite P, split into C = plus - minus with
/// plus, minus >= 0 and plus*minus = 0 (shared eigenbasis split by the sign
/// of log(lambda)).
struct HermitianLogSplit {
  Matrix log;
  Matrix plus;
  Matrix minus;
};
HermitianLogSplit hermitian_log_split(const Matrix& pd, double tol = 1e-12);

/// Defect operator D_T = (I - T*T)^{1/2}; eigenvalues of I - T*T clipped to
/// [0, inf) within tol, so D_T is PSD by construction. Throws if T is not a
/// contraction within tol.
Matrix defect_operator(const Matrix& t, double tol = 1e-8);

/// f applied to a Hermitian matrix through its eigendecomposition
/// (eigenvalues ascending).
Matrix hermitian_function(const Matrix& h, const std::function<Complex(double)>& f);

Matrix psd_sqrt(const Matrix& h, double tol = 1e-12);

/// Eigendecomposition of a normal matrix via the Schur form, which keeps the
/// eigenbasis orthonormal through degeneracies. Throws InputError when the
/// strict triangle of the Schur factor exceeds relTol * ||m||_F.
struct NormalEigen {
  Vector values;
  Matrix vectors;  // unitary, columns are eigenvectors
};
NormalEigen normal_eigendecomposition(const Matrix& m, double relTol = 1e-9);

/// Normal eigendecomposition sorted by principal argument of the eigenvalues
/// (ascending in (-pi, pi]).
NormalEigen unitary_eigendecomposition(const Matrix& u, double relTol = 1e-9);

/// f(M) for normal M via diagonalization. Principal branches are the
/// caller's responsibility inside f.
Matrix matfun(const Matrix& m, const std::function<Complex(Complex)>& f,
              double relTol = 1e-9);

/// Hermitian A with exp(iA) = U. Eigenphases are taken in the principal
/// window unless an eigenvalue sits within branchTol of the cut at -1, in
/// which case the cut is rotated to the midpoint of the largest spectral gap.
Matrix unitary_log(const Matrix& u, double branchTol = 1e-9);

/// Cayley transform A -> (A - iI)(A + iI)^{-1}. Maps Hermitian matrices to
/// unitaries and dissipative matrices to contractions.
Matrix cayley_contraction(const Matrix& a);

/// exp(i t A) for Hermitian A, exactly unitary by construction.
Matrix hermitian_phase(const Matrix& a, double t);

/// exp(-t D) for PSD D, exactly a PSD contraction by construction (t >= 0).
Matrix psd_decay(const Matrix& d, double t);

}  // namespace opshift
