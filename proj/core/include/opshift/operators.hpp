#pragma once

#include <cstdint>
#include <string>

#include "opshift/common.hpp"

namespace opshift {

enum class OperatorKind { Contraction, Unitary, Hermitian, Dissipative };

std::string kind_name(OperatorKind kind);
OperatorKind kind_from_name(const std::string& name);

/// Validated operator: the matrix together with the class-membership residual
/// that was certified at construction time.
struct ClassifiedOperator {
  OperatorKind kind;
  Matrix m;
  double residual = 0.0;
};

/// Validates membership in the requested class.
///  - Contraction: norm <= 1; a norm in (1, 1+tol] is clamped by rescaling.
///  - Unitary: ||M*M - I|| <= tol.
///  - Hermitian: ||M - M*|| <= tol; the stored matrix is re-hermitized.
///  - Dissipative: lambda_min(Im M) >= -tol; Im part is not modified.
/// Throws InputError otherwise.
ClassifiedOperator classify(OperatorKind kind, Matrix m, double tol = kClassTol);

/// Seeded ensembles (deterministic for a fixed seed):
///  - Contraction: complex Ginibre rescaled so the largest singular value is 0.9.
///  - Unitary: QR of Ginibre with the R-diagonal phase fix (Haar-like).
///  - Hermitian: (G + G*)/2 with Ginibre G, entries O(1/sqrt(n)).
///  - Dissipative: H + iP with H as above and P = BB*/(2||BB*||) PSD.
Matrix random_ensemble(OperatorKind kind, int n, std::uint64_t seed);

}  // namespace opshift
