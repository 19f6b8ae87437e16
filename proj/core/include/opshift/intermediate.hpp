#pragma once

#include <vector>

#include "opshift/common.hpp"
#include "opshift/decomp.hpp"
#include "opshift/ssf.hpp"

namespace opshift {

/// SSF density for the pair {T, e^{iA} T} along T_t = e^{itA} T with A
/// Hermitian: a real circle density (plus exact point terms at unitary-part
/// atoms). Positive for A >= 0.
SSFSample ssf_unitary_factor(const Matrix& t, const Matrix& a,
                             const QuadratureSpec& spec);

/// SSF density for the pair {T, e^{-D} T} along T_t = e^{-tD} T with D >= 0:
/// purely imaginary circle density with nonnegative imaginary part (plus
/// exact point terms).
SSFSample ssf_positive_factor(const Matrix& t, const Matrix& d,
                              const QuadratureSpec& spec);

/// Intermediate contraction for a pair (T0, T1) with T1 T0^{-1} invertible:
/// T = U e^{-C_-} T0 = e^{-U C_+ U*} T1 where log|T1 T0^{-1}| = C_+ - C_-
/// and U is the polar unitary. xi0 pairs (T0, T) with nonnegative imaginary
/// part, xi1 pairs (T, T1) with nonpositive imaginary part, xi = xi0 + xi1.
struct IntermediateResult {
  Matrix t;
  double factorizationResidual0 = 0.0;  // ||T - U e^{-C_-} T0||
  double factorizationResidual1 = 0.0;  // ||T - e^{-U C_+ U*} T1||
  SSFSample xi0;
  SSFSample xi1;
  SSFSample xi;
  double minImXi0 = 0.0;
  double maxImXi1 = 0.0;
};
IntermediateResult intermediate_contraction(const Matrix& t0, const Matrix& t1,
                                            const QuadratureSpec& spec);

/// Rank-minimal perturbation making T0 + V and T1 + V invertible while
/// keeping both defect operators: V carries the kernel singular vectors onto
/// the cokernel ones.
struct FredholmRegularization {
  Matrix q;
  Matrix v;
  int rank = 0;
  double qSmallestSingular = 0.0;
  double defectIdentityResidual = 0.0;  // ||Q*Q - (T*T + V*V)||
};
FredholmRegularization fredholm_regularize(const Matrix& t, double tol = 1e-8);

/// intermediate_contraction after Fredholm regularization of both endpoints
/// when T0 (or T1 T0^{-1}) is singular.
IntermediateResult intermediate_general(const Matrix& t0, const Matrix& t1,
                                        const QuadratureSpec& spec);

/// Trace transfer between a contraction and its power dilation: compares
/// trace(f(W1)) - trace(f(W0)) against trace(f(T1)) - trace(f(T0)) for
/// Laurent test functions of degree <= order.
struct SchafferTransferReport {
  int order = 0;
  std::vector<std::string> labels;
  std::vector<double> discrepancies;
  double maxDiscrepancy = 0.0;
};
SchafferTransferReport ssf_schaffer_transfer(const Matrix& t0, const Matrix& t1,
                                             int order,
                                             const QuadratureSpec& spec);

/// SSF for the pair {U, T} of a unitary and a contraction through an
/// intermediate-contraction chain; positivity of the imaginary part and the
/// trace-formula residuals are returned with the sample.
struct UnitaryToContractionResult {
  IntermediateResult chain;
  double minImXi = 0.0;
};
UnitaryToContractionResult ssf_unitary_to_contraction(const Matrix& u,
                                                      const Matrix& t,
                                                      const QuadratureSpec& spec);

}  // namespace opshift
