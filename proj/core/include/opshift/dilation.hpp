#pragma once

#include <vector>

#include "opshift/common.hpp"

namespace opshift {

/// Central window of the two-sided Schaffer dilation matrix, blocks indexed
/// by j, k in [-halfwidth, halfwidth]:
///   block(0,0) = T, block(0,1) = D_{T*}, block(-1,0) = D_T,
///   block(-1,1) = -T*, block(j,j+1) = I otherwise.
/// The window of a finite section is intentionally not unitary; it is a
/// diagnostic object. Use power_dilation for a genuinely unitary dilation.
struct SchafferWindow {
  int halfwidth = 0;
  int blockDim = 0;
  Matrix matrix;

  /// Block accessor with signed indices in [-halfwidth, halfwidth].
  Matrix block(int j, int k) const;
};
SchafferWindow schaffer_block(const Matrix& t, int halfwidth);

/// Checks that -T maps Ker D_T isometrically onto Ker D_{T*}.
struct KernelIsometryReport {
  int kernelDim = 0;
  int cokernelDim = 0;
  double normResidual = 0.0;      // max | ||Tx|| - ||x|| | over the kernel basis
  double rangeResidual = 0.0;     // distance of -T(Ker D_T) from Ker D_{T*}
  bool pass = false;
};
KernelIsometryReport kernel_isometry_check(const Matrix& t, double tol = 1e-8);

/// Unitary (N+1) x (N+1) block matrix W with block(0,0) = T, first block
/// column (T, D_T, 0, ..., 0), last block column (D_{T*}, -T*, 0, ..., 0) and
/// the block shift in between. Compressions satisfy block00(W^n) = T^n for
/// all 0 <= n <= N.
Matrix power_dilation(const Matrix& t, int n);

/// Decomposition of a contraction into its unitary and completely
/// non-unitary parts. The unitary subspace is the intersection of the defect
/// kernels of T^n and (T*)^n for n = 1..dim.
struct CnuSplit {
  Matrix unitaryBasis;  // d x k, orthonormal columns
  Matrix cnuBasis;      // d x (d-k)
  Matrix unitaryPart;   // k x k, unitary
  Matrix cnuPart;       // (d-k) x (d-k), spectral radius < 1
  double offBlockResidual = 0.0;
};
CnuSplit cnu_split(const Matrix& t, double tol = 1e-8);

/// Density of the semi-spectral measure of a cnu contraction against
/// normalized Lebesgue measure, via the closed form
///   K(theta) = (I - e^{-i theta} T)^{-1} + (I - e^{i theta} T*)^{-1} - I,
/// which is PSD and reproduces the moments T^n / (T*)^{|n|}.
Matrix poisson_density(const Matrix& t, double theta);

/// Spectral radius (largest |eigenvalue|).
double spectral_radius(const Matrix& t);

/// Matrix-valued measure on the circle: finitely many atoms plus density
/// samples on a uniform grid against normalized Lebesgue measure.
struct CircleAtom {
  double theta = 0.0;
  Matrix weight;  // PSD
};
struct OperatorCircleMeasure {
  std::vector<CircleAtom> atoms;
  bool shifted = false;
  std::vector<Matrix> density;  // size = grid

  int grid() const { return static_cast<int>(density.size()); }
  Matrix total_mass() const;
  /// Moment integral of z^n (atoms exactly, density by grid quadrature).
  Matrix moment(int n) const;
};

/// Semi-spectral measure of a contraction: atoms carry the spectral
/// projections of the unitary part (compressed back to the full space),
/// the density is the Poisson-type closed form of the cnu part.
OperatorCircleMeasure semi_spectral_measure(const Matrix& t, int grid,
                                            bool shifted = false,
                                            double tol = 1e-8);

/// Scalar (trace-valued) circle measure.
struct ScalarAtom {
  double theta = 0.0;
  Complex mass{0.0, 0.0};
};
struct ScalarCircleMeasure {
  std::vector<ScalarAtom> atoms;
  bool shifted = false;
  Vector density;

  int grid() const { return static_cast<int>(density.size()); }
  Complex total_mass() const;
  Complex moment(int n) const;
};

}  // namespace opshift
