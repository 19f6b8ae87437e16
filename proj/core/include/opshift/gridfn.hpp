#pragma once

#include <vector>

#include "opshift/common.hpp"

namespace opshift {

/// Samples of a function on a uniform circle grid of power-of-two size.
/// Fourier indices are carried in [-m/2, m/2); the Nyquist bin is assigned to
/// the negative side. Shifted grids (theta_k = 2 pi (k+1/2)/m) are supported
/// throughout, including in coefficient extraction.
class GridFunction {
 public:
  GridFunction(int m, bool shifted = false);
  GridFunction(RealVector values_on_default_grid) = delete;

  static GridFunction from_values(Vector values, bool shifted = false);

  int size() const { return static_cast<int>(values_.size()); }
  bool shifted() const { return shifted_; }
  double theta(int k) const;
  Complex zeta(int k) const;

  Complex& operator[](int k) { return values_[k]; }
  Complex operator[](int k) const { return values_[k]; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  Complex mean() const;

  /// Coefficient of z^n for n in [-m/2, m/2).
  Vector fourier_coefficients() const;
  static GridFunction from_coefficients(const Vector& coeffs, bool shifted);

  /// Analytic projection P+ (indices >= 0) and co-analytic projection P-
  /// (indices < 0). P+ + P- is the identity on grid functions.
  GridFunction riesz_positive() const;
  GridFunction riesz_negative() const;

 private:
  bool shifted_;
  Vector values_;
};

/// Truncated integrals of g over {|g| < t} against normalized Lebesgue
/// measure, for an ascending threshold list, with the tail products
/// t * m{|g| > t} that certify A-integrability empirically.
struct AIntegralResult {
  Complex value{0.0, 0.0};
  bool converged = false;
  std::vector<double> thresholds;
  std::vector<Complex> truncated;
  std::vector<double> tailProducts;
};
AIntegralResult a_integral(const GridFunction& g, const std::vector<double>& thresholds);

/// Real representative of an SSF sample modulo analytic functions:
///   xi_r = Re xi + i (P-(Im xi) - conj(P-(Im xi))),
/// which is real-valued, and xi - xi_r is analytic.
GridFunction realize_real_ssf(const GridFunction& xi);

}  // namespace opshift
