#pragma once

#include <vector>

#include "opshift/common.hpp"

namespace opshift {

/// Finite Laurent polynomial sum_{n=nmin}^{nmax} a_n z^n.
class LaurentPoly {
 public:
  LaurentPoly() : nmin_(0), coeffs_(1, Complex(0.0)) {}
  LaurentPoly(int nmin, std::vector<Complex> coeffs);

  static LaurentPoly monomial(int n, Complex a = Complex(1.0));
  static LaurentPoly constant(Complex a);

  int min_degree() const { return nmin_; }
  int max_degree() const { return nmin_ + static_cast<int>(coeffs_.size()) - 1; }
  Complex coeff(int n) const;
  const std::vector<Complex>& coeffs() const { return coeffs_; }

  bool analytic() const;   // no nonzero coefficient below index 0
  bool is_zero(double tol = 0.0) const;

  Complex operator()(Complex z) const;
  LaurentPoly derivative() const;

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator*(Complex a) const;

  /// Trims leading/trailing coefficients below tol in magnitude.
  LaurentPoly trimmed(double tol = 0.0) const;

 private:
  int nmin_;
  std::vector<Complex> coeffs_;  // index i holds coefficient of z^(nmin_+i)
};

/// Divided difference (f(z) - f(w))/(z - w), continued as f'(z) on the
/// diagonal. For |z - w| < diagTol the power-sum form
///   d(z^n) = sum_{j=0}^{n-1} z^j w^{n-1-j}
/// (and its negative-index counterpart) is used, which is stable through the
/// diagonal. Negative powers require |z|,|w| bounded away from 0.
Complex divided_difference(const LaurentPoly& f, Complex z, Complex w,
                           double diagTol = 1e-7);

/// One separated term phi(z) * psi(w) of a finite Haagerup-type expansion.
struct HaagerupTerm {
  LaurentPoly left;   // phi, acts at z
  LaurentPoly right;  // psi, acts at w
};

/// Finite separated expansion of the divided difference of an analytic
/// polynomial f (degree N): terms are collected by powers of w,
///   d f(z,w) = sum_{k=0}^{N-1} phi_k(z) * w^k,
/// so there are at most N terms. Throws InputError for nonanalytic f.
std::vector<HaagerupTerm> haagerup_terms(const LaurentPoly& f);

}  // namespace opshift
