#pragma once

#include "opshift/common.hpp"
#include "opshift/laurent.hpp"

namespace opshift {

/// f(T) for a contraction T and Laurent f: nonnegative powers evaluate on T,
/// negative powers on adjoint powers (the semi-spectral functional calculus,
/// which agrees with the spectral one when T is unitary).
Matrix eval_on_contraction(const LaurentPoly& f, const Matrix& t);

/// Function on the real line given by an analytic circle representative
/// through the Cayley transform: f(t) = rep((t - i)/(t + i)).
class LineFn {
 public:
  explicit LineFn(LaurentPoly circleRep);

  const LaurentPoly& circle_rep() const { return rep_; }
  Complex operator()(double t) const;
  Complex at_infinity() const;       // rep(1)
  Complex derivative(double t) const;

  /// Boundary point (t - i)/(t + i) on the unit circle.
  static Complex cayley_point(double t);
  /// Inverse boundary map i(1 + z)/(1 - z); z must stay away from 1.
  static double cayley_point_inverse(Complex z);
  /// Circle angle of the Cayley image: theta(t) = pi + 2 atan(t) in (0, 2 pi).
  static double cayley_angle(double t);
  /// Inverse of cayley_angle: t(theta) = -cot(theta/2) for theta in (0, 2 pi).
  static double cayley_angle_inverse(double theta);

 private:
  LaurentPoly rep_;
};

/// f(L) for dissipative L: circle representative evaluated on the Cayley
/// transform of L.
Matrix eval_on_dissipative(const LineFn& f, const Matrix& l);

}  // namespace opshift
