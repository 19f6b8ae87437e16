#include "opshift/calculus.hpp"

#include <cmath>

#include "opshift/decomp.hpp"

namespace opshift {

Matrix eval_on_contraction(const LaurentPoly& f, const Matrix& t) {
  if (t.rows() != t.cols()) {
    throw InputError("eval_on_contraction: square matrix required");
  }
  const Eigen::Index n = t.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = f.coeff(0) * id;
  if (f.max_degree() > 0) {
    Matrix p = id;
    for (int k = 1; k <= f.max_degree(); ++k) {
      p = p * t;
      const Complex a = f.coeff(k);
      if (a != Complex(0.0)) out += a * p;
    }
  }
  if (f.min_degree() < 0) {
    const Matrix ta = t.adjoint();
    Matrix p = id;
    for (int k = 1; k <= -f.min_degree(); ++k) {
      p = p * ta;
      const Complex a = f.coeff(-k);
      if (a != Complex(0.0)) out += a * p;
    }
  }
  return out;
}

LineFn::LineFn(LaurentPoly circleRep) : rep_(circleRep.trimmed()) {
  if (!rep_.analytic()) {
    throw InputError("LineFn: circle representative must be analytic");
  }
}

Complex LineFn::operator()(double t) const { return rep_(cayley_point(t)); }

Complex LineFn::at_infinity() const { return rep_(Complex(1.0, 0.0)); }

Complex LineFn::derivative(double t) const {
  const Complex denom = Complex(t, 1.0);  // t + i
  const Complex zprime = Complex(0.0, 2.0) / (denom * denom);
  return rep_.derivative()(cayley_point(t)) * zprime;
}

Complex LineFn::cayley_point(double t) {
  return Complex(t, -1.0) / Complex(t, 1.0);
}

double LineFn::cayley_point_inverse(Complex z) {
  const Complex one(1.0, 0.0);
  if (std::abs(one - z) < 1e-14) {
    throw InputError("cayley_point_inverse: boundary point at infinity");
  }
  return (kI * (one + z) / (one - z)).real();
}

double LineFn::cayley_angle(double t) { return kPi + 2.0 * std::atan(t); }

double LineFn::cayley_angle_inverse(double theta) {
  if (theta <= 0.0 || theta >= kTwoPi) {
    throw InputError("cayley_angle_inverse: angle must lie in (0, 2 pi)");
  }
  return -1.0 / std::tan(0.5 * theta);
}

Matrix eval_on_dissipative(const LineFn& f, const Matrix& l) {
  return eval_on_contraction(f.circle_rep(), cayley_contraction(l));
}

}  // namespace opshift
