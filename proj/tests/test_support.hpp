#pragma once

#include <vector>

#include "opshift/operators.hpp"
#include "opshift/ssf.hpp"

namespace opshift::testing {

/// Reduced quadrature for unit tests; the defaults are exercised by the
/// acceptance binary.
inline QuadratureSpec fast_spec() {
  QuadratureSpec s;
  s.tNodes = 32;
  s.thetaGrid = 512;
  s.pathSteps = 400;
  return s;
}

inline std::vector<TestFunction> analytic_battery(int maxPower = 3) {
  std::vector<TestFunction> fs;
  for (int p = 1; p <= maxPower; ++p) {
    fs.push_back(TestFunction::circle(LaurentPoly::monomial(p)));
  }
  return fs;
}

inline std::vector<TestFunction> laurent_battery(int maxPower = 3) {
  std::vector<TestFunction> fs = analytic_battery(maxPower);
  for (int p = 1; p <= maxPower; ++p) {
    fs.push_back(TestFunction::circle(LaurentPoly::monomial(-p)));
  }
  return fs;
}

inline std::vector<TestFunction> line_battery(int maxPower = 3) {
  std::vector<TestFunction> fs;
  for (int p = 1; p <= maxPower; ++p) {
    std::vector<Complex> c(static_cast<std::size_t>(p) + 1, Complex(0.0));
    c.back() = Complex(1.0);
    fs.push_back(TestFunction::line_polynomial(std::move(c)));
  }
  fs.push_back(TestFunction::line_cayley(LaurentPoly::monomial(1)));
  return fs;
}

inline std::vector<TestFunction> cayley_battery(int maxPower = 3) {
  std::vector<TestFunction> fs;
  for (int p = 1; p <= maxPower; ++p) {
    fs.push_back(TestFunction::line_cayley(LaurentPoly::monomial(p)));
  }
  return fs;
}

inline double max_relative(OperatorKind kind, const Matrix& a, const Matrix& b,
                           const SSFSample& xi,
                           const std::vector<TestFunction>& fs) {
  double m = 0.0;
  for (const TestFunction& f : fs) {
    m = std::max(m, verify_trace_formula(kind, a, b, f, xi).relative);
  }
  return m;
}

inline double max_absolute(OperatorKind kind, const Matrix& a, const Matrix& b,
                           const SSFSample& xi,
                           const std::vector<TestFunction>& fs) {
  double m = 0.0;
  for (const TestFunction& f : fs) {
    m = std::max(m, verify_trace_formula(kind, a, b, f, xi).absolute);
  }
  return m;
}

}  // namespace opshift::testing
