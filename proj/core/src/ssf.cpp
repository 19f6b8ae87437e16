#include "opshift/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "opshift/decomp.hpp"
#include "opshift/matrix_io.hpp"
#include "opshift/quadrature.hpp"

namespace opshift {

std::string gauge_name(SsfGauge g) {
  switch (g) {
    case SsfGauge::Raw: return "raw";
    case SsfGauge::Counting: return "counting";
    case SsfGauge::RealPart: return "realpart";
  }
  throw InputError("unknown gauge");
}

std::string domain_name(SsfDomain d) {
  return d == SsfDomain::Circle ? "circle" : "line";
}

// ---------------------------------------------------------------------------
// Test functions

namespace {

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::string format_coeff(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string out = "(" + format_real(c.real());
  out += c.imag() >= 0.0 ? "+" : "-";
  out += format_real(std::abs(c.imag())) + "i)";
  return out;
}

std::string format_term(Complex c, const std::string& var, int n, bool first) {
  std::string sign;
  if (!first) {
    if (c.imag() == 0.0 && c.real() < 0.0) {
      sign = " - ";
      c = -c;
    } else {
      sign = " + ";
    }
  } else if (c.imag() == 0.0 && c.real() < 0.0) {
    sign = "-";
    c = -c;
  }
  std::string body;
  if (n == 0) {
    body = format_coeff(c);
  } else {
    const bool unit = (c == Complex(1.0, 0.0));
    body = unit ? "" : format_coeff(c) + " ";
    body += var;
    if (n != 1) body += "^" + std::to_string(n);
  }
  return sign + body;
}

std::string format_laurent(const LaurentPoly& f, const std::string& var) {
  const LaurentPoly g = f.trimmed();
  if (g.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (int n = g.min_degree(); n <= g.max_degree(); ++n) {
    const Complex c = g.coeff(n);
    if (c == Complex(0.0)) continue;
    out += format_term(c, var, n, first);
    first = false;
  }
  return out;
}

Complex unit_circle(double theta) {
  return Complex(std::cos(theta), std::sin(theta));
}

}  // namespace

TestFunction TestFunction::circle(LaurentPoly f) {
  TestFunction t;
  t.kind_ = Kind::CircleLaurent;
  t.laurent_ = f.trimmed();
  return t;
}

TestFunction TestFunction::line_polynomial(std::vector<Complex> coeffs) {
  TestFunction t;
  t.kind_ = Kind::LinePolynomial;
  t.polyCoeffs_ = std::move(coeffs);
  if (t.polyCoeffs_.empty()) t.polyCoeffs_.assign(1, Complex(0.0));
  return t;
}

TestFunction TestFunction::line_cayley(LaurentPoly circleRep) {
  TestFunction t;
  t.kind_ = Kind::LineCayley;
  t.laurent_ = circleRep.trimmed();
  if (!t.laurent_.analytic()) {
    throw InputError("line_cayley: analytic circle representative required");
  }
  return t;
}

std::string TestFunction::label() const {
  switch (kind_) {
    case Kind::CircleLaurent:
      return format_laurent(laurent_, "z");
    case Kind::LinePolynomial: {
      LaurentPoly p(0, polyCoeffs_);
      return format_laurent(p, "t");
    }
    case Kind::LineCayley:
      return "cayley[" + format_laurent(laurent_, "z") + "]";
  }
  throw InputError("unknown test function kind");
}

Complex TestFunction::eval_circle(Complex z) const {
  if (kind_ != Kind::CircleLaurent) {
    throw InputError("eval_circle: not a circle test function");
  }
  return laurent_(z);
}

Complex TestFunction::deriv_circle(Complex z) const {
  if (kind_ != Kind::CircleLaurent) {
    throw InputError("deriv_circle: not a circle test function");
  }
  return laurent_.derivative()(z);
}

Complex TestFunction::eval_line(double t) const {
  if (kind_ == Kind::LinePolynomial) {
    Complex acc(0.0);
    for (std::size_t j = polyCoeffs_.size(); j-- > 0;) {
      acc = acc * t + polyCoeffs_[j];
    }
    return acc;
  }
  if (kind_ == Kind::LineCayley) return LineFn(laurent_)(t);
  throw InputError("eval_line: not a line test function");
}

Complex TestFunction::deriv_line(double t) const {
  if (kind_ == Kind::LinePolynomial) {
    Complex acc(0.0);
    for (std::size_t j = polyCoeffs_.size(); j-- > 1;) {
      acc = acc * t + static_cast<double>(j) * polyCoeffs_[j];
    }
    return acc;
  }
  if (kind_ == Kind::LineCayley) return LineFn(laurent_).derivative(t);
  throw InputError("deriv_line: not a line test function");
}

Matrix TestFunction::apply(OperatorKind opKind, const Matrix& x) const {
  switch (kind_) {
    case Kind::CircleLaurent:
      if (opKind == OperatorKind::Contraction || opKind == OperatorKind::Unitary) {
        return eval_on_contraction(laurent_, x);
      }
      throw InputError("circle test function requires a circle-class operator");
    case Kind::LinePolynomial:
      if (opKind == OperatorKind::Hermitian) {
        return hermitian_function(x, [this](double l) { return eval_line(l); });
      }
      throw InputError("polynomial line test function requires a Hermitian operator");
    case Kind::LineCayley:
      if (opKind == OperatorKind::Hermitian) {
        return hermitian_function(x, [this](double l) { return eval_line(l); });
      }
      if (opKind == OperatorKind::Dissipative) {
        return eval_on_dissipative(LineFn(laurent_), x);
      }
      throw InputError("Cayley line test function requires a line-class operator");
  }
  throw InputError("unknown test function kind");
}

// ---------------------------------------------------------------------------
// Pairing and verification

Complex ssf_pairing(const SSFSample& xi, const TestFunction& f) {
  Complex acc(0.0);
  if (xi.domain == SsfDomain::Circle) {
    if (f.kind() != TestFunction::Kind::CircleLaurent) {
      throw InputError("ssf_pairing: circle sample requires a circle test function");
    }
    if (!xi.arcs.empty()) {
      for (const ArcTerm& a : xi.arcs) {
        acc += a.weight *
               (f.eval_circle(unit_circle(a.endPhase)) -
                f.eval_circle(unit_circle(a.startPhase)));
      }
    } else {
      const int m = static_cast<int>(xi.grid.size());
      if (m == 0) throw InputError("ssf_pairing: sample has no grid");
      for (int k = 0; k < m; ++k) {
        const Complex zeta = unit_circle(xi.grid(k));
        acc += kTwoPi * kI * zeta * f.deriv_circle(zeta) * xi.values(k) /
               static_cast<double>(m);
      }
    }
    for (const PointTerm& p : xi.pointTerms) {
      acc += p.coefficient * f.deriv_circle(p.location);
    }
  } else {
    if (f.kind() == TestFunction::Kind::CircleLaurent) {
      throw InputError("ssf_pairing: line sample requires a line test function");
    }
    if (!xi.jumps.empty()) {
      for (const LineJump& j : xi.jumps) {
        acc -= j.jump * f.eval_line(j.position);
      }
    } else {
      const int m = static_cast<int>(xi.grid.size());
      if (m == 0 || xi.weights.size() != xi.grid.size()) {
        throw InputError("ssf_pairing: line sample needs grid and weights");
      }
      for (int k = 0; k < m; ++k) {
        acc += xi.weights(k) * f.deriv_line(xi.grid(k)) * xi.values(k);
      }
    }
    for (const PointTerm& p : xi.pointTerms) {
      acc += p.coefficient * f.deriv_line(p.location.real());
    }
  }
  return acc;
}

VerifyResult verify_trace_formula(OperatorKind opKind, const Matrix& x0,
                                  const Matrix& x1, const TestFunction& f,
                                  const SSFSample& xi) {
  VerifyResult r;
  r.traceLhs = f.apply(opKind, x1).trace() - f.apply(opKind, x0).trace();
  r.integralRhs = ssf_pairing(xi, f);
  r.absolute = std::abs(r.traceLhs - r.integralRhs);
  r.relative = r.absolute / std::max(1.0, std::abs(r.traceLhs));
  return r;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

void require_square_pair(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InputError(std::string(who) + ": matching square matrices required");
  }
}

void require_contraction(const Matrix& t, const char* who) {
  if (operator_norm(t) > 1.0 + 1e-6) {
    throw InputError(std::string(who) + ": operator norm exceeds 1");
  }
}

int checked_grid(int m, const char* who) {
  if (m < 8 || (m & (m - 1)) != 0) {
    throw InputError(std::string(who) + ": theta grid must be a power of two >= 8");
  }
  return m;
}

/// Adds w * (Fourier coefficients of the scalar cnu measure trace(K E(.)))
/// into c, whose index i carries the coefficient of z^(i - M/2). Coefficients
/// are trace(K T^|n|) for n <= 0 and trace(K (T*)^n) for n >= 1; both sides
/// share one power chain.
void accumulate_cnu_coefficients(Vector& c, const Matrix& tc, const Matrix& kc,
                                 double w) {
  const int m = static_cast<int>(c.size());
  const int cap = m / 2 - 1;
  const Eigen::Index d = tc.rows();
  if (d == 0) return;
  c(m / 2) += w * kc.trace();
  const Matrix ka = kc.adjoint();
  const double kn = kc.norm();
  Matrix p = Matrix::Identity(d, d);
  for (int j = 1; j <= cap; ++j) {
    p = p * tc;
    c(m / 2 - j) += w * (kc * p).trace();
    c(m / 2 + j) += w * std::conj((ka * p).trace());
    if (p.norm() * kn < 1e-18) break;
  }
}

std::vector<double> sorted_phases(const Matrix& u) {
  NormalEigen ne = unitary_eigendecomposition(u);
  std::vector<double> ph(static_cast<std::size_t>(ne.values.size()));
  for (Eigen::Index k = 0; k < ne.values.size(); ++k) {
    ph[static_cast<std::size_t>(k)] = wrap_angle_positive(std::arg(ne.values(k)));
  }
  std::sort(ph.begin(), ph.end());
  return ph;
}

/// Advances the lifted phase trajectories to the sorted phase list `ph`,
/// matching by the cyclic offset with the smallest worst displacement.
/// Returns the margin to the second-best offset.
double advance_lifted_phases(std::vector<double>& lifted,
                             const std::vector<double>& ph, const char* who) {
  const std::size_t d = lifted.size();
  std::size_t bestO = 0;
  double bestCost = std::numeric_limits<double>::infinity();
  double secondCost = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < d; ++o) {
    double cost = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      cost = std::max(cost, std::abs(wrap_angle(ph[(j + o) % d] - lifted[j])));
    }
    if (cost < bestCost) {
      secondCost = bestCost;
      bestCost = cost;
      bestO = o;
    } else {
      secondCost = std::min(secondCost, cost);
    }
  }
  if (bestCost > 0.5 * kPi) {
    throw ConvergenceError(std::string(who) +
                           ": eigenphase step too large; increase path steps");
  }
  for (std::size_t j = 0; j < d; ++j) {
    lifted[j] += wrap_angle(ph[(j + bestO) % d] - lifted[j]);
  }
  return secondCost - bestCost;
}

double counting_from_arcs(const std::vector<ArcTerm>& arcs, double theta) {
  double v = 0.0;
  for (const ArcTerm& a : arcs) {
    v += a.weight * (std::floor((a.endPhase - theta) / kTwoPi) -
                     std::floor((a.startPhase - theta) / kTwoPi));
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Contraction pairs

SSFSample ssf_contraction_pair(const Matrix& t0, const Matrix& t1,
                               const QuadratureSpec& spec) {
  require_square_pair(t0, t1, "ssf_contraction_pair");
  require_contraction(t0, "ssf_contraction_pair");
  require_contraction(t1, "ssf_contraction_pair");
  const int m = checked_grid(spec.thetaGrid, "ssf_contraction_pair");
  if (spec.tNodes < 1) throw InputError("ssf_contraction_pair: tNodes must be >= 1");

  SSFSample out;
  out.domain = SsfDomain::Circle;
  out.gauge = SsfGauge::Raw;
  out.shiftedGrid = spec.shiftedGrid;
  out.grid = RealVector(m);
  for (int k = 0; k < m; ++k) out.grid(k) = circle_node(k, m, spec.shiftedGrid);
  out.values = Vector::Zero(m);

  const Matrix k = t1 - t0;
  if (k.norm() == 0.0) {
    out.diagnostics["atom_leak_max"] = 0.0;
    out.diagnostics["spectral_radius_max"] = 0.0;
    return out;
  }

  const GaussLegendre rule = gauss_legendre(spec.tNodes);
  Vector coeffs = Vector::Zero(m);
  double atomLeak = 0.0;
  double srMax = 0.0;
  for (int j = 0; j < spec.tNodes; ++j) {
    const Matrix tt = t0 + rule.nodes[static_cast<std::size_t>(j)] * k;
    const CnuSplit split = cnu_split(tt, spec.tolerance);
    if (split.unitaryPart.rows() > 0) {
      NormalEigen ue = unitary_eigendecomposition(split.unitaryPart);
      for (Eigen::Index a = 0; a < ue.values.size(); ++a) {
        const Vector v = split.unitaryBasis * ue.vectors.col(a);
        atomLeak = std::max(atomLeak, std::abs(v.dot(k * v)));
      }
    }
    const Matrix kc = split.cnuBasis.adjoint() * k * split.cnuBasis;
    srMax = std::max(srMax, spectral_radius(split.cnuPart));
    accumulate_cnu_coefficients(coeffs, split.cnuPart, kc,
                                rule.weights[static_cast<std::size_t>(j)]);
  }
  if (atomLeak > 1e-8 * (1.0 + k.norm())) {
    throw ConvergenceError(
        "ssf_contraction_pair: unitary-part atoms carry trace mass; the pair "
        "has a singular component along the path");
  }

  const GridFunction eta = GridFunction::from_coefficients(coeffs, spec.shiftedGrid);
  for (int i = 0; i < m; ++i) {
    out.values(i) = eta[i] / (kTwoPi * kI * unit_circle(out.grid(i)));
  }
  out.diagnostics["atom_leak_max"] = atomLeak;
  out.diagnostics["spectral_radius_max"] = srMax;
  out.diagnostics["coeff_edge_max"] =
      std::max(std::abs(coeffs(1)), std::abs(coeffs(m - 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Unitary pairs

SSFSample ssf_unitary_pair(const Matrix& u0, const Matrix& u1,
                           const QuadratureSpec& spec) {
  require_square_pair(u0, u1, "ssf_unitary_pair");
  if (unitary_residual(u0) > 1e-8 || unitary_residual(u1) > 1e-8) {
    throw InputError("ssf_unitary_pair: unitary matrices required");
  }
  const int m = checked_grid(spec.thetaGrid, "ssf_unitary_pair");
  const int steps = std::max(spec.pathSteps, 1);
  const std::size_t d = static_cast<std::size_t>(u0.rows());

  const Matrix a = unitary_log(u1 * u0.adjoint());
  const std::vector<double> start = sorted_phases(u0);
  std::vector<double> lifted = start;
  double minMargin = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps);
    const Matrix u = hermitian_phase(a, t) * u0;
    const double margin =
        advance_lifted_phases(lifted, sorted_phases(u), "ssf_unitary_pair");
    if (d > 1) minMargin = std::min(minMargin, margin);
  }
  // Snap the endpoint to the exact eigenphases of u1; the path only decides
  // the winding integers.
  advance_lifted_phases(lifted, sorted_phases(u1), "ssf_unitary_pair");

  SSFSample out;
  out.domain = SsfDomain::Circle;
  out.gauge = SsfGauge::Counting;
  out.shiftedGrid = spec.shiftedGrid;
  out.arcs.reserve(d);
  double winding = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    out.arcs.push_back({start[j], lifted[j], 1.0});
    winding += (lifted[j] - start[j]) / kTwoPi;
  }
  out.grid = RealVector(m);
  out.values = Vector(m);
  for (int i = 0; i < m; ++i) {
    out.grid(i) = circle_node(i, m, spec.shiftedGrid);
    out.values(i) = Complex(counting_from_arcs(out.arcs, out.grid(i)), 0.0);
  }
  if (d > 1) out.diagnostics["matching_margin_min"] = minMargin;
  out.diagnostics["total_phase_flow"] = winding;
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian pairs

SSFSample ssf_selfadjoint_pair(const Matrix& a0, const Matrix& a1,
                               const QuadratureSpec& spec) {
  require_square_pair(a0, a1, "ssf_selfadjoint_pair");
  if (hermitian_residual(a0) > 1e-8 || hermitian_residual(a1) > 1e-8) {
    throw InputError("ssf_selfadjoint_pair: Hermitian matrices required");
  }
  const int m = checked_grid(spec.thetaGrid, "ssf_selfadjoint_pair");
  const Eigen::Index n = a0.rows();

  Eigen::SelfAdjointEigenSolver<Matrix> es0(0.5 * (a0 + a0.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es1(0.5 * (a1 + a1.adjoint()));
  std::vector<LineJump> jumps;
  jumps.reserve(static_cast<std::size_t>(2 * n));
  for (Eigen::Index j = 0; j < n; ++j) jumps.push_back({es0.eigenvalues()(j), 1.0});
  for (Eigen::Index j = 0; j < n; ++j) jumps.push_back({es1.eigenvalues()(j), -1.0});
  std::stable_sort(jumps.begin(), jumps.end(),
                   [](const LineJump& x, const LineJump& y) {
                     return x.position < y.position;
                   });

  SSFSample out;
  out.domain = SsfDomain::Line;
  out.gauge = SsfGauge::Counting;
  out.shiftedGrid = true;  // the pullback grid must avoid theta = 0
  out.jumps = std::move(jumps);
  out.grid = RealVector(m);
  out.values = Vector(m);
  out.weights = RealVector(m);
  const RealVector& e0 = es0.eigenvalues();
  const RealVector& e1 = es1.eigenvalues();
  auto countUpTo = [](const RealVector& e, double t) {
    int c = 0;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      if (e(j) <= t) ++c;
    }
    return c;
  };
  for (int k = 0; k < m; ++k) {
    const double theta = circle_node(k, m, true);
    const double t = LineFn::cayley_angle_inverse(theta);
    out.grid(k) = t;
    out.values(k) = Complex(countUpTo(e0, t) - countUpTo(e1, t), 0.0);
    out.weights(k) = kPi * (1.0 + t * t) / static_cast<double>(m);
  }

  // Cross-check the jump pairing against the unitary-pair pipeline applied to
  // the Cayley transforms, using the transform itself as test function.
  const SSFSample circleXi =
      ssf_unitary_pair(cayley_contraction(a0), cayley_contraction(a1), spec);
  const Complex viaCircle =
      ssf_pairing(circleXi, TestFunction::circle(LaurentPoly::monomial(1)));
  Complex viaLine(0.0);
  for (const LineJump& j : out.jumps) {
    viaLine -= j.jump * LineFn::cayley_point(j.position);
  }
  out.diagnostics["cayley_crosscheck"] = std::abs(viaCircle - viaLine);
  return out;
}

// ---------------------------------------------------------------------------
// Determinant realizations

Complex perturbation_determinant(const Matrix& a0, const Matrix& a1, Complex z) {
  require_square_pair(a0, a1, "perturbation_determinant");
  const Eigen::Index n = a0.rows();
  const Matrix id = Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> lu(a0 - z * id);
  const Matrix mm = id + (a1 - a0) * lu.solve(id);
  return mm.determinant();
}

DeterminantSsfResult ssf_via_determinant(const Matrix& a0, const Matrix& a1,
                                         double t, std::vector<double> yLadder) {
  if (yLadder.size() < 2) {
    throw InputError("ssf_via_determinant: ladder needs at least two heights");
  }
  for (std::size_t i = 0; i < yLadder.size(); ++i) {
    if (yLadder[i] <= 0.0) {
      throw InputError("ssf_via_determinant: ladder heights must be positive");
    }
    if (i > 0 && yLadder[i] >= yLadder[i - 1]) {
      throw InputError("ssf_via_determinant: ladder must strictly descend");
    }
  }

  DeterminantSsfResult res;
  const Complex top = perturbation_determinant(a0, a1, Complex(t, yLadder[0]));
  if (std::abs(top) == 0.0) {
    throw ConvergenceError("ssf_via_determinant: determinant vanished");
  }
  double prevY = yLadder[0];
  double prevPhi = std::arg(top);
  res.ladder.push_back(prevY);
  res.imLog.push_back(prevPhi);

  std::vector<double> pending(yLadder.rbegin(), yLadder.rend());
  pending.pop_back();  // the top height is consumed
  int inserted = 0;
  while (!pending.empty()) {
    const double y = pending.back();
    const Complex det = perturbation_determinant(a0, a1, Complex(t, y));
    if (std::abs(det) == 0.0) {
      throw ConvergenceError("ssf_via_determinant: determinant vanished");
    }
    const double arg = std::arg(det);
    const double lifted = arg + kTwoPi * std::round((prevPhi - arg) / kTwoPi);
    if (std::abs(lifted - prevPhi) > 0.5 * kPi) {
      const double mid = std::sqrt(prevY * y);
      if (!(mid < prevY && mid > y) || ++inserted > 512) {
        throw ConvergenceError(
            "ssf_via_determinant: branch tracking failed between ladder points");
      }
      pending.push_back(mid);
      continue;
    }
    prevPhi = lifted;
    prevY = y;
    pending.pop_back();
    res.ladder.push_back(y);
    res.imLog.push_back(lifted);
  }
  res.value = prevPhi / kPi;
  res.converged = true;
  return res;
}

Complex langer_contour_trace(const LaurentPoly& f, const Matrix& t0,
                             const Matrix& t1, Complex center, double radius,
                             int nodes) {
  require_square_pair(t0, t1, "langer_contour_trace");
  if (nodes < 8) throw InputError("langer_contour_trace: too few contour nodes");
  if (radius <= 0.0) throw InputError("langer_contour_trace: radius must be positive");
  if (f.trimmed().min_degree() < 0) {
    throw InputError("langer_contour_trace: analytic test function required");
  }
  const LaurentPoly fp = f.derivative();
  const Eigen::Index n = t0.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix k = t1 - t0;

  Complex acc(0.0);
  double firstArg = 0.0;
  double prevArg = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double phi = kTwoPi * j / nodes;
    const Complex dir = unit_circle(phi);
    const Complex z = center + radius * dir;
    Eigen::PartialPivLU<Matrix> lu(t0 - z * id);
    const Complex det = (id + k * lu.solve(id)).determinant();
    if (std::abs(det) == 0.0) {
      throw ConvergenceError("langer_contour_trace: determinant vanished on contour");
    }
    const double arg = std::arg(det);
    double lifted = arg;
    if (j == 0) {
      firstArg = arg;
    } else {
      lifted = arg + kTwoPi * std::round((prevArg - arg) / kTwoPi);
      if (std::abs(lifted - prevArg) > 0.5 * kPi) {
        throw ConvergenceError(
            "langer_contour_trace: log branch step too large; increase nodes");
      }
    }
    prevArg = lifted;
    acc += fp(z) * Complex(std::log(std::abs(det)), lifted) * radius * dir;
  }
  const double closing = firstArg + kTwoPi * std::round((prevArg - firstArg) / kTwoPi);
  if (std::abs(closing - prevArg) > 0.5 * kPi) {
    throw ConvergenceError("langer_contour_trace: log branch does not close");
  }
  if (std::abs(closing - firstArg) > kPi) {
    throw ConvergenceError("langer_contour_trace: nonzero winding of log det");
  }
  // acc/nodes realizes (1/2 pi i) * contour integral of f'(z) log det dz;
  // integrating by parts against the single-valued branch flips the sign of
  // the resolvent-trace representation of the trace difference.
  return -acc / static_cast<double>(nodes);
}

// ---------------------------------------------------------------------------
// Dissipative pairs

namespace {

void require_dissipative(const Matrix& l, const char* who) {
  const Matrix im = (l - l.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(im);
  if (l.rows() > 0 && es.eigenvalues()(0) < -1e-8) {
    throw InputError(std::string(who) + ": matrix is not dissipative");
  }
}

/// Converts a circle point term at exp(i theta) into the equivalent line
/// point term under the Cayley pullback.
PointTerm circle_point_to_line(double theta, Complex mass) {
  const double t = LineFn::cayley_angle_inverse(wrap_angle_positive(theta));
  const Complex shift(t, 1.0);  // t + i
  return {Complex(t, 0.0), mass * shift * shift / Complex(0.0, 2.0)};
}

}  // namespace

SSFSample ssf_dissipative_resolvent_pair(const Matrix& l0, const Matrix& l1,
                                         const QuadratureSpec& spec) {
  require_square_pair(l0, l1, "ssf_dissipative_resolvent_pair");
  require_dissipative(l0, "ssf_dissipative_resolvent_pair");
  require_dissipative(l1, "ssf_dissipative_resolvent_pair");

  QuadratureSpec inner = spec;
  inner.shiftedGrid = true;  // keep the pullback away from theta = 0
  const SSFSample circ = ssf_contraction_pair(cayley_contraction(l0),
                                              cayley_contraction(l1), inner);
  const int m = static_cast<int>(circ.grid.size());
  SSFSample out;
  out.domain = SsfDomain::Line;
  out.gauge = SsfGauge::Raw;
  out.shiftedGrid = true;
  out.grid = RealVector(m);
  out.values = circ.values;
  out.weights = RealVector(m);
  for (int k = 0; k < m; ++k) {
    const double t = LineFn::cayley_angle_inverse(circ.grid(k));
    out.grid(k) = t;
    out.weights(k) = kPi * (1.0 + t * t) / static_cast<double>(m);
  }
  for (const PointTerm& p : circ.pointTerms) {
    out.pointTerms.push_back(circle_point_to_line(std::arg(p.location), p.coefficient));
  }
  out.diagnostics = circ.diagnostics;
  return out;
}

SSFSample ssf_dissipative_additive(const Matrix& l0, const Matrix& l1,
                                   const QuadratureSpec& spec) {
  require_square_pair(l0, l1, "ssf_dissipative_additive");
  require_dissipative(l0, "ssf_dissipative_additive");
  require_dissipative(l1, "ssf_dissipative_additive");
  const int m = checked_grid(spec.thetaGrid, "ssf_dissipative_additive");
  if (spec.tNodes < 1) throw InputError("ssf_dissipative_additive: tNodes must be >= 1");

  const Eigen::Index n = l0.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix k = l1 - l0;
  const GaussLegendre rule = gauss_legendre(spec.tNodes);

  Vector coeffs = Vector::Zero(m);
  std::vector<PointTerm> pts;
  double srMax = 0.0;
  for (int j = 0; j < spec.tNodes; ++j) {
    const double s = rule.nodes[static_cast<std::size_t>(j)];
    const double w = rule.weights[static_cast<std::size_t>(j)];
    const Matrix l = l0 + s * k;
    Eigen::PartialPivLU<Matrix> lu(l + kI * id);
    const Matrix rinv = lu.solve(id);
    const Matrix c = (l - kI * id) * rinv;
    // d/ds cayley(L_s) = 2i (L+i)^{-1} K (L+i)^{-1}; the scalar measure below
    // carries trace(Ktilde E(.)) for the Cayley transform.
    const Matrix ktil = 2.0 * kI * (rinv * k * rinv);
    const CnuSplit split = cnu_split(c, spec.tolerance);
    if (split.unitaryPart.rows() > 0) {
      NormalEigen ue = unitary_eigendecomposition(split.unitaryPart);
      for (Eigen::Index a = 0; a < ue.values.size(); ++a) {
        const Vector v = split.unitaryBasis * ue.vectors.col(a);
        const Complex mass = v.dot(ktil * v);
        if (std::abs(mass) > 1e-14) {
          pts.push_back(circle_point_to_line(std::arg(ue.values(a)), w * mass));
        }
      }
    }
    const Matrix kc = split.cnuBasis.adjoint() * ktil * split.cnuBasis;
    srMax = std::max(srMax, spectral_radius(split.cnuPart));
    accumulate_cnu_coefficients(coeffs, split.cnuPart, kc, w);
  }

  const GridFunction eta = GridFunction::from_coefficients(coeffs, true);
  SSFSample out;
  out.domain = SsfDomain::Line;
  out.gauge = SsfGauge::Raw;
  out.shiftedGrid = true;
  out.grid = RealVector(m);
  out.values = Vector(m);
  out.weights = RealVector(m);
  for (int i = 0; i < m; ++i) {
    const double theta = circle_node(i, m, true);
    const double t = LineFn::cayley_angle_inverse(theta);
    out.grid(i) = t;
    out.values(i) = eta[i] / (kTwoPi * kI * unit_circle(theta));
    out.weights(i) = kPi * (1.0 + t * t) / static_cast<double>(m);
  }
  out.pointTerms = std::move(pts);
  out.diagnostics["spectral_radius_max"] = srMax;
  out.diagnostics["atom_count"] = static_cast<double>(out.pointTerms.size());
  return out;
}

// ---------------------------------------------------------------------------
// Absolute continuity diagnostics

BrothersRieszReport brothers_riesz_check(const ScalarCircleMeasure& nu,
                                         const SSFSample& xi, int maxIndex) {
  if (xi.domain != SsfDomain::Circle) {
    throw InputError("brothers_riesz_check: circle sample required");
  }
  if (maxIndex < 1) throw InputError("brothers_riesz_check: maxIndex must be >= 1");
  BrothersRieszReport rep;
  for (int m = 1; m <= maxIndex; ++m) {
    // The pairing with f' = z^m reads off the -(m) coefficient of nu - xi dzeta.
    const TestFunction f = TestFunction::circle(
        LaurentPoly::monomial(m + 1, Complex(1.0 / (m + 1), 0.0)));
    const Complex c = nu.moment(m) - ssf_pairing(xi, f);
    rep.indices.push_back(-m);
    rep.coefficients.push_back(c);
    rep.maxAbs = std::max(rep.maxAbs, std::abs(c));
  }
  return rep;
}

AIntegralTraceReport a_integral_trace(const Matrix& t0, const Matrix& t1,
                                      const LaurentPoly& f,
                                      const QuadratureSpec& spec,
                                      const std::vector<double>& thresholds) {
  if (!f.trimmed().analytic()) {
    throw InputError("a_integral_trace: analytic test function required");
  }
  const SSFSample xi = ssf_contraction_pair(t0, t1, spec);
  const int m = static_cast<int>(xi.grid.size());
  const GridFunction xg = GridFunction::from_values(xi.values, xi.shiftedGrid);
  const LaurentPoly fp = f.derivative();

  auto weighted = [&](const GridFunction& g) {
    GridFunction h(m, xi.shiftedGrid);
    for (int i = 0; i < m; ++i) {
      const Complex zeta = unit_circle(h.theta(i));
      h[i] = fp(zeta) * g[i] * kTwoPi * kI * zeta;
    }
    return h;
  };

  AIntegralTraceReport rep;
  rep.negativeDetail = a_integral(weighted(xg.riesz_negative()), thresholds);
  rep.realizedDetail = a_integral(weighted(realize_real_ssf(xg)), thresholds);
  rep.viaNegativeProjection = rep.negativeDetail.value;
  rep.viaRealized = rep.realizedDetail.value;
  rep.analyticPart = weighted(xg.riesz_positive()).mean();
  rep.converged = rep.negativeDetail.converged && rep.realizedDetail.converged;
  return rep;
}

// ---------------------------------------------------------------------------
// CSV interchange

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void csv_row(std::string& out, double a, Complex v) {
  out += fmt17(a);
  out += ',';
  out += fmt17(v.real());
  out += ',';
  out += fmt17(v.imag());
  out += '\n';
}

struct CsvRow {
  double a = 0.0;
  Complex v{0.0, 0.0};
};

std::vector<CsvRow> parse_csv_rows(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("theta_or_t") != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    CsvRow row;
    double im = 0.0, re = 0.0;
    char* end = nullptr;
    const char* p = line.c_str();
    row.a = std::strtod(p, &end);
    if (end == p || *end != ',') throw InputError("ssf_from_csv: malformed row: " + line);
    p = end + 1;
    re = std::strtod(p, &end);
    if (end == p || *end != ',') throw InputError("ssf_from_csv: malformed row: " + line);
    p = end + 1;
    im = std::strtod(p, &end);
    if (end == p) throw InputError("ssf_from_csv: malformed row: " + line);
    row.v = Complex(re, im);
    rows.push_back(row);
  }
  if (rows.size() < 2) throw InputError("ssf_from_csv: need at least two rows");
  return rows;
}

}  // namespace

std::string ssf_to_csv(const SSFSample& xi) {
  std::string out = "theta_or_t,re_xi,im_xi\n";
  if (xi.gauge == SsfGauge::Counting && xi.domain == SsfDomain::Circle) {
    // Step graph on [0, 2 pi] with duplicated abscissae at the jumps.
    std::vector<double> bp;
    for (const ArcTerm& a : xi.arcs) {
      bp.push_back(wrap_angle_positive(a.startPhase));
      bp.push_back(wrap_angle_positive(a.endPhase));
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    if (bp.empty() || bp.front() > 0.0) bp.insert(bp.begin(), 0.0);
    double prev = bp.front();
    double value = bp.size() > 1 ? counting_from_arcs(xi.arcs, 0.5 * (prev + bp[1]))
                                 : counting_from_arcs(xi.arcs, prev + kPi);
    csv_row(out, prev, Complex(value, 0.0));
    for (std::size_t i = 1; i < bp.size(); ++i) {
      const double mid = 0.5 * (prev + bp[i]);
      const double v = counting_from_arcs(xi.arcs, mid);
      if (v != value) {
        csv_row(out, prev, Complex(v, 0.0));
        value = v;
      }
      csv_row(out, bp[i], Complex(value, 0.0));
      prev = bp[i];
    }
    const double tailMid = 0.5 * (prev + kTwoPi);
    const double v = counting_from_arcs(xi.arcs, tailMid);
    if (v != value) csv_row(out, prev, Complex(v, 0.0));
    csv_row(out, kTwoPi, Complex(v, 0.0));
    return out;
  }
  if (xi.gauge == SsfGauge::Counting && xi.domain == SsfDomain::Line) {
    // Consolidate jumps by position, then write the step graph.
    std::vector<LineJump> js = xi.jumps;
    std::stable_sort(js.begin(), js.end(), [](const LineJump& x, const LineJump& y) {
      return x.position < y.position;
    });
    double value = 0.0;
    std::size_t i = 0;
    while (i < js.size()) {
      double jump = js[i].jump;
      std::size_t j = i + 1;
      while (j < js.size() && js[j].position == js[i].position) {
        jump += js[j].jump;
        ++j;
      }
      if (jump != 0.0) {
        csv_row(out, js[i].position, Complex(value, 0.0));
        value += jump;
        csv_row(out, js[i].position, Complex(value, 0.0));
      }
      i = j;
    }
    return out;
  }
  for (Eigen::Index k = 0; k < xi.grid.size(); ++k) {
    csv_row(out, xi.grid(k), xi.values(k));
  }
  return out;
}

SSFSample ssf_from_csv(const std::string& text, OperatorKind pairKind) {
  const std::vector<CsvRow> rows = parse_csv_rows(text);
  SSFSample out;
  switch (pairKind) {
    case OperatorKind::Hermitian: {
      out.domain = SsfDomain::Line;
      out.gauge = SsfGauge::Counting;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i + 1].a == rows[i].a) {
          const double jump = (rows[i + 1].v - rows[i].v).real();
          if (jump != 0.0) out.jumps.push_back({rows[i].a, jump});
        }
      }
      if (out.jumps.empty()) {
        throw InputError("ssf_from_csv: no jump structure in counting sample");
      }
      break;
    }
    case OperatorKind::Unitary: {
      out.domain = SsfDomain::Circle;
      out.gauge = SsfGauge::Counting;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i + 1].a > rows[i].a) {
          const double v = rows[i].v.real();
          if (v != 0.0) out.arcs.push_back({rows[i].a, rows[i + 1].a, v});
        }
      }
      if (out.arcs.empty()) {
        // A constant zero sample still needs one (empty) arc so the pairing
        // short-circuits to the exact branch.
        out.arcs.push_back({0.0, 0.0, 0.0});
      }
      break;
    }
    case OperatorKind::Contraction: {
      out.domain = SsfDomain::Circle;
      out.gauge = SsfGauge::Raw;
      const int m = static_cast<int>(rows.size());
      out.grid = RealVector(m);
      out.values = Vector(m);
      const double step = kTwoPi / m;
      for (int k = 0; k < m; ++k) {
        out.grid(k) = rows[static_cast<std::size_t>(k)].a;
        out.values(k) = rows[static_cast<std::size_t>(k)].v;
        const double expectUnshifted = step * k;
        const double expectShifted = step * (k + 0.5);
        if (std::abs(out.grid(k) - expectUnshifted) > 1e-9 &&
            std::abs(out.grid(k) - expectShifted) > 1e-9) {
          throw InputError("ssf_from_csv: nonuniform circle grid");
        }
      }
      out.shiftedGrid = std::abs(out.grid(0)) > 0.25 * step;
      break;
    }
    case OperatorKind::Dissipative: {
      out.domain = SsfDomain::Line;
      out.gauge = SsfGauge::Raw;
      out.shiftedGrid = true;
      const int m = static_cast<int>(rows.size());
      out.grid = RealVector(m);
      out.values = Vector(m);
      out.weights = RealVector(m);
      for (int k = 0; k < m; ++k) {
        const double t = rows[static_cast<std::size_t>(k)].a;
        out.grid(k) = t;
        out.values(k) = rows[static_cast<std::size_t>(k)].v;
        out.weights(k) = kPi * (1.0 + t * t) / static_cast<double>(m);
        if (k > 0 && out.grid(k) <= out.grid(k - 1)) {
          throw InputError("ssf_from_csv: line grid must ascend");
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace opshift
