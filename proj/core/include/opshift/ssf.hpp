#pragma once

#include <map>
#include <string>
#include <vector>

#include "opshift/calculus.hpp"
#include "opshift/common.hpp"
#include "opshift/dilation.hpp"
#include "opshift/gridfn.hpp"
#include "opshift/laurent.hpp"
#include "opshift/operators.hpp"

namespace opshift {

/// Quadrature configuration shared by the SSF pipelines.
struct QuadratureSpec {
  int tNodes = 64;        // Gauss-Legendre nodes on (0,1)
  int thetaGrid = 2048;   // uniform circle grid size (power of two)
  int pathSteps = 2000;   // eigenphase continuation steps
  double tolerance = 1e-8;
  bool shiftedGrid = false;
};

enum class SsfDomain { Circle, Line };
enum class SsfGauge { Raw, Counting, RealPart };

std::string gauge_name(SsfGauge g);
std::string domain_name(SsfDomain d);

/// Exact point contribution: adds coefficient * f'(location) to the pairing.
/// Used for atomic parts of the underlying measure.
struct PointTerm {
  Complex location{1.0, 0.0};
  Complex coefficient{0.0, 0.0};
};

/// Oriented arc swept by one eigenphase, with unwrapped end phase; adds
/// weight * (f(e^{i end}) - f(e^{i start})) to the pairing.
struct ArcTerm {
  double startPhase = 0.0;
  double endPhase = 0.0;
  double weight = 1.0;
};

/// Jump of a line counting function at `position` (value after minus value
/// before); adds -jump * f(position) to the pairing.
struct LineJump {
  double position = 0.0;
  double jump = 0.0;
};

/// Spectral shift sample: grid values plus whatever exact structure the
/// producing pipeline has (arcs for unitary pairs, jumps for Hermitian pairs,
/// point terms for atomic measure parts). The trace pairing uses the exact
/// structure when present and grid quadrature otherwise.
struct SSFSample {
  SsfDomain domain = SsfDomain::Circle;
  SsfGauge gauge = SsfGauge::Raw;
  bool shiftedGrid = false;
  RealVector grid;     // theta_k in [0, 2 pi) or t_k ascending
  Vector values;
  RealVector weights;  // line-domain integration weights (dt); empty on circle
  std::vector<PointTerm> pointTerms;
  std::vector<ArcTerm> arcs;
  std::vector<LineJump> jumps;
  std::map<std::string, double> diagnostics;

  bool has_exact_structure() const { return !arcs.empty() || !jumps.empty(); }
};

/// Test function for trace-formula work. Circle Laurent polynomials pair with
/// circle SSFs; line polynomials with Hermitian counting SSFs; Cayley-type
/// line functions with dissipative SSFs (and Hermitian ones).
class TestFunction {
 public:
  enum class Kind { CircleLaurent, LinePolynomial, LineCayley };

  static TestFunction circle(LaurentPoly f);
  static TestFunction line_polynomial(std::vector<Complex> coeffs);
  static TestFunction line_cayley(LaurentPoly circleRep);

  Kind kind() const { return kind_; }
  std::string label() const;

  Complex eval_circle(Complex z) const;
  Complex deriv_circle(Complex z) const;
  Complex eval_line(double t) const;
  Complex deriv_line(double t) const;

  /// Functional calculus on a member of the given operator class.
  Matrix apply(OperatorKind opKind, const Matrix& x) const;

  const LaurentPoly& laurent() const { return laurent_; }

 private:
  TestFunction() = default;
  Kind kind_ = Kind::CircleLaurent;
  LaurentPoly laurent_;                // CircleLaurent / LineCayley rep
  std::vector<Complex> polyCoeffs_;    // LinePolynomial
};

/// Discrete realization of the trace-formula pairing:
///   circle: integral of f' xi dzeta  (dzeta = 2 pi i zeta dm)
///   line:   integral of f' xi dt
/// Exact arc/jump/point structures contribute in closed form.
Complex ssf_pairing(const SSFSample& xi, const TestFunction& f);

struct VerifyResult {
  Complex traceLhs{0.0, 0.0};
  Complex integralRhs{0.0, 0.0};
  double absolute = 0.0;
  double relative = 0.0;
};
VerifyResult verify_trace_formula(OperatorKind opKind, const Matrix& x0,
                                  const Matrix& x1, const TestFunction& f,
                                  const SSFSample& xi);

/// SSF of a pair of contractions through the convex path T_t = T0 + t(T1-T0):
/// Gauss-Legendre in t, cnu densities per node (band-limited synthesis from
/// the semi-spectral moments), xi = g/(2 pi i zeta) in the raw gauge.
/// Unitary-part atoms must be invisible to K = T1 - T0 (checked, error
/// otherwise) and are dropped.
SSFSample ssf_contraction_pair(const Matrix& t0, const Matrix& t1,
                               const QuadratureSpec& spec);

/// SSF of a unitary pair in the counting gauge: eigenphases of
/// U_t = exp(itA) U0, A = -i log(U1 U0*), tracked across pathSteps and snapped
/// to the exact eigenphases of U1; the result is the integer-valued sum of
/// signed arc indicators, kept also in exact arc form.
SSFSample ssf_unitary_pair(const Matrix& u0, const Matrix& u1,
                           const QuadratureSpec& spec);

/// SSF of a Hermitian pair: exact eigenvalue counting function
/// xi(t) = #{eig A0 <= t} - #{eig A1 <= t} with exact jump structure; grid
/// values are tabulated on the Cayley pullback grid. A second path through
/// the Cayley transform and ssf_unitary_pair is cross-checked; the
/// discrepancy is reported in diagnostics["cayley_crosscheck"].
SSFSample ssf_selfadjoint_pair(const Matrix& a0, const Matrix& a1,
                               const QuadratureSpec& spec);

/// det(I + (A1 - A0)(A0 - z)^{-1}) for Hermitian A0, A1 and z off the real
/// axis (or outside the spectrum).
Complex perturbation_determinant(const Matrix& a0, const Matrix& a1, Complex z);

/// SSF value at t by the boundary limit (1/pi) Im log det, with the branch
/// tracked down a ladder of heights y (descending). Throws ConvergenceError
/// when the branch moves by more than pi between consecutive ladder points.
struct DeterminantSsfResult {
  double value = 0.0;
  std::vector<double> ladder;
  std::vector<double> imLog;
  bool converged = false;
};
DeterminantSsfResult ssf_via_determinant(const Matrix& a0, const Matrix& a1,
                                         double t, std::vector<double> yLadder);

/// Contour realization of the trace difference,
///   -(1/2 pi i) * contour integral of f'(z) log det(I + (T1-T0)(T0-z)^{-1}) dz
/// over the circle |z - center| = radius, with the log branch tracked around
/// the contour. Refuses (ConvergenceError) when the branch does not close.
Complex langer_contour_trace(const LaurentPoly& f, const Matrix& t0,
                             const Matrix& t1, Complex center, double radius,
                             int nodes);

/// SSF of a dissipative pair with trace-class resolvent difference, via the
/// Cayley transform pair and ssf_contraction_pair; samples are tabulated on
/// the pullback grid t_k = -cot(theta_k / 2).
SSFSample ssf_dissipative_resolvent_pair(const Matrix& l0, const Matrix& l1,
                                         const QuadratureSpec& spec);

/// SSF of a dissipative pair with trace-class difference K = L1 - L0 through
/// the additive path L_s = L0 + sK: line densities are the Cayley pullbacks
/// of the circle densities of cayley(L_s), and xi = g in the line convention
/// integral f' xi dt = integral f' d(nu).
SSFSample ssf_dissipative_additive(const Matrix& l0, const Matrix& l1,
                                   const QuadratureSpec& spec);

/// Negative Fourier coefficients of d(lambda) = d(nu) - xi dzeta for
/// j = -1 .. -maxIndex; all vanish when nu and xi represent the same
/// absolutely continuous trace functional.
struct BrothersRieszReport {
  std::vector<int> indices;
  std::vector<Complex> coefficients;
  double maxAbs = 0.0;
};
BrothersRieszReport brothers_riesz_check(const ScalarCircleMeasure& nu,
                                         const SSFSample& xi, int maxIndex);

/// A-integral realization of the contraction trace formula: the pairing is
/// evaluated with the co-analytic projection of xi and with the realized real
/// representative, both as A-integrals, together with the Alexandrov-type
/// vanishing of the analytic projection.
struct AIntegralTraceReport {
  Complex viaNegativeProjection{0.0, 0.0};
  Complex viaRealized{0.0, 0.0};
  Complex analyticPart{0.0, 0.0};  // should vanish
  bool converged = false;
  AIntegralResult negativeDetail;
  AIntegralResult realizedDetail;
};
AIntegralTraceReport a_integral_trace(const Matrix& t0, const Matrix& t1,
                                      const LaurentPoly& f,
                                      const QuadratureSpec& spec,
                                      const std::vector<double>& thresholds);

/// Step-graph CSV (theta_or_t, re_xi, im_xi): density gauges emit grid rows,
/// counting gauges emit duplicated-abscissa rows encoding the exact jumps.
std::string ssf_to_csv(const SSFSample& xi);
SSFSample ssf_from_csv(const std::string& text, OperatorKind pairKind);

}  // namespace opshift
