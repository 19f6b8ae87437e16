#include "opshift/intermediate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "opshift/dilation.hpp"
#include "opshift/matrix_io.hpp"
#include "opshift/quadrature.hpp"

namespace opshift {
namespace {

constexpr double kResolvedLogTol = -36.8413614879047;  // log(1e-16)

void require_contraction(const Matrix& t, const char* who) {
  if (t.rows() != t.cols()) {
    throw InputError(std::string(who) + ": square matrix required");
  }
  if (operator_norm(t) > 1.0 + 1e-6) {
    throw InputError(std::string(who) + ": operator norm exceeds 1");
  }
}

void require_hermitian(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || hermitian_residual(a) > 1e-8) {
    throw InputError(std::string(who) + ": Hermitian matrix required");
  }
}

int checked_grid(int m, const char* who) {
  if (m < 8 || (m & (m - 1)) != 0) {
    throw InputError(std::string(who) + ": theta grid must be a power of two >= 8");
  }
  return m;
}

double smallest_singular(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Per-node evaluator for the cnu block: trace functionals of the Poisson
/// kernel and of the log antiderivative against a fixed Hermitian G. Uses the
/// eigendecomposition of T when it is well conditioned (O(d) per angle) and
/// dense linear algebra otherwise.
class CnuNode {
 public:
  CnuNode(Matrix t, Matrix g) : t_(std::move(t)), g_(std::move(g)) {
    const Eigen::Index d = t_.rows();
    if (d == 0) return;
    id_ = Matrix::Identity(d, d);
    Eigen::ComplexEigenSolver<Matrix> es(t_);
    if (es.info() == Eigen::Success) {
      const Matrix& x = es.eigenvectors();
      Eigen::JacobiSVD<Matrix> svd(x);
      const double smin = svd.singularValues()(d - 1);
      if (smin > 0.0 && svd.singularValues()(0) / smin < 1e6) {
        fast_ = true;
        lambda_ = es.eigenvalues();
        const Matrix xin = x.partialPivLu().solve(id_);
        diag_ = (xin * g_ * x).diagonal();
      }
    }
  }

  Eigen::Index dim() const { return t_.rows(); }
  double g0() const { return dim() == 0 ? 0.0 : g_.trace().real(); }

  /// trace(G K(theta)) with K the Poisson kernel of T: 2 Re trace(G B) - g0.
  double poisson_value(double theta) const {
    if (dim() == 0) return 0.0;
    const Complex ph = std::polar(1.0, -theta);
    if (fast_) {
      Complex acc(0.0);
      for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
        acc += diag_(i) / (1.0 - ph * lambda_(i));
      }
      return 2.0 * acc.real() - g0();
    }
    Eigen::PartialPivLU<Matrix> lu(id_ - ph * t_);
    return 2.0 * (g_ * lu.solve(id_)).trace().real() - g0();
  }

  /// 2 Im trace(G log(I - e^{-i theta} T)); the antiderivative of the Poisson
  /// trace minus its mean term.
  double log_trace(double theta) const {
    if (dim() == 0) return 0.0;
    const Complex ph = std::polar(1.0, -theta);
    if (fast_) {
      Complex acc(0.0);
      for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
        acc += diag_(i) * std::log(1.0 - ph * lambda_(i));
      }
      return 2.0 * acc.imag();
    }
    const Matrix l = (id_ - ph * t_).log();
    return 2.0 * (g_ * l).trace().imag();
  }

  /// trace(G T^j) for j = 0..cap.
  std::vector<Complex> moments(int cap) const {
    std::vector<Complex> out(static_cast<std::size_t>(cap) + 1, Complex(0.0));
    if (dim() == 0) return out;
    if (fast_) {
      Vector p = Vector::Ones(lambda_.size());
      for (int j = 0; j <= cap; ++j) {
        Complex acc(0.0);
        for (Eigen::Index i = 0; i < lambda_.size(); ++i) acc += diag_(i) * p(i);
        out[static_cast<std::size_t>(j)] = acc;
        p.array() *= lambda_.array();
      }
      return out;
    }
    Matrix p = id_;
    for (int j = 0; j <= cap; ++j) {
      out[static_cast<std::size_t>(j)] = (g_ * p).trace();
      if (j < cap) p = p * t_;
    }
    return out;
  }

 private:
  Matrix t_, g_, id_;
  bool fast_ = false;
  Vector lambda_;
  Vector diag_;  // diagonal of X^{-1} G X, paired with lambda
};

/// Shared engine for the factor pairs {T, e^{iA} T} (unitary route) and
/// {T, e^{-D} T} (positive route). Produces the raw-gauge circle sample with
/// per-node hybrid quadrature: pointwise Poisson samples when the kernel is
/// resolved on the grid, exact cell masses from the log antiderivative
/// otherwise, followed by a low-moment correction pinned to the exact trace
/// moments (guarded so the positive route keeps a nonnegative density).
SSFSample factor_sample(const Matrix& t, const Matrix& g,
                        const QuadratureSpec& spec, bool positiveRoute,
                        const char* who) {
  require_contraction(t, who);
  require_hermitian(g, who);
  if (t.rows() != g.rows()) {
    throw InputError(std::string(who) + ": dimension mismatch");
  }
  const int m = checked_grid(spec.thetaGrid, who);
  if (spec.tNodes < 1) throw InputError(std::string(who) + ": tNodes must be >= 1");

  SSFSample out;
  out.domain = SsfDomain::Circle;
  out.gauge = SsfGauge::Raw;
  out.shiftedGrid = spec.shiftedGrid;
  out.grid = RealVector(m);
  for (int k = 0; k < m; ++k) out.grid(k) = circle_node(k, m, spec.shiftedGrid);
  out.values = Vector::Zero(m);
  if (g.norm() == 0.0) return out;

  const GaussLegendre rule = gauss_legendre(spec.tNodes);
  RealVector density = RealVector::Zero(m);
  const int mCorr = std::min(16, m / 2 - 1);
  std::vector<Complex> exact(static_cast<std::size_t>(mCorr) + 1, Complex(0.0));
  std::vector<std::pair<double, double>> atoms;  // (theta, weighted mass)
  int resolvedNodes = 0;
  double srMax = 0.0;

  for (int j = 0; j < spec.tNodes; ++j) {
    const double s = rule.nodes[static_cast<std::size_t>(j)];
    const double w = rule.weights[static_cast<std::size_t>(j)];
    const Matrix ts = positiveRoute ? Matrix(psd_decay(g, s) * t)
                                    : Matrix(hermitian_phase(g, s) * t);
    const CnuSplit split = cnu_split(ts, spec.tolerance);
    if (split.unitaryPart.rows() > 0) {
      NormalEigen ue = unitary_eigendecomposition(split.unitaryPart);
      for (Eigen::Index a = 0; a < ue.values.size(); ++a) {
        const Vector v = split.unitaryBasis * ue.vectors.col(a);
        const double mass = v.dot(g * v).real();
        if (std::abs(w * mass) > 1e-16) {
          atoms.emplace_back(std::arg(ue.values(a)), w * mass);
        }
      }
    }
    Matrix gt = split.cnuBasis.adjoint() * g * split.cnuBasis;
    gt = 0.5 * (gt + gt.adjoint());
    const CnuNode node(split.cnuPart, gt);
    const double sr = spectral_radius(split.cnuPart);
    srMax = std::max(srMax, sr);
    const bool resolved =
        node.dim() == 0 ||
        0.5 * m * std::log(std::max(sr, 1e-300)) <= kResolvedLogTol;
    if (resolved) {
      ++resolvedNodes;
      for (int k = 0; k < m; ++k) {
        density(k) += w * node.poisson_value(out.grid(k));
      }
    } else {
      RealVector psi(m);
      for (int k = 0; k < m; ++k) {
        psi(k) = node.log_trace(out.grid(k) - kPi / m);
      }
      const double base = node.g0();
      for (int k = 0; k < m; ++k) {
        const double cellDensity =
            base + (m / kTwoPi) * (psi((k + 1) % m) - psi(k));
        density(k) += w * cellDensity;
      }
    }
    const std::vector<Complex> mom = node.moments(mCorr);
    for (int p = 0; p <= mCorr; ++p) {
      exact[static_cast<std::size_t>(p)] += w * mom[static_cast<std::size_t>(p)];
    }
  }

  // Pin the low moments of the assembled density to the exact trace moments.
  std::vector<Complex> delta(static_cast<std::size_t>(mCorr) + 1, Complex(0.0));
  double deltaMax = 0.0;
  for (int p = 0; p <= mCorr; ++p) {
    Complex disc(0.0);
    for (int k = 0; k < m; ++k) {
      disc += density(k) * std::polar(1.0, p * out.grid(k));
    }
    disc /= static_cast<double>(m);
    delta[static_cast<std::size_t>(p)] = exact[static_cast<std::size_t>(p)] - disc;
    deltaMax = std::max(deltaMax, std::abs(delta[static_cast<std::size_t>(p)]));
  }
  RealVector corr(m);
  for (int k = 0; k < m; ++k) {
    double acc = delta[0].real();
    for (int p = 1; p <= mCorr; ++p) {
      acc += 2.0 * (delta[static_cast<std::size_t>(p)] *
                    std::polar(1.0, -p * out.grid(k)))
                       .real();
    }
    corr(k) = acc;
  }
  double fraction = 1.0;
  if (positiveRoute) {
    const double floor = -1e-9 * std::max(1.0, density.cwiseAbs().maxCoeff());
    for (int k = 0; k < m; ++k) {
      if (corr(k) < 0.0 && density(k) + corr(k) < floor) {
        fraction = std::min(fraction, (floor - density(k)) / corr(k));
      }
    }
    fraction = std::max(fraction, 0.0);
  }
  density += fraction * corr;

  for (int k = 0; k < m; ++k) {
    out.values(k) = positiveRoute ? Complex(0.0, density(k) / kTwoPi)
                                  : Complex(density(k) / kTwoPi, 0.0);
  }
  for (const auto& [theta, mass] : atoms) {
    const Complex zeta = std::polar(1.0, theta);
    const Complex coeff = positiveRoute ? Complex(-mass) * zeta : kI * zeta * mass;
    out.pointTerms.push_back({zeta, coeff});
  }
  out.diagnostics["resolved_nodes"] = static_cast<double>(resolvedNodes);
  out.diagnostics["cell_nodes"] = static_cast<double>(spec.tNodes - resolvedNodes);
  out.diagnostics["spectral_radius_max"] = srMax;
  out.diagnostics["moment_correction_max"] = deltaMax;
  out.diagnostics["moment_correction_fraction"] = fraction;
  out.diagnostics["atom_count"] = static_cast<double>(atoms.size());
  return out;
}

SSFSample add_samples(const SSFSample& a, const SSFSample& b) {
  if (a.domain != b.domain || a.gauge != b.gauge ||
      a.grid.size() != b.grid.size() || a.shiftedGrid != b.shiftedGrid) {
    throw InputError("add_samples: incompatible samples");
  }
  SSFSample out = a;
  out.values += b.values;
  out.pointTerms.insert(out.pointTerms.end(), b.pointTerms.begin(),
                        b.pointTerms.end());
  out.arcs.insert(out.arcs.end(), b.arcs.begin(), b.arcs.end());
  out.jumps.insert(out.jumps.end(), b.jumps.begin(), b.jumps.end());
  for (const auto& [key, value] : b.diagnostics) {
    auto it = out.diagnostics.find(key);
    if (it == out.diagnostics.end()) {
      out.diagnostics[key] = value;
    } else {
      it->second = std::max(it->second, value);
    }
  }
  return out;
}

SSFSample negate_sample(const SSFSample& a) {
  SSFSample out = a;
  out.values = -out.values;
  for (PointTerm& p : out.pointTerms) p.coefficient = -p.coefficient;
  for (ArcTerm& arc : out.arcs) arc.weight = -arc.weight;
  for (LineJump& j : out.jumps) j.jump = -j.jump;
  return out;
}

double min_imag(const SSFSample& s) {
  double v = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    v = std::min(v, s.values(k).imag());
  }
  return s.values.size() == 0 ? 0.0 : v;
}

double max_imag(const SSFSample& s) {
  double v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    v = std::max(v, s.values(k).imag());
  }
  return s.values.size() == 0 ? 0.0 : v;
}

}  // namespace

SSFSample ssf_unitary_factor(const Matrix& t, const Matrix& a,
                             const QuadratureSpec& spec) {
  return factor_sample(t, a, spec, /*positiveRoute=*/false, "ssf_unitary_factor");
}

SSFSample ssf_positive_factor(const Matrix& t, const Matrix& d,
                              const QuadratureSpec& spec) {
  if (d.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()));
    if (es.eigenvalues()(0) < -1e-8) {
      throw InputError("ssf_positive_factor: generator must be positive semidefinite");
    }
  }
  return factor_sample(t, d, spec, /*positiveRoute=*/true, "ssf_positive_factor");
}

IntermediateResult intermediate_contraction(const Matrix& t0, const Matrix& t1,
                                            const QuadratureSpec& spec) {
  require_contraction(t0, "intermediate_contraction");
  require_contraction(t1, "intermediate_contraction");
  if (t0.rows() != t1.rows()) {
    throw InputError("intermediate_contraction: dimension mismatch");
  }
  if (smallest_singular(t0) < 1e-8) {
    throw InputError(
        "intermediate_contraction: T0 is singular; use intermediate_general");
  }
  const Eigen::Index n = t0.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix r = t1 * t0.partialPivLu().solve(id);
  if (smallest_singular(r) < 1e-8) {
    throw InputError(
        "intermediate_contraction: T1 T0^{-1} is singular; use intermediate_general");
  }

  const PolarDecomposition pd = polar_decompose(r);
  const HermitianLogSplit split = hermitian_log_split(pd.positive);
  const Matrix t2 = psd_decay(split.minus, 1.0) * t0;

  IntermediateResult res;
  res.t = pd.isometry * t2;
  res.factorizationResidual0 =
      (res.t - pd.isometry * (psd_decay(split.minus, 1.0) * t0)).norm();
  Matrix dplus = pd.isometry * split.plus * pd.isometry.adjoint();
  dplus = 0.5 * (dplus + dplus.adjoint());
  res.factorizationResidual1 = (res.t - psd_decay(dplus, 1.0) * t1).norm();

  const Matrix au = unitary_log(pd.isometry);
  const SSFSample leg0 = ssf_positive_factor(t0, split.minus, spec);  // T0 -> T2
  const SSFSample leg1 = ssf_unitary_factor(t2, au, spec);            // T2 -> T
  res.xi0 = add_samples(leg0, leg1);
  const SSFSample leg2 = ssf_positive_factor(t1, dplus, spec);        // T1 -> T
  res.xi1 = negate_sample(leg2);                                      // T -> T1
  res.xi = add_samples(res.xi0, res.xi1);
  res.minImXi0 = min_imag(res.xi0);
  res.maxImXi1 = max_imag(res.xi1);
  return res;
}

FredholmRegularization fredholm_regularize(const Matrix& t, double tol) {
  if (t.rows() != t.cols()) {
    throw InputError("fredholm_regularize: square matrix required");
  }
  const Eigen::Index n = t.rows();
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();

  FredholmRegularization out;
  out.v = Matrix::Zero(n, n);
  auto canonical = [](Vector v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const Complex top = v(imax);
    if (std::abs(top) > 0.0) v *= std::conj(top) / std::abs(top);
    return v;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    if (sigma(j) > tol) continue;
    const Vector vk = canonical(svd.matrixV().col(j));
    const Vector uk = canonical(svd.matrixU().col(j));
    out.v += uk * vk.adjoint();
    ++out.rank;
  }
  out.q = t + out.v;
  out.qSmallestSingular = smallest_singular(out.q);
  out.defectIdentityResidual = operator_norm(
      out.q.adjoint() * out.q - (t.adjoint() * t + out.v.adjoint() * out.v));
  return out;
}

IntermediateResult intermediate_general(const Matrix& t0, const Matrix& t1,
                                        const QuadratureSpec& spec) {
  require_contraction(t0, "intermediate_general");
  require_contraction(t1, "intermediate_general");
  Matrix q0 = t0;
  Matrix q1 = t1;
  for (Matrix* q : {&q0, &q1}) {
    if (smallest_singular(*q) < 1e-8) {
      *q = fredholm_regularize(*q, 1e-8).q;
      const double s = operator_norm(*q);
      if (s > 1.0) *q /= s;
    }
  }
  return intermediate_contraction(q0, q1, spec);
}

SchafferTransferReport ssf_schaffer_transfer(const Matrix& t0, const Matrix& t1,
                                             int order,
                                             const QuadratureSpec& /*spec*/) {
  require_contraction(t0, "ssf_schaffer_transfer");
  require_contraction(t1, "ssf_schaffer_transfer");
  if (order < 1) throw InputError("ssf_schaffer_transfer: order must be >= 1");

  // The wrap-around slot cycle of an order-n dilation carries -T* and has
  // block length exactly n, so traces of powers transfer only below the
  // dilation order; one extra slot keeps every compared power exact.
  const Matrix w0 = power_dilation(t0, order + 1);
  const Matrix w1 = power_dilation(t1, order + 1);
  SchafferTransferReport rep;
  rep.order = order;
  Matrix pw0 = Matrix::Identity(w0.rows(), w0.cols());
  Matrix pw1 = pw0;
  Matrix pt0 = Matrix::Identity(t0.rows(), t0.cols());
  Matrix pt1 = pt0;
  for (int p = 1; p <= order; ++p) {
    pw0 = pw0 * w0;
    pw1 = pw1 * w1;
    pt0 = pt0 * t0;
    pt1 = pt1 * t1;
    const Complex dw = pw1.trace() - pw0.trace();
    const Complex dt = pt1.trace() - pt0.trace();
    rep.labels.push_back("z^" + std::to_string(p));
    rep.discrepancies.push_back(std::abs(dw - dt));
    rep.maxDiscrepancy = std::max(rep.maxDiscrepancy, rep.discrepancies.back());
  }
  return rep;
}

UnitaryToContractionResult ssf_unitary_to_contraction(const Matrix& u,
                                                      const Matrix& t,
                                                      const QuadratureSpec& spec) {
  if (u.rows() != u.cols() || unitary_residual(u) > 1e-8) {
    throw InputError("ssf_unitary_to_contraction: unitary matrix required");
  }
  require_contraction(t, "ssf_unitary_to_contraction");
  UnitaryToContractionResult out;
  out.chain = intermediate_contraction(u, t, spec);
  out.minImXi = min_imag(out.chain.xi);
  return out;
}

}  // namespace opshift
