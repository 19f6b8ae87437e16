#include "opshift/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace opshift {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("hermitian eigendecomposition failed");
  }
  return es;
}

}  // namespace

PolarDecomposition polar_decompose(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw InputError("polar_decompose: square matrix required");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const Eigen::Index n = m.rows();
  const double cutoff = (n > 0 && sigma(0) > 0.0) ? tol * sigma(0) : tol;

  PolarDecomposition out;
  out.positive = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.positive += sigma(k) * svd.matrixV().col(k) * svd.matrixV().col(k).adjoint();
  }
  out.positive = hermitize(out.positive);

  out.rank = 0;
  out.isometry = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (sigma(k) > cutoff) {
      out.isometry += svd.matrixU().col(k) * svd.matrixV().col(k).adjoint();
      ++out.rank;
    }
  }
  if (out.rank == n) {
    // Full rank: snap to the closest unitary (the factors are already there).
    return out;
  }
  return out;
}

HermitianLogSplit hermitian_log_split(const Matrix& pd, double tol) {
  auto es = hermitian_eigen(pd);
  const Eigen::Index n = pd.rows();
  if (n > 0 && es.eigenvalues()(0) <= tol) {
    throw InputError("hermitian_log_split: matrix is not positive definite");
  }
  Matrix lg = Matrix::Zero(n, n), plus = Matrix::Zero(n, n), minus = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = std::log(es.eigenvalues()(k));
    const Matrix proj = es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
    lg += l * proj;
    plus += std::max(l, 0.0) * proj;
    minus += std::max(-l, 0.0) * proj;
  }
  return {hermitize(lg), hermitize(plus), hermitize(minus)};
}

Matrix defect_operator(const Matrix& t, double tol) {
  if (t.rows() != t.cols()) throw InputError("defect_operator: square matrix required");
  const Matrix h = hermitize(Matrix::Identity(t.rows(), t.cols()) - t.adjoint() * t);
  auto es = hermitian_eigen(h);
  if (t.rows() > 0 && es.eigenvalues()(0) < -tol) {
    throw InputError("defect_operator: matrix is not a contraction");
  }
  Matrix d = Matrix::Zero(t.rows(), t.cols());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const double l = std::max(es.eigenvalues()(k), 0.0);
    d += std::sqrt(l) * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  return hermitize(d);
}

Matrix hermitian_function(const Matrix& h, const std::function<Complex(double)>& f) {
  auto es = hermitian_eigen(h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    out += f(es.eigenvalues()(k)) * es.eigenvectors().col(k) *
           es.eigenvectors().col(k).adjoint();
  }
  return out;
}

Matrix psd_sqrt(const Matrix& h, double tol) {
  auto es = hermitian_eigen(h);
  if (h.rows() > 0 && es.eigenvalues()(0) < -tol) {
    throw InputError("psd_sqrt: matrix is not positive semidefinite");
  }
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    out += std::sqrt(std::max(es.eigenvalues()(k), 0.0)) *
           es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  return hermitize(out);
}

NormalEigen normal_eigendecomposition(const Matrix& m, double relTol) {
  if (m.rows() != m.cols()) {
    throw InputError("normal_eigendecomposition: square matrix required");
  }
  Eigen::ComplexSchur<Matrix> schur(m, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("Schur decomposition failed");
  }
  const Matrix& t = schur.matrixT();
  double offdiag = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < t.cols(); ++j) offdiag += std::norm(t(i, j));
  }
  offdiag = std::sqrt(offdiag);
  const double scale = std::max(m.norm(), 1e-300);
  if (offdiag > relTol * scale) {
    throw InputError("normal_eigendecomposition: matrix is not normal");
  }
  NormalEigen out;
  out.values = t.diagonal();
  out.vectors = schur.matrixU();
  return out;
}

NormalEigen unitary_eigendecomposition(const Matrix& u, double relTol) {
  NormalEigen ne = normal_eigendecomposition(u, relTol);
  const Eigen::Index n = ne.values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::arg(ne.values(a)) < std::arg(ne.values(b));
  });
  NormalEigen sorted;
  sorted.values = Vector(n);
  sorted.vectors = Matrix(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted.values(k) = ne.values(order[k]);
    sorted.vectors.col(k) = ne.vectors.col(order[k]);
  }
  return sorted;
}

Matrix matfun(const Matrix& m, const std::function<Complex(Complex)>& f, double relTol) {
  NormalEigen ne = normal_eigendecomposition(m, relTol);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    out += f(ne.values(k)) * ne.vectors.col(k) * ne.vectors.col(k).adjoint();
  }
  return out;
}

Matrix unitary_log(const Matrix& u, double branchTol) {
  NormalEigen ne = unitary_eigendecomposition(u);
  const Eigen::Index n = ne.values.size();
  bool nearCut = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(ne.values(k) + Complex(1.0, 0.0)) < branchTol) nearCut = true;
  }
  double cut = kPi;  // principal window (-pi, pi]
  if (nearCut && n > 0) {
    // Rotate the branch cut into the middle of the largest spectral gap.
    std::vector<double> phases(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      phases[k] = wrap_angle_positive(std::arg(ne.values(k)));
    }
    std::sort(phases.begin(), phases.end());
    double bestGap = phases.front() + kTwoPi - phases.back();
    double bestMid = wrap_angle_positive(phases.back() + 0.5 * bestGap);
    for (std::size_t j = 0; j + 1 < phases.size(); ++j) {
      const double gap = phases[j + 1] - phases[j];
      if (gap > bestGap) {
        bestGap = gap;
        bestMid = phases[j] + 0.5 * gap;
      }
    }
    if (bestGap < 2.0 * branchTol) {
      throw ConvergenceError("unitary_log: spectrum leaves no branch cut gap");
    }
    cut = bestMid;
  }
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double phi = std::arg(ne.values(k));  // in (-pi, pi]
    // Move into the window (cut - 2 pi, cut].
    while (phi > cut) phi -= kTwoPi;
    while (phi <= cut - kTwoPi) phi += kTwoPi;
    a += phi * ne.vectors.col(k) * ne.vectors.col(k).adjoint();
  }
  return hermitize(a);
}

Matrix cayley_contraction(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("cayley_contraction: square matrix required");
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  Eigen::PartialPivLU<Matrix> lu(a + kI * id);
  return (a - kI * id) * lu.solve(id);
}

Matrix hermitian_phase(const Matrix& a, double t) {
  return hermitian_function(a, [t](double lambda) {
    return std::exp(Complex(0.0, t * lambda));
  });
}

Matrix psd_decay(const Matrix& d, double t) {
  if (t < 0.0) throw InputError("psd_decay: parameter must be nonnegative");
  return hermitian_function(d, [t](double lambda) {
    return Complex(std::exp(-t * std::max(lambda, 0.0)), 0.0);
  });
}

}  // namespace opshift
