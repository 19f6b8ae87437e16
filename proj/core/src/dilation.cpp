#include "opshift/dilation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "opshift/decomp.hpp"
#include "opshift/quadrature.hpp"

namespace opshift {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

Matrix SchafferWindow::block(int j, int k) const {
  if (j < -halfwidth || j > halfwidth || k < -halfwidth || k > halfwidth) {
    throw InputError("SchafferWindow::block: index outside window");
  }
  const int r = (j + halfwidth) * blockDim;
  const int c = (k + halfwidth) * blockDim;
  return matrix.block(r, c, blockDim, blockDim);
}

SchafferWindow schaffer_block(const Matrix& t, int halfwidth) {
  if (t.rows() != t.cols()) throw InputError("schaffer_block: square matrix required");
  if (halfwidth < 1) throw InputError("schaffer_block: halfwidth must be >= 1");
  const int d = static_cast<int>(t.rows());
  const int side = (2 * halfwidth + 1) * d;
  SchafferWindow w;
  w.halfwidth = halfwidth;
  w.blockDim = d;
  w.matrix = Matrix::Zero(side, side);
  const Matrix dT = defect_operator(t);
  const Matrix dTstar = defect_operator(t.adjoint());
  auto put = [&](int j, int k, const Matrix& b) {
    w.matrix.block((j + halfwidth) * d, (k + halfwidth) * d, d, d) = b;
  };
  for (int j = -halfwidth; j < halfwidth; ++j) {
    if (j != 0 && j != -1) put(j, j + 1, Matrix::Identity(d, d));
  }
  put(0, 0, t);
  put(0, 1, dTstar);
  put(-1, 0, dT);
  put(-1, 1, -t.adjoint());
  return w;
}

KernelIsometryReport kernel_isometry_check(const Matrix& t, double tol) {
  const Eigen::Index d = t.rows();
  const Matrix id = Matrix::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<Matrix> ker(hermitize(id - t.adjoint() * t));
  Eigen::SelfAdjointEigenSolver<Matrix> coker(hermitize(id - t * t.adjoint()));

  KernelIsometryReport rep;
  std::vector<Eigen::Index> kerIdx, cokerIdx;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(ker.eigenvalues()(k)) <= tol) kerIdx.push_back(k);
    if (std::abs(coker.eigenvalues()(k)) <= tol) cokerIdx.push_back(k);
  }
  rep.kernelDim = static_cast<int>(kerIdx.size());
  rep.cokernelDim = static_cast<int>(cokerIdx.size());

  Matrix cokerBasis(d, rep.cokernelDim);
  for (int j = 0; j < rep.cokernelDim; ++j) {
    cokerBasis.col(j) = coker.eigenvectors().col(cokerIdx[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index k : kerIdx) {
    const Vector x = ker.eigenvectors().col(k);
    const Vector y = -(t * x);
    rep.normResidual = std::max(rep.normResidual, std::abs(y.norm() - x.norm()));
    const Vector offRange =
        rep.cokernelDim > 0 ? Vector(y - cokerBasis * (cokerBasis.adjoint() * y)) : y;
    rep.rangeResidual = std::max(rep.rangeResidual, offRange.norm());
  }
  rep.pass = rep.kernelDim == rep.cokernelDim && rep.normResidual <= tol &&
             rep.rangeResidual <= tol;
  return rep;
}

Matrix power_dilation(const Matrix& t, int n) {
  if (t.rows() != t.cols()) throw InputError("power_dilation: square matrix required");
  if (n < 1) throw InputError("power_dilation: order must be >= 1");
  const int d = static_cast<int>(t.rows());
  Matrix w = Matrix::Zero((n + 1) * d, (n + 1) * d);
  const Matrix dT = defect_operator(t);
  const Matrix dTstar = defect_operator(t.adjoint());
  auto put = [&](int r, int c, const Matrix& b) { w.block(r * d, c * d, d, d) = b; };
  put(0, 0, t);
  put(1, 0, dT);
  put(0, n, dTstar);
  put(1, n, -t.adjoint());
  for (int j = 1; j < n; ++j) put(j + 1, j, Matrix::Identity(d, d));
  return w;
}

CnuSplit cnu_split(const Matrix& t, double tol) {
  if (t.rows() != t.cols()) throw InputError("cnu_split: square matrix required");
  const Eigen::Index d = t.rows();
  const Matrix id = Matrix::Identity(d, d);
  // The unitary subspace is where every power of T and T* acts isometrically;
  // it is the kernel of the PSD sum of all the power defects.
  Matrix h = Matrix::Zero(d, d);
  Matrix p = id;
  for (Eigen::Index n = 1; n <= d; ++n) {
    p = p * t;
    h += (id - p.adjoint() * p) + (id - p * p.adjoint());
  }
  h = hermitize(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  std::vector<Eigen::Index> uniIdx, cnuIdx;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(es.eigenvalues()(k)) <= tol * static_cast<double>(2 * d)) {
      uniIdx.push_back(k);
    } else {
      cnuIdx.push_back(k);
    }
  }
  CnuSplit out;
  out.unitaryBasis = Matrix(d, uniIdx.size());
  out.cnuBasis = Matrix(d, cnuIdx.size());
  for (std::size_t j = 0; j < uniIdx.size(); ++j) {
    out.unitaryBasis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(uniIdx[j]);
  }
  for (std::size_t j = 0; j < cnuIdx.size(); ++j) {
    out.cnuBasis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cnuIdx[j]);
  }
  out.unitaryPart = out.unitaryBasis.adjoint() * t * out.unitaryBasis;
  out.cnuPart = out.cnuBasis.adjoint() * t * out.cnuBasis;
  out.offBlockResidual =
      (out.unitaryBasis.adjoint() * t * out.cnuBasis).norm() +
      (out.cnuBasis.adjoint() * t * out.unitaryBasis).norm();
  return out;
}

Matrix poisson_density(const Matrix& t, double theta) {
  const Eigen::Index d = t.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Complex phase = std::exp(Complex(0.0, -theta));
  Eigen::PartialPivLU<Matrix> lu(id - phase * t);
  const Matrix b = lu.solve(id);
  return hermitize(b + b.adjoint() - id);
}

double spectral_radius(const Matrix& t) {
  if (t.size() == 0) return 0.0;
  return t.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix OperatorCircleMeasure::total_mass() const {
  return moment(0);
}

Matrix OperatorCircleMeasure::moment(int n) const {
  Eigen::Index d = 0;
  if (!density.empty()) {
    d = density.front().rows();
  } else if (!atoms.empty()) {
    d = atoms.front().weight.rows();
  }
  Matrix acc = Matrix::Zero(d, d);
  for (const CircleAtom& a : atoms) {
    acc += std::exp(Complex(0.0, n * a.theta)) * a.weight;
  }
  const int m = grid();
  for (int k = 0; k < m; ++k) {
    const double th = circle_node(k, m, shifted);
    acc += std::exp(Complex(0.0, n * th)) * density[static_cast<std::size_t>(k)] /
           static_cast<double>(m);
  }
  return acc;
}

OperatorCircleMeasure semi_spectral_measure(const Matrix& t, int grid,
                                            bool shifted, double tol) {
  if (grid <= 0) throw InputError("semi_spectral_measure: positive grid required");
  const Eigen::Index d = t.rows();
  CnuSplit split = cnu_split(t, tol);
  OperatorCircleMeasure out;
  out.shifted = shifted;
  if (split.unitaryPart.rows() > 0) {
    NormalEigen ue = unitary_eigendecomposition(split.unitaryPart);
    for (Eigen::Index k = 0; k < ue.values.size(); ++k) {
      const Vector v = split.unitaryBasis * ue.vectors.col(k);
      out.atoms.push_back({std::arg(ue.values(k)), Matrix(v * v.adjoint())});
    }
  }
  out.density.reserve(static_cast<std::size_t>(grid));
  const bool haveCnu = split.cnuPart.rows() > 0;
  for (int k = 0; k < grid; ++k) {
    const double th = circle_node(k, grid, shifted);
    if (haveCnu) {
      out.density.push_back(split.cnuBasis * poisson_density(split.cnuPart, th) *
                            split.cnuBasis.adjoint());
    } else {
      out.density.push_back(Matrix::Zero(d, d));
    }
  }
  return out;
}

Complex ScalarCircleMeasure::total_mass() const { return moment(0); }

Complex ScalarCircleMeasure::moment(int n) const {
  Complex acc(0.0);
  for (const ScalarAtom& a : atoms) {
    acc += std::exp(Complex(0.0, n * a.theta)) * a.mass;
  }
  const int m = grid();
  for (int k = 0; k < m; ++k) {
    const double th = circle_node(k, m, shifted);
    acc += std::exp(Complex(0.0, n * th)) * density(k) / static_cast<double>(m);
  }
  return acc;
}

}  // namespace opshift
