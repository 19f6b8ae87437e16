#include <cmath>

#include "doctest.h"
#include "opshift/common.hpp"
#include "opshift/decomp.hpp"
#include "opshift/dilation.hpp"
#include "opshift/matrix_io.hpp"
#include "opshift/operators.hpp"

using namespace opshift;

namespace {

/// Contraction with a prescribed unitary part: V (U (+) C) V*.
Matrix with_unitary_part(const Matrix& u, const Matrix& c, const Matrix& v) {
  const Eigen::Index k = u.rows(), d = k + c.rows();
  Matrix block = Matrix::Zero(d, d);
  block.topLeftCorner(k, k) = u;
  block.bottomRightCorner(c.rows(), c.rows()) = c;
  return v * block * v.adjoint();
}

}  // namespace

TEST_CASE("schaffer window block layout") {
  const Matrix t = random_ensemble(OperatorKind::Contraction, 3, 30);
  const SchafferWindow w = schaffer_block(t, 2);
  CHECK(w.halfwidth == 2);
  CHECK(w.blockDim == 3);
  CHECK(w.matrix.rows() == 15);
  CHECK((w.block(0, 0) - t).norm() <= 1e-14);
  CHECK((w.block(0, 1) - defect_operator(t.adjoint().eval())).norm() <= 1e-12);
  CHECK((w.block(-1, 0) - defect_operator(t)).norm() <= 1e-12);
  CHECK((w.block(-1, 1) + t.adjoint()).norm() <= 1e-14);
  CHECK((w.block(1, 2) - Matrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK((w.block(-2, -1) - Matrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK(w.block(1, 1).norm() <= 1e-14);
}

TEST_CASE("kernel isometry of the defect pair") {
  SUBCASE("shift-type contraction with nontrivial defect kernels") {
    Matrix s = Matrix::Zero(3, 3);
    s(1, 0) = s(2, 1) = Complex(1.0);
    const KernelIsometryReport rep = kernel_isometry_check(s);
    CHECK(rep.kernelDim == 2);
    CHECK(rep.cokernelDim == 2);
    CHECK(rep.pass);
    CHECK(rep.normResidual <= 1e-10);
    CHECK(rep.rangeResidual <= 1e-10);
  }
  SUBCASE("strict contraction has trivial kernels") {
    const Matrix t = random_ensemble(OperatorKind::Contraction, 4, 31);
    const KernelIsometryReport rep = kernel_isometry_check(t);
    CHECK(rep.kernelDim == 0);
    CHECK(rep.cokernelDim == 0);
    CHECK(rep.pass);
  }
}

TEST_CASE("power dilation is unitary and compresses to powers") {
  const Matrix t = random_ensemble(OperatorKind::Contraction, 3, 32);
  const int order = 8;
  const Matrix w = power_dilation(t, order);
  REQUIRE(w.rows() == 3 * (order + 1));
  CHECK(unitary_residual(w) <= 1e-12);
  Matrix wp = Matrix::Identity(w.rows(), w.cols());
  Matrix tp = Matrix::Identity(3, 3);
  for (int p = 1; p <= order; ++p) {
    wp = wp * w;
    tp = tp * t;
    CHECK((wp.topLeftCorner(3, 3) - tp).norm() <= 1e-12);
  }
}

TEST_CASE("cnu split recovers prescribed parts") {
  const Matrix u = random_ensemble(OperatorKind::Unitary, 2, 33);
  const Matrix c = random_ensemble(OperatorKind::Contraction, 3, 34);
  const Matrix v = random_ensemble(OperatorKind::Unitary, 5, 35);
  const Matrix t = with_unitary_part(u, c, v);

  const CnuSplit split = cnu_split(t);
  CHECK(split.unitaryBasis.cols() == 2);
  CHECK(split.cnuBasis.cols() == 3);
  CHECK(unitary_residual(split.unitaryPart) <= 1e-10);
  CHECK(spectral_radius(split.cnuPart) < 1.0);
  CHECK(split.offBlockResidual <= 1e-10);
  const Matrix rebuilt =
      split.unitaryBasis * split.unitaryPart * split.unitaryBasis.adjoint() +
      split.cnuBasis * split.cnuPart * split.cnuBasis.adjoint();
  CHECK((rebuilt - t).norm() <= 1e-10);

  const CnuSplit strict = cnu_split(c);
  CHECK(strict.unitaryBasis.cols() == 0);
  const CnuSplit allu = cnu_split(u);
  CHECK(allu.cnuBasis.cols() == 0);
}

TEST_CASE("poisson density closed form") {
  Matrix t(1, 1);
  t << Complex(0.5);
  CHECK(std::abs(poisson_density(t, 0.0)(0, 0) - Complex(3.0)) <= 1e-13);
  CHECK(std::abs(poisson_density(t, kPi)(0, 0) - Complex(1.0 / 3.0)) <= 1e-13);

  const Matrix c = random_ensemble(OperatorKind::Contraction, 4, 36);
  for (double th : {0.3, 2.0, 4.4}) {
    const Matrix k = poisson_density(c, th);
    CHECK(hermitian_residual(k) <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }

  // grid quadrature of the density reproduces the moments of the contraction
  const int m = 512;
  for (int n : {0, 1, 2, -1}) {
    Matrix acc = Matrix::Zero(4, 4);
    for (int k = 0; k < m; ++k) {
      const double th = kTwoPi * k / m;
      acc += std::polar(1.0, n * th) * poisson_density(c, th);
    }
    acc /= static_cast<double>(m);
    Matrix want = Matrix::Identity(4, 4);
    const Matrix base = n >= 0 ? c : Matrix(c.adjoint());
    for (int j = 0; j < std::abs(n); ++j) want = want * base;
    CHECK((acc - want).norm() <= 1e-8);
  }
}

TEST_CASE("semi-spectral measure of a contraction") {
  const Matrix u = random_ensemble(OperatorKind::Unitary, 2, 37);
  const Matrix c = 0.8 * random_ensemble(OperatorKind::Contraction, 2, 38);
  const Matrix v = random_ensemble(OperatorKind::Unitary, 4, 39);
  const Matrix t = with_unitary_part(u, c, v);

  const OperatorCircleMeasure mu = semi_spectral_measure(t, 1024);
  CHECK(mu.atoms.size() == 2);
  CHECK((mu.total_mass() - Matrix::Identity(4, 4)).norm() <= 1e-8);
  Matrix p = Matrix::Identity(4, 4);
  for (int n = 0; n <= 3; ++n) {
    CHECK((mu.moment(n) - p).norm() <= 1e-8);
    CHECK((mu.moment(-n) - Matrix(p.adjoint())).norm() <= 1e-8);
    p = p * t;
  }
  for (const CircleAtom& a : mu.atoms) {
    CHECK(hermitian_residual(a.weight) <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.weight);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }

  const OperatorCircleMeasure strict = semi_spectral_measure(
      random_ensemble(OperatorKind::Contraction, 3, 40), 1024);
  CHECK(strict.atoms.empty());
  CHECK((strict.total_mass() - Matrix::Identity(3, 3)).norm() <= 1e-8);
}

TEST_CASE("spectral radius") {
  Matrix t = Matrix::Zero(3, 3);
  t(0, 0) = Complex(0.2, 0.1);
  t(1, 1) = Complex(-0.7, 0.0);
  t(2, 2) = Complex(0.1, 0.6);
  t(0, 2) = Complex(5.0);  // triangular part does not move the spectrum
  CHECK(spectral_radius(t) == doctest::Approx(0.7));
}
