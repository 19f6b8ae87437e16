#include <cmath>

#include "doctest.h"
#include "opshift/common.hpp"
#include "opshift/decomp.hpp"
#include "opshift/matrix_io.hpp"
#include "opshift/operators.hpp"
#include "opshift/quadrature.hpp"
#include "test_support.hpp"

using namespace opshift;

TEST_CASE("matrix JSON round trip is exact") {
  const Matrix m = random_ensemble(OperatorKind::Contraction, 4, 11);
  const Matrix back = matrix_from_json(matrix_to_json(m));
  REQUIRE(back.rows() == m.rows());
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("matrix JSON rejects malformed documents") {
  CHECK_THROWS_AS(matrix_from_json("not json"), InputError);
  CHECK_THROWS_AS(matrix_from_json("{\"rows\": 2, \"cols\": 2}"), InputError);
  CHECK_THROWS_AS(
      matrix_from_json("{\"rows\": 2, \"cols\": 2, \"data\": [[1, 0]]}"),
      InputError);
  CHECK_THROWS_AS(
      matrix_from_json(
          "{\"rows\": 1, \"cols\": 1, \"data\": [[\"x\", 0]]}"),
      InputError);
}

TEST_CASE("classify accepts members and rejects outsiders") {
  const int n = 5;
  SUBCASE("contraction") {
    const Matrix t = random_ensemble(OperatorKind::Contraction, n, 1);
    CHECK(classify(OperatorKind::Contraction, t).residual <= kClassTol);
    CHECK_THROWS_AS(classify(OperatorKind::Contraction, 1.5 * t / operator_norm(t)),
                    InputError);
    // A norm overshoot within tolerance is clamped back onto the class.
    const Matrix almost = (1.0 + 5e-11) * t / operator_norm(t);
    const ClassifiedOperator c = classify(OperatorKind::Contraction, almost);
    CHECK(operator_norm(c.m) <= 1.0 + 1e-15);
  }
  SUBCASE("unitary") {
    const Matrix u = random_ensemble(OperatorKind::Unitary, n, 2);
    CHECK(unitary_residual(u) <= 1e-12);
    CHECK_NOTHROW(classify(OperatorKind::Unitary, u));
    CHECK_THROWS_AS(
        classify(OperatorKind::Unitary,
                 random_ensemble(OperatorKind::Contraction, n, 3)),
        InputError);
  }
  SUBCASE("hermitian") {
    const Matrix h = random_ensemble(OperatorKind::Hermitian, n, 4);
    const ClassifiedOperator c = classify(OperatorKind::Hermitian, h);
    CHECK(hermitian_residual(c.m) == 0.0);  // re-hermitized on acceptance
    Matrix skew = h;
    skew(0, 1) += Complex(0.0, 1e-3);
    CHECK_THROWS_AS(classify(OperatorKind::Hermitian, skew), InputError);
  }
  SUBCASE("dissipative") {
    const Matrix l = random_ensemble(OperatorKind::Dissipative, n, 5);
    CHECK_NOTHROW(classify(OperatorKind::Dissipative, l));
    // Conjugating flips the sign of the imaginary part.
    CHECK_THROWS_AS(classify(OperatorKind::Dissipative, l.adjoint().eval()),
                    InputError);
  }
}

TEST_CASE("random ensembles are deterministic in the seed") {
  for (OperatorKind kind :
       {OperatorKind::Contraction, OperatorKind::Unitary,
        OperatorKind::Hermitian, OperatorKind::Dissipative}) {
    const Matrix a = random_ensemble(kind, 4, 77);
    const Matrix b = random_ensemble(kind, 4, 77);
    const Matrix c = random_ensemble(kind, 4, 78);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 1e-3);
  }
}

TEST_CASE("polar decomposition") {
  SUBCASE("invertible input gives a unitary factor") {
    const Matrix m = random_ensemble(OperatorKind::Contraction, 5, 8);
    const PolarDecomposition pd = polar_decompose(m);
    CHECK(pd.rank == 5);
    CHECK(unitary_residual(pd.isometry) <= 1e-10);
    CHECK(hermitian_residual(pd.positive) <= 1e-10);
    CHECK((m - pd.isometry * pd.positive).norm() <= 1e-12);
    // positive factor is PSD
    Eigen::SelfAdjointEigenSolver<Matrix> es(pd.positive);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
  SUBCASE("rank-deficient input still factors") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = Complex(1.0);
    const PolarDecomposition pd = polar_decompose(m);
    CHECK(pd.rank == 1);
    CHECK((m - pd.isometry * pd.positive).norm() <= 1e-12);
  }
}

TEST_CASE("hermitian log split") {
  // exp of a Hermitian with mixed-sign spectrum
  const Matrix h = random_ensemble(OperatorKind::Hermitian, 4, 9);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Matrix pd = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    pd += std::exp(es.eigenvalues()(i)) * es.eigenvectors().col(i) *
          es.eigenvectors().col(i).adjoint();
  }
  const HermitianLogSplit split = hermitian_log_split(pd);
  CHECK((split.log - h).norm() <= 1e-10);
  CHECK((split.log - (split.plus - split.minus)).norm() <= 1e-12);
  CHECK((split.plus * split.minus).norm() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> ep(split.plus);
  Eigen::SelfAdjointEigenSolver<Matrix> em(split.minus);
  CHECK(ep.eigenvalues().minCoeff() >= -1e-12);
  CHECK(em.eigenvalues().minCoeff() >= -1e-12);

  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = Complex(1.0);
  CHECK_THROWS_AS(hermitian_log_split(singular), InputError);
}

TEST_CASE("defect operator") {
  const Matrix t = random_ensemble(OperatorKind::Contraction, 5, 10);
  const Matrix d = defect_operator(t);
  CHECK(hermitian_residual(d) <= 1e-12);
  CHECK((d * d - (Matrix::Identity(5, 5) - t.adjoint() * t)).norm() <= 1e-10);
  CHECK_THROWS_AS(defect_operator(2.0 * t / operator_norm(t)), InputError);
}

TEST_CASE("normal eigendecomposition") {
  SUBCASE("unitary input") {
    const Matrix u = random_ensemble(OperatorKind::Unitary, 5, 12);
    const NormalEigen ne = normal_eigendecomposition(u);
    CHECK(unitary_residual(ne.vectors) <= 1e-10);
    CHECK((u - ne.vectors * ne.values.asDiagonal() * ne.vectors.adjoint())
              .norm() <= 1e-10);
  }
  SUBCASE("Jordan block is rejected") {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 1) = Complex(1.0);
    CHECK_THROWS_AS(normal_eigendecomposition(j), InputError);
  }
}

TEST_CASE("unitary log") {
  SUBCASE("recovers a Hermitian generator") {
    const Matrix a = random_ensemble(OperatorKind::Hermitian, 5, 13);
    const Matrix u = hermitian_phase(a, 1.0);
    const Matrix back = unitary_log(u);
    CHECK(hermitian_residual(back) <= 1e-10);
    CHECK((hermitian_phase(back, 1.0) - u).norm() <= 1e-10);
  }
  SUBCASE("spectrum near the cut at -1") {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = std::polar(1.0, kPi - 1e-12);
    u(1, 1) = std::polar(1.0, -kPi + 1e-12);
    const Matrix a = unitary_log(u);
    CHECK((hermitian_phase(a, 1.0) - u).norm() <= 1e-9);
  }
}

TEST_CASE("cayley transform maps classes") {
  const Matrix h = random_ensemble(OperatorKind::Hermitian, 5, 14);
  CHECK(unitary_residual(cayley_contraction(h)) <= 1e-10);
  const Matrix l = random_ensemble(OperatorKind::Dissipative, 5, 15);
  CHECK(operator_norm(cayley_contraction(l)) <= 1.0 + 1e-10);
}

TEST_CASE("gauss-legendre rule on (0,1)") {
  const GaussLegendre gl = gauss_legendre(16);
  REQUIRE(gl.nodes.size() == 16);
  for (double x : gl.nodes) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  // exact for polynomials of degree <= 31
  for (int k = 0; k <= 31; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      acc += gl.weights[i] * std::pow(gl.nodes[i], k);
    }
    CHECK(std::abs(acc - 1.0 / (k + 1)) <= 1e-13);
  }
}

TEST_CASE("circle nodes") {
  CHECK(circle_node(0, 8, false) == 0.0);
  CHECK(circle_node(0, 8, true) == doctest::Approx(kPi / 8.0));
  CHECK(circle_node(4, 8, false) == doctest::Approx(kPi));
}

TEST_CASE("hermitian phase and psd decay") {
  const Matrix a = random_ensemble(OperatorKind::Hermitian, 4, 16);
  CHECK(unitary_residual(hermitian_phase(a, 0.37)) <= 1e-12);

  Matrix g = random_ensemble(OperatorKind::Contraction, 4, 17);
  const Matrix d = g.adjoint() * g;  // PSD
  const Matrix e = psd_decay(d, 0.5);
  CHECK(hermitian_residual(e) <= 1e-12);
  CHECK(operator_norm(e) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(psd_decay(d, -1.0), InputError);
}
