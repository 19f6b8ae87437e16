#include "opshift/operators.hpp"

#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "opshift/matrix_io.hpp"

namespace opshift {

std::string kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Contraction: return "contraction";
    case OperatorKind::Unitary: return "unitary";
    case OperatorKind::Hermitian: return "selfadjoint";
    case OperatorKind::Dissipative: return "dissipative";
  }
  throw InputError("unknown operator kind");
}

OperatorKind kind_from_name(const std::string& name) {
  if (name == "contraction") return OperatorKind::Contraction;
  if (name == "unitary") return OperatorKind::Unitary;
  if (name == "selfadjoint" || name == "hermitian") return OperatorKind::Hermitian;
  if (name == "dissipative") return OperatorKind::Dissipative;
  throw InputError("unknown operator class: " + name);
}

ClassifiedOperator classify(OperatorKind kind, Matrix m, double tol) {
  if (m.rows() != m.cols()) throw InputError("classify: square matrix required");
  ClassifiedOperator out{kind, std::move(m), 0.0};
  switch (kind) {
    case OperatorKind::Contraction: {
      const double sigma = operator_norm(out.m);
      if (sigma > 1.0 + tol) {
        throw InputError("classify: operator norm " + std::to_string(sigma) +
                         " exceeds 1 beyond tolerance");
      }
      if (sigma > 1.0) {
        out.m /= sigma;
        out.residual = sigma - 1.0;
      }
      break;
    }
    case OperatorKind::Unitary: {
      out.residual = unitary_residual(out.m);
      if (out.residual > tol) {
        throw InputError("classify: matrix is not unitary within tolerance");
      }
      break;
    }
    case OperatorKind::Hermitian: {
      out.residual = hermitian_residual(out.m);
      if (out.residual > tol) {
        throw InputError("classify: matrix is not Hermitian within tolerance");
      }
      out.m = 0.5 * (out.m + out.m.adjoint()).eval();
      break;
    }
    case OperatorKind::Dissipative: {
      const Matrix im = (out.m - out.m.adjoint()) / Complex(0.0, 2.0);
      Eigen::SelfAdjointEigenSolver<Matrix> es(im);
      const double lmin = out.m.rows() > 0 ? es.eigenvalues()(0) : 0.0;
      if (lmin < -tol) {
        throw InputError("classify: imaginary part has negative eigenvalue " +
                         std::to_string(lmin));
      }
      out.residual = std::max(0.0, -lmin);
      break;
    }
  }
  return out;
}

namespace {

Matrix ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  const double scale = 1.0 / std::sqrt(2.0 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re * scale, im * scale);
    }
  }
  return g;
}

}  // namespace

Matrix random_ensemble(OperatorKind kind, int n, std::uint64_t seed) {
  if (n <= 0) throw InputError("random_ensemble: dimension must be positive");
  std::mt19937_64 rng(seed);
  switch (kind) {
    case OperatorKind::Contraction: {
      Matrix g = ginibre(n, rng);
      const double sigma = operator_norm(g);
      return sigma > 0.0 ? Matrix(0.9 / sigma * g) : g;
    }
    case OperatorKind::Unitary: {
      const Matrix g = ginibre(n, rng);
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ();
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
      }
      return q;
    }
    case OperatorKind::Hermitian: {
      const Matrix g = ginibre(n, rng);
      return 0.5 * (g + g.adjoint());
    }
    case OperatorKind::Dissipative: {
      const Matrix g = ginibre(n, rng);
      const Matrix h = 0.5 * (g + g.adjoint());
      const Matrix b = ginibre(n, rng);
      Matrix p = b * b.adjoint();
      const double norm = operator_norm(p);
      if (norm > 0.0) p /= 2.0 * norm;
      return h + kI * p;
    }
  }
  throw InputError("unknown operator kind");
}

}  // namespace opshift
