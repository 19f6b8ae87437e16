#pragma once

#include <iosfwd>
#include <string>

#include "opshift/common.hpp"

namespace opshift {

/// Serializes a complex matrix as
///   {"rows": r, "cols": c, "data": [[re, im], ...]}   (row-major).
std::string matrix_to_json(const Matrix& m);

/// Parses the schema above. Throws InputError on malformed documents,
/// non-numeric entries, or data length != rows*cols.
Matrix matrix_from_json(const std::string& text);

Matrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& m);

/// Largest singular value (operator norm).
double operator_norm(const Matrix& m);

double hermitian_residual(const Matrix& m);
double unitary_residual(const Matrix& m);

/// Frobenius distance to the nearest matrix commuting representation, i.e.
/// ||AB - BA||_F.
double commutator_norm(const Matrix& a, const Matrix& b);

}  // namespace opshift
