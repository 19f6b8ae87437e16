#include "opshift/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace opshift {

namespace {
using nlohmann::json;
}  // namespace

std::string matrix_to_json(const Matrix& m) {
  json doc;
  doc["rows"] = m.rows();
  doc["cols"] = m.cols();
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  doc["data"] = std::move(data);
  return doc.dump(2);
}

Matrix matrix_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("matrix JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc.contains("cols") ||
      !doc.contains("data")) {
    throw InputError("matrix JSON must carry rows, cols, data");
  }
  if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer()) {
    throw InputError("matrix JSON rows/cols must be integers");
  }
  const auto rows = doc["rows"].get<Eigen::Index>();
  const auto cols = doc["cols"].get<Eigen::Index>();
  if (rows < 0 || cols < 0) throw InputError("matrix JSON dimensions negative");
  const auto& data = doc["data"];
  if (!data.is_array() ||
      data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw InputError("matrix JSON data length must equal rows*cols");
  }
  Matrix m(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j, ++idx) {
      const auto& entry = data[idx];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        throw InputError("matrix JSON entries must be [re, im] pairs");
      }
      m(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return matrix_from_json(buf.str());
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write matrix file: " + path);
  out << matrix_to_json(m) << '\n';
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

double hermitian_residual(const Matrix& m) {
  return (m - m.adjoint()).norm();
}

double unitary_residual(const Matrix& m) {
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  return std::max((m.adjoint() * m - id).norm(), (m * m.adjoint() - id).norm());
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).norm();
}

}  // namespace opshift
