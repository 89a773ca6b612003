// SPDX-License-Identifier: Apache-2.0
#include "mimolab/matrix_file.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "mimolab/errors.hpp"

namespace mimolab {

namespace {

bool next_content_line(std::istream& in, std::string& line, long& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    return true;
  }
  return false;
}

}  // namespace

CovarianceMatrix read_covariance(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw MatrixFileError("matrix file: missing 'M <dim>' header");
  }
  std::istringstream header(line);
  std::string tag;
  long long dim = 0;
  if (!(header >> tag >> dim) || tag != "M" || dim < 1) {
    throw MatrixFileError("matrix file: malformed header at line " + std::to_string(line_no));
  }
  const Index m = static_cast<Index>(dim);
  CMatrix r = CMatrix::Zero(m, m);
  std::vector<bool> seen(static_cast<std::size_t>(m * m), false);
  for (Index count = 0; count < m * m; ++count) {
    if (!next_content_line(in, line, line_no)) {
      throw MatrixFileError("matrix file: expected " + std::to_string(m * m) + " entries, found " +
                            std::to_string(count));
    }
    std::istringstream fields(line);
    long long row = -1;
    long long col = -1;
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> row >> col >> re >> im)) {
      throw MatrixFileError("matrix file: malformed entry at line " + std::to_string(line_no));
    }
    if (row < 0 || col < 0 || row >= dim || col >= dim) {
      throw MatrixFileError("matrix file: index out of range at line " + std::to_string(line_no));
    }
    const auto slot = static_cast<std::size_t>(row * dim + col);
    if (seen[slot]) {
      throw MatrixFileError("matrix file: duplicate entry at line " + std::to_string(line_no));
    }
    seen[slot] = true;
    r(row, col) = Complex(re, im);
  }
  if (next_content_line(in, line, line_no)) {
    throw MatrixFileError("matrix file: trailing content at line " + std::to_string(line_no));
  }
  return CovarianceMatrix::from_dense(r, CovarianceModel::custom);
}

CovarianceMatrix read_covariance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MatrixFileError("cannot open matrix file '" + path + "'");
  }
  return read_covariance(in);
}

void write_covariance(std::ostream& out, const CovarianceMatrix& r) {
  const Index m = r.dim();
  out << "M " << m << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index row = 0; row < m; ++row) {
    for (Index col = 0; col < m; ++col) {
      const Complex v = r.entry(row, col);
      out << row << ' ' << col << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
  }
}

void write_covariance_file(const std::string& path, const CovarianceMatrix& r) {
  std::ofstream out(path);
  if (!out) {
    throw MatrixFileError("cannot write matrix file '" + path + "'");
  }
  write_covariance(out, r);
  if (!out) {
    throw MatrixFileError("write failed for matrix file '" + path + "'");
  }
}

}  // namespace mimolab
