// SPDX-License-Identifier: Apache-2.0
//
// Text format for custom covariance matrices:
//
//   M <dim>
//   <row> <col> <re> <im>      (M*M lines, 0-based indices, any order)
//
// Lines starting with '#' and blank lines are ignored.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mimolab/covariance.hpp"

namespace mimolab {

class MatrixFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CovarianceMatrix read_covariance(std::istream& in);
CovarianceMatrix read_covariance_file(const std::string& path);

void write_covariance(std::ostream& out, const CovarianceMatrix& r);
void write_covariance_file(const std::string& path, const CovarianceMatrix& r);

}  // namespace mimolab
