// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mimolab/combining.hpp"

namespace mimolab {

struct SEPoint {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::MRC;
  double se_bits = 0.0;
  double half_width = 0.0;  // 95% confidence
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct SECurve {
  std::string sweep_name;
  std::vector<SEPoint> points;

  // Points of one scheme in sweep order.
  std::vector<SEPoint> scheme_points(Scheme scheme) const;
};

inline constexpr const char* kSeCsvHeader = "sweep_value,scheme,se_bits,half_width,trials,seed";

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_se_csv(std::ostream& out, const SECurve& curve);
// Parses the CSV written by write_se_csv; throws std::runtime_error on
// schema violations.
SECurve read_se_csv(std::istream& in, std::string sweep_name = {});

nlohmann::json se_curve_to_json(const SECurve& curve);

}  // namespace mimolab
