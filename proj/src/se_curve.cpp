// SPDX-License-Identifier: Apache-2.0
#include "mimolab/se_curve.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mimolab {

std::vector<SEPoint> SECurve::scheme_points(Scheme scheme) const {
  std::vector<SEPoint> out;
  for (const SEPoint& p : points) {
    if (p.scheme == scheme) out.push_back(p);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_se_csv(std::ostream& out, const SECurve& curve) {
  out << kSeCsvHeader << '\n';
  for (const SEPoint& p : curve.points) {
    out << format_double(p.sweep_value) << ',' << to_string(p.scheme) << ',' << format_double(p.se_bits)
        << ',' << format_double(p.half_width) << ',' << p.trials << ',' << p.seed << '\n';
  }
}

namespace {

double parse_double_field(const std::string& s, int line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("SE CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_uint_field(const std::string& s, int line_no) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("SE CSV line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

SECurve read_se_csv(std::istream& in, std::string sweep_name) {
  SECurve curve;
  curve.sweep_name = std::move(sweep_name);
  std::string line;
  if (!std::getline(in, line) || line != kSeCsvHeader) {
    throw std::runtime_error("SE CSV: missing or unexpected header");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) {
      throw std::runtime_error("SE CSV line " + std::to_string(line_no) + ": expected 6 fields");
    }
    SEPoint p;
    p.sweep_value = parse_double_field(fields[0], line_no);
    p.scheme = parse_scheme(fields[1]);
    p.se_bits = parse_double_field(fields[2], line_no);
    p.half_width = parse_double_field(fields[3], line_no);
    p.trials = parse_uint_field(fields[4], line_no);
    p.seed = parse_uint_field(fields[5], line_no);
    curve.points.push_back(p);
  }
  return curve;
}

nlohmann::json se_curve_to_json(const SECurve& curve) {
  nlohmann::json j;
  j["sweep_name"] = curve.sweep_name;
  j["points"] = nlohmann::json::array();
  for (const SEPoint& p : curve.points) {
    j["points"].push_back({{"sweep_value", p.sweep_value},
                           {"scheme", std::string(to_string(p.scheme))},
                           {"se_bits", p.se_bits},
                           {"half_width", p.half_width},
                           {"trials", p.trials},
                           {"seed", p.seed}});
  }
  return j;
}

}  // namespace mimolab
