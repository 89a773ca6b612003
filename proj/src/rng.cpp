// SPDX-License-Identifier: Apache-2.0
#include "mimolab/rng.hpp"

#include <cmath>

namespace mimolab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t k : keys) {
    s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
  }
  return s;
}

CVector standard_complex_normal(Index m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  CVector w(m);
  for (Index i = 0; i < m; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    w(i) = Complex(re * scale, im * scale);
  }
  return w;
}

}  // namespace mimolab
