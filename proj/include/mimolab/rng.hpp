// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "mimolab/linalg.hpp"

namespace mimolab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for an independent stream keyed by (master seed, k1, k2, ...).
// Identical keys always yield the same stream, whatever order the streams
// are created in.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(master, keys));
}

// CN(0, I_M) vector: two independent real normals per entry scaled by 1/sqrt(2).
CVector standard_complex_normal(Index m, Rng& rng);

}  // namespace mimolab
