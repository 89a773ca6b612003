// SPDX-License-Identifier: Apache-2.0
//
// Receive combiners (MRC, S-MMSE, M-MMSE) and the instantaneous effective
// SINR they are evaluated with.
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mimolab/linalg.hpp"

namespace mimolab {

enum class Scheme { MRC, S_MMSE, M_MMSE };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct UserId {
  int cell = 0;
  int user = 0;
};

struct CombinerWeights {
  Scheme scheme = Scheme::MRC;
  UserId target;
  CVector vector;
  // Set when the target estimate is exactly zero; vector is then zero.
  bool degenerate = false;
};

// Z (or Z-bar for S-MMSE): Hermitian PD, Z >= I / rho.
struct InterferenceCore {
  CMatrix z;
  double rho = 1.0;
};

struct CoreVariant {
  enum class Kind { two_user, multicell, smmse };
  Kind kind = Kind::multicell;
  int serving_cell = 0;  // used by smmse only
};

// two_user / multicell: Z = sum (R - Phi) + I / rho.
// smmse: own-cell links contribute (R - Phi), other cells the whole R.
// cells[u] is the cell of user u and is only read by the smmse variant.
InterferenceCore build_interference_core(std::span<const CMatrix> r_all,
                                         std::span<const CMatrix> phi_all, double rho,
                                         CoreVariant variant = {},
                                         std::span<const int> cells = {});

CombinerWeights mrc_combiner(const CVector& h_hat_target, UserId target = {});

// v = (sum_u h_hat_u h_hat_u^H + Z)^{-1} h_hat_target.
CombinerWeights mmse_combiner(std::span<const CVector> estimates, const InterferenceCore& core,
                              std::size_t target_index, UserId target = {});

// Same solve restricted to the serving cell's own estimates, with Z-bar.
CombinerWeights smmse_combiner(std::span<const CVector> own_cell_estimates,
                               const InterferenceCore& zbar, std::size_t target_index,
                               UserId target = {});

// |v^H h_t|^2 / (v^H (sum_{u != t} h_u h_u^H + Z) v). Throws
// DegenerateScenario for v = 0.
double instantaneous_sinr(const CVector& v, std::span<const CVector> estimates,
                          const InterferenceCore& core, std::size_t target_index);

struct SinrForms {
  double direct = 0.0;  // h1^H (h2 h2^H + Z)^{-1} h1
  double rank1 = 0.0;   // matrix-inversion-lemma form
};

SinrForms mmse_sinr_two_forms(const CVector& h1_hat, const CVector& h2_hat, const CMatrix& z);

}  // namespace mimolab
