// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mimolab/config.hpp"
#include "mimolab/se_curve.hpp"

namespace mimolab {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

struct SpectrumRow {
  int index = 0;  // 1-based rank
  double eigenvalue = 0.0;
  std::string model;
};

// Eigenvalues averaged over theta_draws random angles per model.
std::vector<SpectrumRow> cmd_eigenspectrum(const RunConfig& config);
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows);

nlohmann::json cmd_check_asymptotics(const RunConfig& config);
nlohmann::json cmd_two_user_limit(const RunConfig& config);
SECurve cmd_sweeps(const RunConfig& config);

// Runs one command end to end and writes its output file(s). Errors are
// reported to err and mapped to the ExitCode values.
int run_command(const RunConfig& config, std::ostream& err);

// Entry point shared by the mimolab executable and the tests.
int cli_main(int argc, char** argv);

}  // namespace mimolab
