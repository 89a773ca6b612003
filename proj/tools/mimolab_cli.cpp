// SPDX-License-Identifier: Apache-2.0
#include "mimolab/commands.hpp"

int main(int argc, char** argv) { return mimolab::cli_main(argc, argv); }
