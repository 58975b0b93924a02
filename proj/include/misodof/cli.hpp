// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_CLI_HPP
#define MISODOF_CLI_HPP

#include <string>
#include <vector>

#include "misodof/rational.hpp"

namespace misodof::cli {

/// Experiment runner entry point. Subcommands: formulas, region, ledger,
/// simulate, bounds, figures, selftest. Returns 0 on success, 2 on
/// validation failure, 1 on internal error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

/// "a:b:step" inclusive grids, comma lists, or single values; exact
/// arithmetic for the rational form.
std::vector<ExactRatio> parse_rational_grid(const std::string& text);
std::vector<double> parse_double_grid(const std::string& text);
std::vector<int> parse_int_range(const std::string& text);

}  // namespace misodof::cli

#endif  // MISODOF_CLI_HPP
