// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/cli.hpp"

int main(int argc, char** argv) { return misodof::cli::run(argc, argv); }
