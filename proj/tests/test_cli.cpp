// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "misodof/cli.hpp"
#include "misodof/dof_formulas.hpp"

using namespace misodof;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("misodof_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("grid parsers") {
  const auto alphas = cli::parse_rational_grid("0:1:0.05");
  CHECK(alphas.size() == 21);
  CHECK(alphas.front() == ExactRatio(0));
  CHECK(alphas[1] == ExactRatio(1, 20));
  CHECK(alphas.back() == ExactRatio(1));

  const auto listed = cli::parse_rational_grid("1/4,3/4");
  CHECK(listed.size() == 2);
  CHECK(listed[0] == ExactRatio(1, 4));

  const auto dbs = cli::parse_double_grid("20:60:10");
  CHECK(dbs == std::vector<double>{20, 30, 40, 50, 60});

  CHECK(cli::parse_int_range("2:5") == std::vector<int>{2, 3, 4, 5});
  CHECK(cli::parse_int_range("7") == std::vector<int>{7});
  CHECK_THROWS_AS(cli::parse_rational_grid("0:1"), std::invalid_argument);
}

TEST_CASE("unknown flags and bad values exit with the validation code") {
  CHECK(cli::run({"--no-such-flag"}) == 2);
  CHECK(cli::run({"nonexistent-subcommand"}) == 2);
  CHECK(cli::run({"ledger", "--k", "3", "--n", "-1"}) == 2);
  CHECK(cli::run({"ledger", "--k", "3", "--n", "1", "--variant", "bogus"}) == 2);
  CHECK(cli::run({"figures", "--fig", "9"}) == 2);
}

TEST_CASE("ledger subcommand reproduces the walkthrough DoF") {
  TempDir tmp;
  const fs::path out = tmp.path / "trace.csv";
  CHECK(cli::run({"--outdir", tmp.path.string(), "ledger", "--k", "3", "--n", "2", "--variant",
                  "k3-paper", "--out", "trace.csv"}) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("# dof = 10/7") != std::string::npos);
  CHECK(text.find("# order1_delivered = 30") != std::string::npos);
  CHECK(text.find("# slots = 21") != std::string::npos);
  CHECK(text.find("step,kind,j,slots,consumed_order") != std::string::npos);
}

TEST_CASE("formulas output is deterministic and bound-respecting") {
  TempDir tmp;
  CHECK(cli::run({"--outdir", tmp.path.string(), "formulas", "--k", "2:6", "--alpha",
                  "0:1:0.25", "--out", "a.csv"}) == 0);
  CHECK(cli::run({"--outdir", tmp.path.string(), "formulas", "--k", "2:6", "--alpha",
                  "0:1:0.25", "--out", "b.csv"}) == 0);
  const std::string a = slurp(tmp.path / "a.csv");
  CHECK(a == slurp(tmp.path / "b.csv"));  // byte-identical rerun

  // Parse rational rows back and compare against the outer bound exactly.
  std::istringstream in(a);
  std::string line;
  bool seen_header = false;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    const int k = std::stoi(cells[0]);
    const ExactRatio alpha = ExactRatio::parse(cells[1]);
    const ExactRatio dof{BigInt(cells[3]), BigInt(cells[4])};
    CHECK(dof <= dof_outer_sum(k, alpha));
    ++rows;
  }
  CHECK(rows == 5 * 5 * 5);  // 5 K values x 5 alphas x 5 schemes
}

TEST_CASE("figures emit the documented endpoints") {
  TempDir tmp;
  CHECK(cli::run({"--outdir", tmp.path.string(), "figures", "--fig", "3", "--k", "5", "--alpha",
                  "0:1:0.5", "--out", "fig3.csv"}) == 0);
  const std::string fig3 = slurp(tmp.path / "fig3.csv");
  CHECK(fig3.find("alpha,scheme,dof") != std::string::npos);
  // alpha = 0 endpoint: KMAT = 5/3; alpha = 1 endpoint: KMAT = 5.
  std::istringstream in(fig3);
  std::string line;
  bool low_end = false, high_end = false;
  while (std::getline(in, line)) {
    if (line.rfind("0,KMAT,", 0) == 0 && line.find(",5,3") != std::string::npos) low_end = true;
    if (line.rfind("1,KMAT,", 0) == 0 && line.find(",5,1") != std::string::npos) high_end = true;
  }
  CHECK(low_end);
  CHECK(high_end);

  CHECK(cli::run({"--outdir", tmp.path.string(), "figures", "--fig", "2", "--out",
                  "fig2.csv"}) == 0);
  const std::string fig2 = slurp(tmp.path / "fig2.csv");
  CHECK(fig2.find("2,MAT,") != std::string::npos);
  CHECK(fig2.find("2,ALTMAT,") != std::string::npos);
}

TEST_CASE("region subcommand answers membership queries") {
  TempDir tmp;
  CHECK(cli::run({"--outdir", tmp.path.string(), "region", "--k", "2", "--alpha", "0",
                  "--point", "2/3,2/3"}) == 0);
  CHECK(cli::run({"--outdir", tmp.path.string(), "region", "--k", "2", "--alpha", "0",
                  "--point", "1,1"}) == 0);
  CHECK(cli::run({"region", "--k", "2", "--alpha", "0", "--point", "1"}) == 2);
  CHECK(cli::run({"--outdir", tmp.path.string(), "region", "--k", "3", "--alpha", "1/2",
                  "--out", "constraints.csv"}) == 0);
  const std::string text = slurp(tmp.path / "constraints.csv");
  CHECK(text.find("p,tuple,c1,c2,c3,rhs") != std::string::npos);
  CHECK(text.find("2,1-2,1,1/2,0,") != std::string::npos);
}

TEST_CASE("simulate and bounds subcommands write their sweeps") {
  TempDir tmp;
  CHECK(cli::run({"--outdir", tmp.path.string(), "simulate", "--snr", "20:60:10", "--trials",
                  "100", "--alpha", "0.5", "--out-prefix", "mini"}) == 0);
  const std::string power = slurp(tmp.path / "mini_power.csv");
  CHECK(power.find("P_db,rx,group,mean_power,trials,seed") != std::string::npos);
  CHECK(power.find("own_leader") != std::string::npos);
  const std::string rates = slurp(tmp.path / "mini_rates.csv");
  CHECK(rates.find("P_db,symbol,sinr_db,rate_bits") != std::string::npos);
  CHECK(rates.find("zf") != std::string::npos);

  CHECK(cli::run({"--outdir", tmp.path.string(), "bounds", "--lemma", "out", "--dims", "3,2,3",
                  "--trials", "200", "--out", "lemma.csv"}) == 0);
  const std::string lemma = slurp(tmp.path / "lemma.csv");
  CHECK(lemma.find("sigma2,lhs,stderr") != std::string::npos);
  CHECK(lemma.find("# verdict = PASS") != std::string::npos);
  CHECK(cli::run({"bounds", "--lemma", "nope"}) == 2);
}

TEST_CASE("selftest aggregates the invariant suite") { CHECK(cli::run({"selftest"}) == 0); }

TEST_CASE("config file provides defaults, flags override") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# ledger defaults\n";
    out << "k = 3\n";
    out << "n = 2\n";
    out << "variant = k3-paper\n";
    out << "out = from_config.csv\n";
  }
  CHECK(cli::run({"--outdir", tmp.path.string(), "--config", cfg.string(), "ledger"}) == 0);
  CHECK(fs::exists(tmp.path / "from_config.csv"));
  // Flag overrides the config value.
  CHECK(cli::run({"--outdir", tmp.path.string(), "--config", cfg.string(), "ledger", "--out",
                  "override.csv", "--n", "1"}) == 0);
  const std::string text = slurp(tmp.path / "override.csv");
  CHECK(text.find("# n = 1") != std::string::npos);
}
