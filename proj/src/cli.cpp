// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "misodof/altmat.hpp"
#include "misodof/bounds.hpp"
#include "misodof/channel.hpp"
#include "misodof/csv.hpp"
#include "misodof/dof_formulas.hpp"
#include "misodof/kmat.hpp"
#include "misodof/region.hpp"

namespace misodof::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::kInitPhase: return "init-phase";
    case StepKind::kIterationPhase: return "iter-phase";
    case StepKind::kOrderKBroadcast: return "broadcast";
    case StepKind::kTermination: return "termination";
  }
  return "?";
}

const char* group_label(int g) {
  static constexpr std::array<const char*, kSignalGroupCount> kNames = {
      "own_leader", "own_rest", "cross", "zf_own", "zf_other"};
  return kNames[static_cast<std::size_t>(g)];
}

std::filesystem::path resolve_out(const std::string& outdir, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute()) return p;
  return std::filesystem::path(outdir) / p;
}

using ResolvedConfig = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// formulas

int cmd_formulas(const std::string& outdir, const std::string& out,
                 const std::string& k_range, const std::string& alpha_grid) {
  const std::vector<int> ks = parse_int_range(k_range);
  const std::vector<ExactRatio> alphas = parse_rational_grid(alpha_grid);
  const std::vector<FigureRow> rows = figure_tables(ks, alphas);

  CsvWriter csv(resolve_out(outdir, out).string());
  csv.comment("misodof formulas");
  csv.config({{"k", k_range}, {"alpha", alpha_grid}});
  csv.header({"K", "alpha", "scheme", "dof_num", "dof_den", "dof_float"});
  for (const FigureRow& row : rows) {
    if (row.dof > dof_outer_sum(row.k, row.alpha))
      throw std::logic_error("formulas: achievable row above the outer bound");
    csv.row(row.k, row.alpha.str(), scheme_name(row.scheme), row.dof.num().str(),
            row.dof.den().str(), row.dof.to_double());
  }
  std::cout << "formulas: wrote " << rows.size() << " rows\n";
  return 0;
}

// ---------------------------------------------------------------------------
// region

int cmd_region(const std::string& outdir, const std::string& out, int k,
               const std::string& alpha_text, const std::string& point_text,
               const std::string& weights_text, bool identity_only) {
  const ExactRatio alpha = ExactRatio::parse(alpha_text);
  const ConstraintSystem sys =
      build_constraints(k, alpha,
                        identity_only ? TupleEnumeration::kIdentityPrefixOnly
                                      : TupleEnumeration::kAllOrderedTuples);

  if (!out.empty()) {
    CsvWriter csv(resolve_out(outdir, out).string());
    csv.comment("misodof region constraints");
    csv.config({{"k", std::to_string(k)},
                {"alpha", alpha.str()},
                {"enumeration", identity_only ? "identity-only" : "ordered-tuples"}});
    std::vector<std::string> head = {"p", "tuple"};
    for (int i = 1; i <= k; ++i) head.push_back("c" + std::to_string(i));
    head.push_back("rhs");
    csv.header(head);
    for (const LinearConstraint& c : sys.constraints) {
      std::string tuple;
      for (std::size_t i = 0; i < c.tuple.size(); ++i)
        tuple += (i == 0 ? "" : "-") + std::to_string(c.tuple[i] + 1);
      std::vector<std::string> cells = {std::to_string(c.p), tuple};
      for (int i = 0; i < k; ++i) cells.push_back(c.coeffs(i).str());
      cells.push_back(c.rhs.str());
      csv.row_strings(cells);
    }
  }

  if (!point_text.empty()) {
    const std::vector<std::string> parts = split(point_text, ',');
    if (static_cast<int>(parts.size()) != k)
      throw std::invalid_argument("region: --point needs exactly K entries");
    RationalVector point(k);
    for (int i = 0; i < k; ++i) point(i) = ExactRatio::parse(trim(parts[i]));
    std::size_t violated = 0;
    if (is_member(point, sys, &violated)) {
      std::cout << "member: yes\n";
    } else {
      const LinearConstraint& c = sys.constraints[violated];
      std::cout << "member: no (violates constraint " << violated << ", p = " << c.p << ")\n";
    }
  }

  RationalVector weights = RationalVector::Constant(k, ExactRatio(1));
  if (!weights_text.empty()) {
    const std::vector<std::string> parts = split(weights_text, ',');
    if (static_cast<int>(parts.size()) != k)
      throw std::invalid_argument("region: --weights needs exactly K entries");
    for (int i = 0; i < k; ++i) weights(i) = ExactRatio::parse(trim(parts[i]));
  }
  const LpSolution lp = max_weighted_sum(sys, weights);
  std::cout << "constraints: " << sys.tuple_count << " tuple rows\n";
  std::cout << "lp optimum: " << lp.value.str() << " = " << lp.value.to_double() << " at (";
  for (int i = 0; i < k; ++i) std::cout << (i ? ", " : "") << lp.point(i).str();
  std::cout << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ledger

int cmd_ledger(const std::string& outdir, const std::string& out, int k, int n,
               const std::string& variant_text) {
  ScheduleVariant variant;
  if (variant_text == "general") {
    variant = ScheduleVariant::kGeneral;
  } else if (variant_text == "k3-paper") {
    variant = ScheduleVariant::kK3Paper;
  } else {
    throw std::invalid_argument("ledger: --variant must be general or k3-paper, got '" +
                                variant_text + "'");
  }
  const ScheduleTrace trace = run_altmat(k, n, variant);
  const ExactRatio dof = finite_n_dof(k, n, variant);

  if (!out.empty()) {
    CsvWriter csv(resolve_out(outdir, out).string());
    csv.comment("misodof ledger");
    csv.config({{"k", std::to_string(k)},
                {"n", std::to_string(n)},
                {"variant", variant_text}});
    csv.comment("order1_delivered = " + std::to_string(trace.order1_delivered()));
    csv.comment("slots = " + std::to_string(trace.total_slots()));
    csv.comment("dof = " + dof.str());
    csv.comment("replication_multiplier = " + std::to_string(trace.replication_multiplier));
    csv.header({"step", "kind", "j", "slots", "consumed_order", "consumed_count",
                "generated_order", "generated_count"});
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
      const TraceStep& step = trace.steps[s];
      const std::size_t lines = std::max<std::size_t>(
          1, std::max(step.consumed.size(), step.generated.size()));
      for (std::size_t l = 0; l < lines; ++l) {
        const OrderCount c = l < step.consumed.size() ? step.consumed[l] : OrderCount{};
        const OrderCount g = l < step.generated.size() ? step.generated[l] : OrderCount{};
        csv.row(s, step_kind_name(step.kind), step.j, l == 0 ? step.slots : 0,
                c.order, c.count, g.order, g.count);
      }
    }
  }
  std::cout << "ledger: K = " << k << ", n = " << n << ", " << trace.order1_delivered()
            << " order-1 symbols in " << trace.total_slots() << " slots, DoF = " << dof.str()
            << " = " << dof.to_double() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& outdir, const std::string& out_prefix, int k, int m, int j,
                 const std::string& alpha_text, const std::string& snr_text, int trials,
                 bool quantize, std::uint64_t seed) {
  SystemConfig config;
  config.k = k;
  config.m = m;
  config.alpha = ExactRatio::parse(alpha_text).to_double();
  const std::vector<double> grid = parse_double_grid(snr_text);
  const StreamKey key{seed, 0, 0};
  const ResolvedConfig resolved = {
      {"k", std::to_string(k)},        {"m", std::to_string(m)},
      {"j", std::to_string(j)},        {"alpha", alpha_text},
      {"snr", snr_text},               {"trials", std::to_string(trials)},
      {"quantize", quantize ? "1" : "0"}, {"seed", std::to_string(seed)}};

  {
    CsvWriter csv(resolve_out(outdir, out_prefix + "_power.csv").string());
    csv.comment("misodof simulate: per-group mean received powers");
    csv.config(resolved);
    csv.header({"P_db", "rx", "group", "mean_power", "trials", "seed"});
    for (std::size_t g = 0; g < grid.size(); ++g) {
      SystemConfig at = config;
      at.snr = db_to_linear(grid[g]);
      const Eigen::MatrixXd mean =
          power_report(at, j, trials, key.with_stream(g));
      for (int rx = 0; rx < k; ++rx)
        for (int grp = 0; grp < kSignalGroupCount; ++grp)
          csv.row(grid[g], rx + 1, group_label(grp), mean(rx, grp), trials,
                  std::to_string(seed));
    }
  }
  {
    const RateSweep sweep = decode_rate_sweep(config, j, grid, trials, key, quantize, 0);
    CsvWriter csv(resolve_out(outdir, out_prefix + "_rates.csv").string());
    csv.comment("misodof simulate: post-equalization SINR and rates at RX 1");
    csv.config(resolved);
    for (double db : sweep.excluded_db)
      csv.comment("excluded " + CsvWriter::format(db) + " dB: below asymptotic regime (clamp)");
    csv.header({"P_db", "symbol", "sinr_db", "rate_bits"});
    for (std::size_t g = 0; g < sweep.used_db.size(); ++g) {
      for (std::size_t s = 0; s < sweep.alt_sinr[g].size(); ++s) {
        const double sinr = sweep.alt_sinr[g][s];
        csv.row(sweep.used_db[g], "alt" + std::to_string(s), 10.0 * std::log10(sinr),
                std::log2(1.0 + sinr));
      }
      csv.row(sweep.used_db[g], "zf", 10.0 * std::log10(sweep.zf_sinr[g]),
              std::log2(1.0 + sweep.zf_sinr[g]));
    }
    std::cout << "simulate: zf sinr slope = " << sweep.zf_sinr_slope.slope << " (target alpha = "
              << config.alpha << ")\n";
    for (std::size_t s = 0; s < sweep.alt_sinr_slopes.size(); ++s)
      std::cout << "simulate: alt" << s << " sinr slope = " << sweep.alt_sinr_slopes[s].slope
                << " (target 1 - alpha = " << 1.0 - config.alpha << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const std::string& outdir, const std::string& out, const std::string& lemma,
               const std::string& dims_text, int trials, std::uint64_t seed) {
  const std::vector<std::string> dim_parts = split(dims_text, ',');
  std::vector<int> dims;
  for (const auto& p : dim_parts) dims.push_back(std::stoi(trim(p)));
  const StreamKey key{seed, 0, 0};

  LemmaVerdict verdict;
  ResolvedConfig resolved = {{"lemma", lemma},
                             {"dims", dims_text},
                             {"trials", std::to_string(trials)},
                             {"seed", std::to_string(seed)}};
  if (lemma == "out") {
    if (dims.size() != 3) throw std::invalid_argument("bounds: --dims N1,N2,M for lemma out");
    LemmaOutInstance inst = make_lemma_out_instance(0, key);
    if (dims != std::vector<int>{inst.n1, inst.n2, inst.m}) {
      // Rebuild a random instance at the requested sizes.
      auto rng = key.with_stream(1).make_rng();
      inst.n1 = dims[0];
      inst.n2 = dims[1];
      inst.m = dims[2];
      inst.h_hat1.resize(inst.n1, inst.m);
      inst.h_hat2.resize(inst.n2, inst.m);
      for (int r = 0; r < inst.n1; ++r)
        for (int c = 0; c < inst.m; ++c) inst.h_hat1(r, c) = complex_gaussian(rng, 1.0);
      for (int r = 0; r < inst.n2; ++r)
        for (int c = 0; c < inst.m; ++c) inst.h_hat2(r, c) = complex_gaussian(rng, 1.0);
      Eigen::VectorXd lambda(inst.m);
      for (int i = 0; i < inst.m; ++i)
        lambda(i) = std::pow(inst.p, std::max(0.0, 1.0 - 0.5 * i));
      inst.kcov = lambda.cast<Complex>().asDiagonal();
    }
    verdict = lemma_out_slope(inst, trials, key);
  } else if (lemma == "caseb") {
    if (dims.size() != 2) throw std::invalid_argument("bounds: --dims n,m for lemma caseb");
    CasebInstance inst = make_caseb_instance(0, key);
    if (dims != std::vector<int>{inst.n, inst.m}) {
      auto rng = key.with_stream(1).make_rng();
      inst.n = dims[0];
      inst.m = dims[1];
      inst.h_hat.resize(inst.n, inst.m);
      for (int r = 0; r < inst.n; ++r)
        for (int c = 0; c < inst.m; ++c) inst.h_hat(r, c) = complex_gaussian(rng, 1.0);
      inst.lambda.resize(inst.m);
      for (int i = 0; i < inst.m; ++i) inst.lambda(i) = std::pow(10.0, 3 - i);
    }
    verdict = lemma_caseb_slope(inst.n, inst.m, inst.h_hat, inst.lambda, inst.sigma2_grid,
                                trials, key);
  } else {
    throw std::invalid_argument("bounds: --lemma must be out or caseb, got '" + lemma + "'");
  }

  if (!out.empty()) {
    CsvWriter csv(resolve_out(outdir, out).string());
    csv.comment("misodof bounds");
    csv.config(resolved);
    csv.comment("slope = " + CsvWriter::format(verdict.slope.slope));
    csv.comment("bound = " + CsvWriter::format(verdict.bound) + " (+0.05 tolerance)");
    csv.comment(std::string("verdict = ") + (verdict.pass ? "PASS" : "FAIL"));
    csv.header({"sigma2", "lhs", "stderr"});
    for (const LemmaPoint& p : verdict.points) csv.row(p.sigma2, p.lhs, p.stderr);
  }
  std::cout << "bounds: lemma " << lemma << " slope = " << verdict.slope.slope
            << ", bound = " << verdict.bound << " (+0.05) -> "
            << (verdict.pass ? "PASS" : "FAIL") << "\n";
  return verdict.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// figures

int cmd_figures(const std::string& outdir, const std::string& out, int fig,
                const std::string& k_text, const std::string& alpha_text) {
  CsvWriter csv(resolve_out(outdir, out).string());
  csv.comment("misodof figures: fig " + std::to_string(fig));
  csv.config({{"fig", std::to_string(fig)}, {"k", k_text}, {"alpha", alpha_text}});

  const auto emit = [&](const std::string& label, int k, const ExactRatio& alpha,
                        DofScheme scheme, const ExactRatio& dof) {
    if (dof > dof_outer_sum(k, alpha))
      throw std::logic_error("figures: achievable row above the outer bound");
    csv.row(label, scheme_name(scheme), dof.to_double(), dof.num().str(), dof.den().str());
  };

  if (fig == 2) {
    const std::vector<int> ks = parse_int_range(k_text.empty() ? "2:10" : k_text);
    csv.header({"K", "scheme", "dof", "dof_num", "dof_den"});
    for (int k : ks) {
      emit(std::to_string(k), k, ExactRatio(0), DofScheme::kMat, dof_mat(k));
      emit(std::to_string(k), k, ExactRatio(0), DofScheme::kAltmatLimit, dof_altmat_limit(k));
    }
  } else if (fig == 3) {
    const int k = k_text.empty() ? 5 : parse_int_range(k_text).at(0);
    const std::vector<ExactRatio> alphas =
        parse_rational_grid(alpha_text.empty() ? "0:1:0.05" : alpha_text);
    csv.header({"alpha", "scheme", "dof", "dof_num", "dof_den"});
    for (const ExactRatio& a : alphas) {
      emit(a.str(), k, a, DofScheme::kMat, dof_mat(k));
      emit(a.str(), k, a, DofScheme::kZf, dof_zf(k, a));
      emit(a.str(), k, a, DofScheme::kKmat, dof_kmat(k, a));
      emit(a.str(), k, a, DofScheme::kOuter, dof_outer_sum(k, a));
    }
  } else if (fig == 4) {
    const ExactRatio alpha = ExactRatio::parse(alpha_text.empty() ? "1/2" : alpha_text);
    const std::vector<int> ks = parse_int_range(k_text.empty() ? "2:10" : k_text);
    csv.header({"K", "scheme", "dof", "dof_num", "dof_den"});
    for (int k : ks) {
      emit(std::to_string(k), k, alpha, DofScheme::kMat, dof_mat(k));
      emit(std::to_string(k), k, alpha, DofScheme::kZf, dof_zf(k, alpha));
      emit(std::to_string(k), k, alpha, DofScheme::kKmat, dof_kmat(k, alpha));
      emit(std::to_string(k), k, alpha, DofScheme::kOuter, dof_outer_sum(k, alpha));
    }
  } else {
    throw std::invalid_argument("figures: --fig must be 2, 3 or 4");
  }
  std::cout << "figures: fig " << fig << " written\n";
  return 0;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest() {
  int checks = 0;
  const auto ok = [&](const std::string& what, bool pass) {
    std::cout << (pass ? "ok   " : "FAIL ") << what << "\n";
    ++checks;
    if (!pass) throw std::runtime_error("selftest failed: " + what);
  };

  // Exact formula layer.
  ok("harmonic(5) = 137/60", harmonic(5) == ExactRatio(137, 60));
  bool sandwich = true;
  for (int k = 2; k <= 8; ++k) {
    for (int i = 0; i <= 10; ++i) {
      const ExactRatio a(i, 10);
      const ExactRatio outer = dof_outer_sum(k, a);
      sandwich &= dof_kmat(k, a) <= outer && dof_zf(k, a) <= outer && dof_mat(k) <= outer;
    }
  }
  ok("achievable <= outer on the grid", sandwich);

  // Region layer: LP equals the closed form.
  bool lp_ok = true;
  for (int k = 2; k <= 3; ++k)
    for (const auto& check : verify_outer_formula(k, {ExactRatio(0), ExactRatio(1, 2), ExactRatio(1)}))
      lp_ok &= check.equal;
  ok("lp optimum = closed-form bound (K = 2, 3)", lp_ok);

  // Ledger layer.
  bool balance = true;
  for (int k = 3; k <= 6; ++k) balance &= check_lemma1(k).all_balanced;
  ok("per-order generation balance (K = 3..6)", balance);
  bool telescoped = true;
  for (int k = 2; k <= 8; ++k) telescoped &= telescoped_dof1(k) == dof_altmat_limit(k);
  ok("telescoped DoF_1 = 2K/(K+1) (K = 2..8)", telescoped);
  ok("K3 walkthrough DoF (n = 2) = 10/7",
     finite_n_dof(3, 2, ScheduleVariant::kK3Paper) == ExactRatio(10, 7));

  // Physical layer spot checks.
  const StreamKey key{411901, 0, 0};
  const E2eReport e2e = altmat_e2e(1, key);
  ok("end-to-end walkthrough exact (n = 1)",
     e2e.symbols_recovered == e2e.symbols_expected && e2e.max_rel_error < 1e-8 &&
         e2e.rank_failures == 0 && e2e.slots == e2e.ledger_slots);

  SystemConfig config;
  config.k = 3;
  config.m = 3;
  config.snr = 1e4;
  config.alpha = 0.5;
  const GroupBudget b = kmat_group_budget(config.snr, config.alpha, 3);
  ok("order-j leader budget at the reference point",
     std::abs(b.leader - (0.5 * (1e4 - 1e2) - 100.0 / 3.0)) < 1e-6);

  const LemmaVerdict out_v = lemma_out_slope(make_lemma_out_instance(0, key), 400, key);
  ok("log-det difference lemma instance 0", out_v.pass);
  const CasebInstance cb = make_caseb_instance(0, key);
  const LemmaVerdict cb_v =
      lemma_caseb_slope(cb.n, cb.m, cb.h_hat, cb.lambda, cb.sigma2_grid, 400, key);
  ok("log-det lower bound instance 0", cb_v.pass);

  std::cout << "selftest: " << checks << " checks passed\n";
  return 0;
}

}  // namespace

std::vector<ExactRatio> parse_rational_grid(const std::string& text) {
  std::vector<ExactRatio> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("grid must be a:b:step, got '" + text + "'");
    const ExactRatio a = ExactRatio::parse(trim(parts[0]));
    const ExactRatio b = ExactRatio::parse(trim(parts[1]));
    const ExactRatio step = ExactRatio::parse(trim(parts[2]));
    if (step <= ExactRatio(0)) throw std::invalid_argument("grid step must be positive");
    for (ExactRatio v = a; v <= b; v += step) values.push_back(v);
    return values;
  }
  for (const auto& part : split(text, ',')) values.push_back(ExactRatio::parse(trim(part)));
  return values;
}

std::vector<double> parse_double_grid(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("grid must be a:b:step, got '" + text + "'");
    const double a = std::stod(trim(parts[0]));
    const double b = std::stod(trim(parts[1]));
    const double step = std::stod(trim(parts[2]));
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
    for (double v = a; v <= b + 1e-9; v += step) values.push_back(v);
    return values;
  }
  for (const auto& part : split(text, ',')) values.push_back(std::stod(trim(part)));
  return values;
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2 && parts.size() != 3)
      throw std::invalid_argument("range must be a:b or a:b:step, got '" + text + "'");
    const int a = std::stoi(trim(parts[0]));
    const int b = std::stoi(trim(parts[1]));
    const int step = parts.size() == 3 ? std::stoi(trim(parts[2])) : 1;
    if (step <= 0) throw std::invalid_argument("range step must be positive");
    for (int v = a; v <= b; v += step) values.push_back(v);
    return values;
  }
  for (const auto& part : split(text, ',')) values.push_back(std::stoi(trim(part)));
  return values;
}

namespace {

// Flat `key = value` config support: the pairs are injected as flags right
// after the subcommand token, so explicit command-line flags override them.
std::vector<std::string> inject_config(std::vector<std::string> args, CLI::App& app) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config file '" + config_path + "'");
  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    sub = app.get_subcommand_no_throw(args[i]);
    if (sub != nullptr) {
      sub_pos = i;
      break;
    }
  }
  if (sub == nullptr)
    throw std::invalid_argument("--config requires a subcommand to apply to");

  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key = value: '" + t + "'");
    const std::string k = trim(t.substr(0, eq));
    const std::string v = trim(t.substr(eq + 1));
    if (sub->get_option_no_throw("--" + k) == nullptr)
      continue;  // keys for other subcommands are ignored
    injected.push_back("--" + k);
    injected.push_back(v);
  }
  args.insert(args.begin() + sub_pos + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"misodof: DoF schemes and bounds for the MISO broadcast channel "
               "with delayed and imperfect current CSIT"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string outdir = ".";
  app.add_option("--outdir", outdir, "output directory")->envname("MISODOF_OUTDIR");

  // formulas
  auto* formulas = app.add_subcommand("formulas", "exact DoF table over a (K, alpha) grid");
  std::string f_k = "2:10", f_alpha = "0:1:0.05", f_out = "formulas.csv";
  formulas->add_option("--k", f_k, "K range a:b or list");
  formulas->add_option("--alpha", f_alpha, "alpha grid a:b:step (exact rationals)");
  formulas->add_option("--out", f_out, "output CSV");

  // region
  auto* region = app.add_subcommand("region", "outer-bound polytope queries");
  int r_k = 3;
  std::string r_alpha = "1/2", r_point, r_weights, r_out;
  bool r_identity = false;
  region->add_option("--k", r_k, "user count")->check(CLI::Range(2, 6));
  region->add_option("--alpha", r_alpha, "CSIT quality exponent (rational)");
  region->add_option("--point", r_point, "membership query d1,d2,...");
  region->add_option("--weights", r_weights, "LP objective weights (default all ones)");
  region->add_flag("--identity-only", r_identity,
                   "restrict tuple enumeration to identity prefixes (comparison mode)");
  region->add_option("--out", r_out, "constraint CSV export");

  // ledger
  auto* ledger = app.add_subcommand("ledger", "exact message/slot schedule accounting");
  int l_k = 3, l_n = 1;
  std::string l_variant = "general", l_out;
  ledger->add_option("--k", l_k, "user count")->check(CLI::Range(2, 64));
  ledger->add_option("--n", l_n, "main iterations")->check(CLI::NonNegativeNumber);
  ledger->add_option("--variant", l_variant, "general | k3-paper");
  ledger->add_option("--out", l_out, "trace CSV");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo order-j slot sweeps");
  int s_k = 3, s_m = 3, s_j = 1, s_trials = 2000;
  std::string s_alpha = "0.5", s_snr = "20:60:10", s_prefix = "simulate";
  bool s_quantize = false;
  std::uint64_t s_seed = 20231107;
  simulate->add_option("--k", s_k, "user count");
  simulate->add_option("--m", s_m, "transmit antennas");
  simulate->add_option("--j", s_j, "phase order");
  simulate->add_option("--alpha", s_alpha, "CSIT quality exponent");
  simulate->add_option("--snr", s_snr, "SNR grid in dB, a:b:step");
  simulate->add_option("--trials", s_trials, "Monte Carlo trials per grid point");
  simulate->add_flag("--quantize", s_quantize, "quantize genie equations");
  simulate->add_option("--seed", s_seed, "master seed");
  simulate->add_option("--out-prefix", s_prefix, "output file prefix");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "appendix log-det lemma checks");
  std::string b_lemma = "out", b_dims = "3,2,3", b_out;
  int b_trials = 2000;
  std::uint64_t b_seed = 20231107;
  bounds->add_option("--lemma", b_lemma, "out | caseb");
  bounds->add_option("--dims", b_dims, "N1,N2,M (out) or n,m (caseb)");
  bounds->add_option("--trials", b_trials, "Monte Carlo trials per point");
  bounds->add_option("--seed", b_seed, "master seed");
  bounds->add_option("--out", b_out, "points CSV");

  // figures
  auto* figures = app.add_subcommand("figures", "figure-data reproduction");
  int g_fig = 3;
  std::string g_k, g_alpha, g_out = "figure.csv";
  figures->add_option("--fig", g_fig, "figure id: 2, 3 or 4")->check(CLI::Range(2, 4));
  figures->add_option("--k", g_k, "K or K range override");
  figures->add_option("--alpha", g_alpha, "alpha grid (fig 3) or value (fig 4)");
  figures->add_option("--out", g_out, "output CSV");

  auto* selftest = app.add_subcommand("selftest", "condensed invariant suite");

  try {
    const std::vector<std::string> args = inject_config(raw_args, app);
    // CLI11 parses reversed vectors.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (formulas->parsed()) return cmd_formulas(outdir, f_out, f_k, f_alpha);
    if (region->parsed())
      return cmd_region(outdir, r_out, r_k, r_alpha, r_point, r_weights, r_identity);
    if (ledger->parsed()) return cmd_ledger(outdir, l_out, l_k, l_n, l_variant);
    if (simulate->parsed())
      return cmd_simulate(outdir, s_prefix, s_k, s_m, s_j, s_alpha, s_snr, s_trials, s_quantize,
                          s_seed);
    if (bounds->parsed()) return cmd_bounds(outdir, b_out, b_lemma, b_dims, b_trials, b_seed);
    if (figures->parsed()) return cmd_figures(outdir, g_out, g_fig, g_k, g_alpha);
    if (selftest->parsed()) return cmd_selftest();
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace misodof::cli
