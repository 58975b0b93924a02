// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/dof_formulas.hpp"

#include <stdexcept>

namespace misodof {

namespace {

void require_users(int k, int min_k, const char* where) {
  if (k < min_k)
    throw std::invalid_argument(std::string(where) + ": K >= " + std::to_string(min_k) +
                                " required, got " + std::to_string(k));
}

void require_alpha(const ExactRatio& alpha, const char* where) {
  if (alpha < ExactRatio(0) || alpha > ExactRatio(1))
    throw std::invalid_argument(std::string(where) + ": alpha in [0,1] required, got " +
                                alpha.str());
}

}  // namespace

std::string scheme_name(DofScheme scheme) {
  switch (scheme) {
    case DofScheme::kZf: return "ZF";
    case DofScheme::kMat: return "MAT";
    case DofScheme::kAltmatLimit: return "ALTMAT";
    case DofScheme::kAltmatFiniteN: return "ALTMAT_FINITE_N";
    case DofScheme::kKmat: return "KMAT";
    case DofScheme::kOuter: return "OUTER";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

ExactRatio harmonic(int k) {
  require_users(k, 1, "harmonic");
  ExactRatio sum;
  for (int i = 1; i <= k; ++i) sum += ExactRatio(BigInt(1), BigInt(i));
  return sum;
}

ExactRatio dof_outer_sum(int k, const ExactRatio& alpha) {
  require_users(k, 2, "dof_outer_sum");
  require_alpha(alpha, "dof_outer_sum");
  const ExactRatio tail = harmonic(k) - ExactRatio(1);  // Sum_{i=2..K} 1/i
  return ExactRatio(k) * (ExactRatio(1) + alpha * tail) / harmonic(k);
}

ExactRatio dof_mat(int k) {
  require_users(k, 1, "dof_mat");
  return ExactRatio(k) / harmonic(k);
}

ExactRatio dof_zf(int k, const ExactRatio& alpha) {
  require_users(k, 1, "dof_zf");
  require_alpha(alpha, "dof_zf");
  return ExactRatio(k) * alpha;
}

ExactRatio dof_altmat_limit(int k) {
  require_users(k, 2, "dof_altmat_limit");
  return ExactRatio(BigInt(2 * k), BigInt(k + 1));
}

ExactRatio dof_kmat(int k, const ExactRatio& alpha) {
  return dof_kmat_finite(k, alpha, dof_altmat_limit(k));
}

ExactRatio dof_kmat_finite(int k, const ExactRatio& alpha,
                           const ExactRatio& altmat_finite_dof) {
  require_users(k, 2, "dof_kmat");
  require_alpha(alpha, "dof_kmat");
  return (ExactRatio(1) - alpha) * altmat_finite_dof + alpha * ExactRatio(k);
}

ExactRatio kmat_mat_crossover(int k) {
  require_users(k, 2, "kmat_mat_crossover");
  // (1 - a) L + a K = M  =>  a = (M - L) / (K - L), with L = 2K/(K+1), M = K/H_K.
  const ExactRatio limit = dof_altmat_limit(k);
  const ExactRatio mat = dof_mat(k);
  const ExactRatio denom = ExactRatio(k) - limit;
  if (denom.is_zero()) throw std::logic_error("kmat_mat_crossover: degenerate K");
  const ExactRatio a = (mat - limit) / denom;
  return a < ExactRatio(0) ? ExactRatio(0) : a;
}

std::vector<FigureRow> figure_tables(const std::vector<int>& k_range,
                                     const std::vector<ExactRatio>& alpha_grid) {
  std::vector<FigureRow> rows;
  rows.reserve(k_range.size() * alpha_grid.size() * 5);
  for (int k : k_range) {
    for (const ExactRatio& alpha : alpha_grid) {
      rows.push_back({k, alpha, DofScheme::kZf, dof_zf(k, alpha)});
      rows.push_back({k, alpha, DofScheme::kMat, dof_mat(k)});
      rows.push_back({k, alpha, DofScheme::kAltmatLimit, dof_altmat_limit(k)});
      rows.push_back({k, alpha, DofScheme::kKmat, dof_kmat(k, alpha)});
      rows.push_back({k, alpha, DofScheme::kOuter, dof_outer_sum(k, alpha)});
    }
  }
  return rows;
}

}  // namespace misodof
