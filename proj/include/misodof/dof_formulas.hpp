// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_DOF_FORMULAS_HPP
#define MISODOF_DOF_FORMULAS_HPP

#include <string>
#include <vector>

#include "misodof/rational.hpp"

namespace misodof {

enum class DofScheme { kZf, kMat, kAltmatLimit, kAltmatFiniteN, kKmat, kOuter };

std::string scheme_name(DofScheme scheme);

/// Sum_{i=1..k} 1/i, exact.
ExactRatio harmonic(int k);

/// Sum-DoF outer bound: K (1 + alpha * Sum_{i=2..K} 1/i) / Sum_{i=1..K} 1/i.
ExactRatio dof_outer_sum(int k, const ExactRatio& alpha);

/// Retrospective-alignment sum DoF with fully outdated CSIT: K / harmonic(K).
ExactRatio dof_mat(int k);

/// Zero-forcing sum DoF with quality exponent alpha: K * alpha.
ExactRatio dof_zf(int k, const ExactRatio& alpha);

/// Alternative alignment, infinite-round limit: 2K / (K + 1).
ExactRatio dof_altmat_limit(int k);

/// Superposed scheme: (1 - alpha) * dof_altmat_limit(K) + alpha * K.
ExactRatio dof_kmat(int k, const ExactRatio& alpha);

/// Variant substituting a finite-round alternative-alignment DoF for the
/// limit value (the ledger supplies that number).
ExactRatio dof_kmat_finite(int k, const ExactRatio& alpha, const ExactRatio& altmat_finite_dof);

/// The alpha at which the superposed scheme's DoF meets the outdated-CSIT
/// alignment DoF: solves (1 - a) 2K/(K+1) + aK = K/harmonic(K) exactly.
/// Clamped to 0 when the superposed scheme dominates for all alpha (K = 2).
ExactRatio kmat_mat_crossover(int k);

struct FigureRow {
  int k = 0;
  ExactRatio alpha;
  DofScheme scheme = DofScheme::kOuter;
  ExactRatio dof;
};

/// Cartesian table of (K, alpha, scheme, dof) rows over the requested grid,
/// schemes {ZF, MAT, ALTMAT-limit, KMAT, OUTER}.
std::vector<FigureRow> figure_tables(const std::vector<int>& k_range,
                                     const std::vector<ExactRatio>& alpha_grid);

}  // namespace misodof

#endif  // MISODOF_DOF_FORMULAS_HPP
