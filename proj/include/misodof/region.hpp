// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_REGION_HPP
#define MISODOF_REGION_HPP

#include <cstdint>
#include <vector>

#include "misodof/rational.hpp"

namespace misodof {

enum class ConstraintKind { kTuple, kUpperBox, kLowerBox };

/// One inequality coeffs . d <= rhs over the per-user DoF tuple d.
struct LinearConstraint {
  ConstraintKind kind = ConstraintKind::kTuple;
  int p = 0;                   // active-user count (tuple rows), else 1
  std::vector<int> tuple;      // ordered distinct users, 0-based (tuple rows)
  RationalVector coeffs;
  ExactRatio rhs;
};

/// Which ordered index sets generate tuple rows. The full ordered-tuple set
/// makes the region permutation symmetric; the identity-prefix restriction
/// keeps only tuples (1, 2, ..., p) and is exposed for comparison.
enum class TupleEnumeration { kAllOrderedTuples, kIdentityPrefixOnly };

struct ConstraintSystem {
  int k = 0;
  ExactRatio alpha;
  TupleEnumeration enumeration = TupleEnumeration::kAllOrderedTuples;
  std::vector<LinearConstraint> constraints;  // tuple rows, then d_i <= 1, then -d_i <= 0
  std::size_t tuple_count = 0;
};

/// Expected tuple-row count for the full enumeration: Sum_{p=2..K} K!/(K-p)!.
std::size_t expected_tuple_count(int k);

/// For every p in 2..K and every ordered p-tuple of distinct users, emits
/// sum_k d_{pi(k)} / k <= 1 + alpha * sum_{k=2..p} 1/k, plus the box rows.
ConstraintSystem build_constraints(int k, const ExactRatio& alpha,
                                   TupleEnumeration enumeration =
                                       TupleEnumeration::kAllOrderedTuples);

/// Exact membership; when violated_row is non-null it receives the index of
/// the first violated constraint.
bool is_member(const RationalVector& point, const ConstraintSystem& sys,
               std::size_t* violated_row = nullptr);

struct LpSolution {
  ExactRatio value;
  RationalVector point;
  /// (constraint index, multiplier) pairs certifying optimality:
  /// sum mu_i a_i = weights with mu >= 0 and mu_i (b_i - a_i . d) = 0.
  std::vector<std::pair<std::size_t, ExactRatio>> dual;
  int pivots = 0;
  bool certified = false;
};

/// Exact LP maximum of weights . d over the polytope, via an active-set walk
/// with Bland's least-index rule; the returned solution always carries an
/// exactly verified primal-dual certificate.
LpSolution max_weighted_sum(const ConstraintSystem& sys, const RationalVector& weights);

/// All-ones objective.
LpSolution max_sum_dof(const ConstraintSystem& sys);

struct OuterFormulaCheck {
  ExactRatio alpha;
  ExactRatio lp_value;
  ExactRatio formula_value;
  bool equal = false;
};

/// LP optimum against the closed-form sum-DoF bound, exact, per alpha.
std::vector<OuterFormulaCheck> verify_outer_formula(int k,
                                                    const std::vector<ExactRatio>& alpha_grid);

/// Exact solve of a square rational system; throws on singularity.
RationalVector solve_rational_system(RationalMatrix a, RationalVector b);

}  // namespace misodof

#endif  // MISODOF_REGION_HPP
