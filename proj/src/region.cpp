// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/region.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

#include "misodof/dof_formulas.hpp"

namespace misodof {

namespace {

ExactRatio dot(const RationalVector& a, const RationalVector& b) {
  ExactRatio acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  return acc;
}

void enumerate_tuples(int k, int p, std::vector<int>& prefix, std::vector<bool>& used,
                      const std::function<void(const std::vector<int>&)>& emit) {
  if (static_cast<int>(prefix.size()) == p) {
    emit(prefix);
    return;
  }
  for (int u = 0; u < k; ++u) {
    if (used[u]) continue;
    used[u] = true;
    prefix.push_back(u);
    enumerate_tuples(k, p, prefix, used, emit);
    prefix.pop_back();
    used[u] = false;
  }
}

}  // namespace

std::size_t expected_tuple_count(int k) {
  std::size_t total = 0;
  for (int p = 2; p <= k; ++p) {
    std::size_t falling = 1;
    for (int i = 0; i < p; ++i) falling *= static_cast<std::size_t>(k - i);
    total += falling;
  }
  return total;
}

ConstraintSystem build_constraints(int k, const ExactRatio& alpha,
                                   TupleEnumeration enumeration) {
  if (k < 2) throw std::invalid_argument("build_constraints: K >= 2 required");
  if (alpha < ExactRatio(0) || alpha > ExactRatio(1))
    throw std::invalid_argument("build_constraints: alpha in [0,1] required");

  ConstraintSystem sys;
  sys.k = k;
  sys.alpha = alpha;
  sys.enumeration = enumeration;

  // rhs_p = 1 + alpha * sum_{i=2..p} 1/i.
  std::vector<ExactRatio> rhs_by_p(k + 1);
  for (int p = 2; p <= k; ++p) rhs_by_p[p] = ExactRatio(1) + alpha * (harmonic(p) - ExactRatio(1));

  const auto add_tuple_row = [&](const std::vector<int>& tuple) {
    LinearConstraint row;
    row.kind = ConstraintKind::kTuple;
    row.p = static_cast<int>(tuple.size());
    row.tuple = tuple;
    row.coeffs = RationalVector::Constant(k, ExactRatio(0));
    for (std::size_t pos = 0; pos < tuple.size(); ++pos)
      row.coeffs(tuple[pos]) = ExactRatio(BigInt(1), BigInt(pos + 1));
    row.rhs = rhs_by_p[row.p];
    sys.constraints.push_back(std::move(row));
  };

  for (int p = 2; p <= k; ++p) {
    if (enumeration == TupleEnumeration::kAllOrderedTuples) {
      std::vector<int> prefix;
      std::vector<bool> used(k, false);
      enumerate_tuples(k, p, prefix, used, add_tuple_row);
    } else {
      std::vector<int> identity(p);
      for (int i = 0; i < p; ++i) identity[i] = i;
      add_tuple_row(identity);
    }
  }
  sys.tuple_count = sys.constraints.size();

  for (int i = 0; i < k; ++i) {
    LinearConstraint up;
    up.kind = ConstraintKind::kUpperBox;
    up.p = 1;
    up.tuple = {i};
    up.coeffs = RationalVector::Constant(k, ExactRatio(0));
    up.coeffs(i) = ExactRatio(1);
    up.rhs = ExactRatio(1);
    sys.constraints.push_back(std::move(up));
  }
  for (int i = 0; i < k; ++i) {
    LinearConstraint lo;
    lo.kind = ConstraintKind::kLowerBox;
    lo.p = 1;
    lo.tuple = {i};
    lo.coeffs = RationalVector::Constant(k, ExactRatio(0));
    lo.coeffs(i) = ExactRatio(-1);
    lo.rhs = ExactRatio(0);
    sys.constraints.push_back(std::move(lo));
  }
  return sys;
}

bool is_member(const RationalVector& point, const ConstraintSystem& sys,
               std::size_t* violated_row) {
  if (point.size() != sys.k) throw std::invalid_argument("is_member: point length != K");
  for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
    if (dot(sys.constraints[i].coeffs, point) > sys.constraints[i].rhs) {
      if (violated_row != nullptr) *violated_row = i;
      return false;
    }
  }
  return true;
}

RationalVector solve_rational_system(RationalMatrix a, RationalVector b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("solve_rational_system: shape mismatch");
  // Gauss-Jordan with first-nonzero pivoting; exact, so pivot magnitude is
  // irrelevant.
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = col; r < n; ++r) {
      if (!a(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::runtime_error("solve_rational_system: singular matrix");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b(pivot), b(col));
    }
    const ExactRatio inv = ExactRatio(1) / a(col, col);
    for (Eigen::Index c = col; c < n; ++c) a(col, c) *= inv;
    b(col) *= inv;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const ExactRatio f = a(r, col);
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  return b;
}

namespace {

struct Basis {
  std::vector<std::size_t> rows;  // K active constraint indices
};

RationalMatrix basis_matrix(const ConstraintSystem& sys, const Basis& basis) {
  const int k = sys.k;
  RationalMatrix a(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) a(r, c) = sys.constraints[basis.rows[r]].coeffs(c);
  return a;
}

RationalVector basis_rhs(const ConstraintSystem& sys, const Basis& basis) {
  RationalVector b(sys.k);
  for (int r = 0; r < sys.k; ++r) b(r) = sys.constraints[basis.rows[r]].rhs;
  return b;
}

/// Vertex basis of K cyclic rotations of the full K-tuple. The symmetric
/// optimum for uniform weights sits on exactly these rows, so starting there
/// typically certifies in one step.
std::optional<Basis> cyclic_full_tuple_basis(const ConstraintSystem& sys) {
  if (sys.enumeration != TupleEnumeration::kAllOrderedTuples) return std::nullopt;
  const int k = sys.k;
  Basis basis;
  for (int rot = 0; rot < k; ++rot) {
    std::vector<int> tuple(k);
    for (int pos = 0; pos < k; ++pos) tuple[pos] = (rot + pos) % k;
    bool found = false;
    for (std::size_t i = 0; i < sys.tuple_count; ++i) {
      if (sys.constraints[i].p == k && sys.constraints[i].tuple == tuple) {
        basis.rows.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return basis;
}

}  // namespace

LpSolution max_weighted_sum(const ConstraintSystem& sys, const RationalVector& weights) {
  const int k = sys.k;
  if (weights.size() != k) throw std::invalid_argument("max_weighted_sum: weights length != K");
  for (int i = 0; i < k; ++i)
    if (weights(i) < ExactRatio(0))
      throw std::invalid_argument("max_weighted_sum: weights must be nonnegative");

  const std::size_t m = sys.constraints.size();
  const std::size_t lower_box_start = m - static_cast<std::size_t>(k);

  // Cold start: the origin, active on the lower boxes.
  Basis basis;
  for (int i = 0; i < k; ++i) basis.rows.push_back(lower_box_start + i);

  // Warm start at the symmetric vertex for uniform positive weights.
  bool uniform = weights(0) > ExactRatio(0);
  for (int i = 1; uniform && i < k; ++i) uniform = weights(i) == weights(0);
  if (uniform) {
    if (auto warm = cyclic_full_tuple_basis(sys)) {
      try {
        RationalVector d = solve_rational_system(basis_matrix(sys, *warm), basis_rhs(sys, *warm));
        std::size_t violated = 0;
        if (is_member(d, sys, &violated)) basis = *warm;
      } catch (const std::runtime_error&) {
        // singular warm basis: keep the cold start
      }
    }
  }

  constexpr int kPivotCap = 200000;
  LpSolution sol;
  RationalVector d;
  RationalVector mu;
  for (sol.pivots = 0; sol.pivots <= kPivotCap; ++sol.pivots) {
    const RationalMatrix a_b = basis_matrix(sys, basis);
    d = solve_rational_system(a_b, basis_rhs(sys, basis));
    mu = solve_rational_system(a_b.transpose(), weights);

    // Bland: leave on the smallest constraint index with a negative multiplier.
    int leave_slot = -1;
    std::size_t leave_row = m;
    for (int s = 0; s < k; ++s) {
      if (mu(s) < ExactRatio(0) && basis.rows[s] < leave_row) {
        leave_row = basis.rows[s];
        leave_slot = s;
      }
    }
    if (leave_slot < 0) break;  // dual feasible: optimal vertex

    // Edge direction: off the leaving row, staying on the others.
    RationalVector e = RationalVector::Constant(k, ExactRatio(0));
    e(leave_slot) = ExactRatio(-1);
    const RationalVector step = solve_rational_system(a_b, e);

    // Exact ratio test over all inactive rows.
    bool have_block = false;
    ExactRatio best_t;
    std::size_t blocker = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (std::find(basis.rows.begin(), basis.rows.end(), i) != basis.rows.end()) continue;
      const ExactRatio adv = dot(sys.constraints[i].coeffs, step);
      if (adv <= ExactRatio(0)) continue;
      const ExactRatio slack = sys.constraints[i].rhs - dot(sys.constraints[i].coeffs, d);
      const ExactRatio t = slack / adv;
      if (!have_block || t < best_t || (t == best_t && i < blocker)) {
        have_block = true;
        best_t = t;
        blocker = i;
      }
    }
    if (!have_block)
      throw std::runtime_error("max_weighted_sum: unbounded ray (box constraints missing?)");
    basis.rows[leave_slot] = blocker;
  }
  if (sol.pivots > kPivotCap) throw std::runtime_error("max_weighted_sum: pivot cap exceeded");

  // Certificate, verified exactly and independently of the walk:
  // primal feasibility, dual feasibility (A_B^T mu = w, mu >= 0, zero
  // elsewhere => complementary slackness on the basis rows), equal objectives.
  std::size_t violated = 0;
  if (!is_member(d, sys, &violated))
    throw std::logic_error("max_weighted_sum: vertex infeasible at termination");
  RationalVector recombined = RationalVector::Constant(k, ExactRatio(0));
  ExactRatio dual_value;
  for (int s = 0; s < k; ++s) {
    if (mu(s) < ExactRatio(0)) throw std::logic_error("max_weighted_sum: negative multiplier");
    const LinearConstraint& row = sys.constraints[basis.rows[s]];
    for (int c = 0; c < k; ++c) recombined(c) += mu(s) * row.coeffs(c);
    dual_value += mu(s) * row.rhs;
  }
  for (int c = 0; c < k; ++c)
    if (recombined(c) != weights(c))
      throw std::logic_error("max_weighted_sum: dual recombination mismatch");
  sol.value = dot(weights, d);
  if (sol.value != dual_value)
    throw std::logic_error("max_weighted_sum: primal/dual objective mismatch");
  sol.point = d;
  for (int s = 0; s < k; ++s) sol.dual.emplace_back(basis.rows[s], mu(s));
  sol.certified = true;
  return sol;
}

LpSolution max_sum_dof(const ConstraintSystem& sys) {
  return max_weighted_sum(sys, RationalVector::Constant(sys.k, ExactRatio(1)));
}

std::vector<OuterFormulaCheck> verify_outer_formula(int k,
                                                    const std::vector<ExactRatio>& alpha_grid) {
  if (k > 6)
    throw std::invalid_argument("verify_outer_formula: K <= 6 (ordered-tuple count growth)");
  std::vector<OuterFormulaCheck> checks;
  checks.reserve(alpha_grid.size());
  for (const ExactRatio& alpha : alpha_grid) {
    const ConstraintSystem sys = build_constraints(k, alpha);
    OuterFormulaCheck check;
    check.alpha = alpha;
    check.lp_value = max_sum_dof(sys).value;
    check.formula_value = dof_outer_sum(k, alpha);
    check.equal = check.lp_value == check.formula_value;
    checks.push_back(std::move(check));
  }
  return checks;
}

}  // namespace misodof
