// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "misodof/dof_formulas.hpp"

using namespace misodof;

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(1) == ExactRatio(1));
  CHECK(harmonic(3) == ExactRatio(11, 6));
  CHECK(harmonic(5) == ExactRatio(137, 60));
  CHECK_THROWS_AS(harmonic(0), std::invalid_argument);
}

TEST_CASE("outer-bound sum DoF") {
  CHECK(dof_outer_sum(2, ExactRatio(0)) == ExactRatio(4, 3));
  for (int k = 2; k <= 9; ++k) CHECK(dof_outer_sum(k, ExactRatio(1)) == ExactRatio(k));
  CHECK(dof_outer_sum(5, ExactRatio(1, 2)) == ExactRatio(985, 274));
  CHECK_THROWS_AS(dof_outer_sum(5, ExactRatio(3, 2)), std::invalid_argument);
  CHECK_THROWS_AS(dof_outer_sum(1, ExactRatio(0)), std::invalid_argument);
}

TEST_CASE("outdated-CSIT alignment DoF") {
  CHECK(dof_mat(2) == ExactRatio(4, 3));
  CHECK(dof_mat(2) == dof_outer_sum(2, ExactRatio(0)));
  CHECK(dof_mat(3) == ExactRatio(18, 11));
  CHECK(dof_mat(5) == ExactRatio(300, 137));
}

TEST_CASE("zero-forcing DoF") {
  CHECK(dof_zf(4, ExactRatio(1)) == ExactRatio(4));
  CHECK(dof_zf(7, ExactRatio(0)) == ExactRatio(0));
  CHECK(dof_zf(5, ExactRatio(1, 2)) == ExactRatio(5, 2));
}

TEST_CASE("alternative alignment limit") {
  CHECK(dof_altmat_limit(3) == ExactRatio(3, 2));
  CHECK(dof_altmat_limit(2) == ExactRatio(4, 3));
  CHECK(dof_altmat_limit(5) == ExactRatio(5, 3));
  for (int k = 3; k <= 12; ++k) {
    CHECK(dof_altmat_limit(k) > dof_altmat_limit(k - 1));
    CHECK(dof_altmat_limit(k) < ExactRatio(2));
  }
}

TEST_CASE("superposed scheme DoF") {
  CHECK(dof_kmat(5, ExactRatio(1, 2)) == ExactRatio(10, 3));
  for (int i = 0; i <= 20; ++i) {
    const ExactRatio a(i, 20);
    CHECK(dof_kmat(2, a) == (ExactRatio(4) + ExactRatio(2) * a) / ExactRatio(3));
    CHECK(dof_kmat(2, a) == dof_outer_sum(2, a));  // two-user tightness
  }
  for (int k = 2; k <= 9; ++k) CHECK(dof_kmat(k, ExactRatio(1)) == ExactRatio(k));
}

TEST_CASE("crossover with the outdated-CSIT alignment") {
  CHECK(kmat_mat_crossover(3) == ExactRatio(1, 11));
  CHECK(kmat_mat_crossover(2) == ExactRatio(0));
  // K = 5: verify by substitution instead of freezing the value.
  const ExactRatio a = kmat_mat_crossover(5);
  CHECK((ExactRatio(1) - a) * ExactRatio(5, 3) + a * ExactRatio(5) == ExactRatio(300, 137));
  CHECK(a > ExactRatio(0));
  CHECK(a < ExactRatio(1));
}

TEST_CASE("sandwich: achievable below the outer bound on a fine grid") {
  for (int k = 2; k <= 10; ++k) {
    for (int i = 0; i <= 20; ++i) {
      const ExactRatio a(i, 20);
      const ExactRatio outer = dof_outer_sum(k, a);
      CHECK(dof_zf(k, a) <= outer);
      CHECK(dof_kmat(k, a) <= outer);
      if (a.is_zero()) CHECK(dof_mat(k) <= outer);
    }
  }
}

TEST_CASE("decomposition identity of the outer bound") {
  for (int k = 2; k <= 10; ++k) {
    for (int i = 0; i <= 20; ++i) {
      const ExactRatio a(i, 20);
      CHECK(dof_outer_sum(k, a) ==
            (ExactRatio(1) - a) * dof_mat(k) + a * ExactRatio(k));
    }
  }
}

TEST_CASE("monotonicity in alpha") {
  for (int k = 2; k <= 10; ++k) {
    for (int i = 1; i <= 20; ++i) {
      CHECK(dof_kmat(k, ExactRatio(i, 20)) >= dof_kmat(k, ExactRatio(i - 1, 20)));
      CHECK(dof_outer_sum(k, ExactRatio(i, 20)) >= dof_outer_sum(k, ExactRatio(i - 1, 20)));
    }
  }
}

TEST_CASE("figure table rows") {
  const auto rows = figure_tables({2, 5}, {ExactRatio(0), ExactRatio(1, 2), ExactRatio(1)});
  CHECK(rows.size() == 2 * 3 * 5);
  const auto find = [&](int k, const ExactRatio& a, DofScheme s) {
    for (const auto& r : rows)
      if (r.k == k && r.alpha == a && r.scheme == s) return r.dof;
    FAIL("row not found");
    return ExactRatio(0);
  };
  // The two-user alignment curves touch.
  CHECK(find(2, ExactRatio(0), DofScheme::kMat) == ExactRatio(4, 3));
  CHECK(find(2, ExactRatio(0), DofScheme::kAltmatLimit) == ExactRatio(4, 3));
  // Five users at alpha = 1/2: superposed beats both baselines.
  CHECK(find(5, ExactRatio(1, 2), DofScheme::kKmat) == ExactRatio(10, 3));
  CHECK(find(5, ExactRatio(1, 2), DofScheme::kZf) == ExactRatio(5, 2));
  CHECK(find(5, ExactRatio(1, 2), DofScheme::kMat) == ExactRatio(300, 137));
  CHECK(find(5, ExactRatio(1, 2), DofScheme::kKmat) > find(5, ExactRatio(1, 2), DofScheme::kZf));
  CHECK(find(5, ExactRatio(1, 2), DofScheme::kZf) > find(5, ExactRatio(1, 2), DofScheme::kMat));
  // Perfect-CSIT endpoints coincide.
  CHECK(find(5, ExactRatio(1), DofScheme::kKmat) == ExactRatio(5));
  CHECK(find(5, ExactRatio(1), DofScheme::kZf) == ExactRatio(5));
  CHECK(find(5, ExactRatio(1), DofScheme::kOuter) == ExactRatio(5));
  // Fully outdated endpoint.
  CHECK(find(5, ExactRatio(0), DofScheme::kKmat) == ExactRatio(5, 3));
  CHECK(find(5, ExactRatio(0), DofScheme::kKmat) < find(5, ExactRatio(0), DofScheme::kMat));
}
