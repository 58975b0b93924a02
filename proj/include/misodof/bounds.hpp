// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_BOUNDS_HPP
#define MISODOF_BOUNDS_HPP

#include <vector>

#include "misodof/channel.hpp"
#include "misodof/slope.hpp"
#include "misodof/stream_key.hpp"

namespace misodof {

struct McEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  int trials = 0;
};

/// Monte Carlo estimate of E log2 det(I + H K H^H) with H = Hhat + Htilde,
/// Htilde entries i.i.d. CN(0, sigma2). Cholesky-based with 1e-12 jitter.
McEstimate mc_logdet(const ComplexMatrix& h_hat, const ComplexMatrix& kcov, double sigma2,
                     int trials, const StreamKey& key);

/// Whether the estimate-side matrices stay fixed over trials or are redrawn
/// (the lemma statement leaves their distribution open; both are reported).
enum class EstimateMode { kFixed, kRedrawPerTrial };

struct LemmaPoint {
  double sigma2 = 0.0;
  double lhs = 0.0;
  double stderr = 0.0;
};

struct LemmaVerdict {
  SlopeEstimate slope;   // vs log2(1/sigma2)
  double bound = 0.0;    // admissible asymptotic slope
  bool pass = false;     // slope <= bound + 0.05
  std::vector<LemmaPoint> points;
};

/// Instance of the normalized log-det difference bound: two stacked-channel
/// sizes N1 >= N2 sharing one transmit covariance.
struct LemmaOutInstance {
  int n1 = 0;
  int n2 = 0;
  int m = 0;
  ComplexMatrix h_hat1;
  ComplexMatrix h_hat2;
  ComplexMatrix kcov;
  std::vector<double> sigma2_grid;
  double p = 1.0e4;  // trace(kcov) <= p

  void validate() const;
};

/// Default sigma^2 grid 1e-1 .. 1e-6.
std::vector<double> default_sigma2_grid();

/// Slope of (1/N1) E log det(...) - (1/N2) E log det(...) against
/// log2(1/sigma2); PASS iff slope <= (N1 - N2)/N1 + 0.05.
LemmaVerdict lemma_out_slope(const LemmaOutInstance& inst, int trials, const StreamKey& key,
                             EstimateMode mode = EstimateMode::kFixed);

/// Lower-bound companion for an n x m channel (n <= m <= 2n) and diagonal
/// eigenvalue matrix: the deficit
///   (n/m) log2 det(Lambda) + (n(m-n)/m) log2 sigma2 - E log2 det(I + H K H^H)
/// must stay bounded, so its slope against log2(1/sigma2) is <= 0.05.
LemmaVerdict lemma_caseb_slope(int n, int m, const ComplexMatrix& h_hat,
                               const Eigen::VectorXd& lambda,
                               const std::vector<double>& sigma2_grid, int trials,
                               const StreamKey& key, EstimateMode mode = EstimateMode::kFixed);

/// Deterministic randomized instances for the verification suites; index 0
/// reproduces the (N1, N2, M) = (3, 2, 3), lambda = (P, sqrt(P), 1) setup and
/// index 1 the identity-covariance one.
LemmaOutInstance make_lemma_out_instance(int index, const StreamKey& key);

struct CasebInstance {
  int n = 0;
  int m = 0;
  ComplexMatrix h_hat;
  Eigen::VectorXd lambda;
  std::vector<double> sigma2_grid;
};

CasebInstance make_caseb_instance(int index, const StreamKey& key);

}  // namespace misodof

#endif  // MISODOF_BOUNDS_HPP
