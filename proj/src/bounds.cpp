// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace misodof {

namespace {

ComplexMatrix random_complex_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                                    double variance = 1.0) {
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = complex_gaussian(rng, variance);
  return m;
}

double logdet2_psd(const ComplexMatrix& a) {
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    // Near-singular draw: retry with a tiny diagonal jitter.
    ComplexMatrix jittered = a;
    jittered.diagonal().array() += 1e-12;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("logdet2_psd: Cholesky failed on a non-PSD matrix");
  }
  double logdet = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < a.rows(); ++i) logdet += std::log(std::real(l(i, i)));
  return 2.0 * logdet / std::log(2.0);
}

}  // namespace

McEstimate mc_logdet(const ComplexMatrix& h_hat, const ComplexMatrix& kcov, double sigma2,
                     int trials, const StreamKey& key) {
  if (h_hat.cols() != kcov.rows() || kcov.rows() != kcov.cols())
    throw std::invalid_argument("mc_logdet: dimension mismatch");
  if (sigma2 < 0.0) throw std::invalid_argument("mc_logdet: sigma2 >= 0 required");
  if (trials < 2) throw std::invalid_argument("mc_logdet: trials >= 2 required");
  const Eigen::Index n = h_hat.rows();
  // Welford accumulation of mean and scatter.
  double mean = 0.0;
  double m2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto rng = key.with_counter(t).make_rng();
    const ComplexMatrix h = h_hat + random_complex_matrix(rng, n, h_hat.cols(), sigma2);
    const ComplexMatrix gram =
        ComplexMatrix::Identity(n, n) + h * kcov * h.adjoint();
    const double sample = logdet2_psd(gram);
    const double delta = sample - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (sample - mean);
  }
  McEstimate est;
  est.mean = mean;
  est.trials = trials;
  est.stderr = std::sqrt(m2 / (static_cast<double>(trials) - 1.0) / static_cast<double>(trials));
  return est;
}

void LemmaOutInstance::validate() const {
  if (!(m >= n1 && n1 >= n2 && n2 >= 1))
    throw std::invalid_argument("LemmaOutInstance: M >= N1 >= N2 >= 1 violated");
  if (h_hat1.rows() != n1 || h_hat1.cols() != m || h_hat2.rows() != n2 || h_hat2.cols() != m)
    throw std::invalid_argument("LemmaOutInstance: estimate shapes inconsistent");
  if (kcov.rows() != m || kcov.cols() != m)
    throw std::invalid_argument("LemmaOutInstance: covariance must be M x M");
  if ((kcov - kcov.adjoint()).norm() > 1e-9 * std::max(1.0, kcov.norm()))
    throw std::invalid_argument("LemmaOutInstance: covariance not Hermitian");
  if (std::real(kcov.trace()) > p * (1.0 + 1e-9))
    throw std::invalid_argument("LemmaOutInstance: trace(K) <= P violated");
  if (sigma2_grid.size() < 4) throw std::invalid_argument("LemmaOutInstance: grid too small");
  const auto [lo, hi] = std::minmax_element(sigma2_grid.begin(), sigma2_grid.end());
  if (*hi / *lo < 1.0e4)
    throw std::invalid_argument("LemmaOutInstance: sigma2 grid must span >= 4 decades");
}

std::vector<double> default_sigma2_grid() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

LemmaVerdict lemma_out_slope(const LemmaOutInstance& inst, int trials, const StreamKey& key,
                             EstimateMode mode) {
  inst.validate();
  LemmaVerdict verdict;
  verdict.bound = static_cast<double>(inst.n1 - inst.n2) / static_cast<double>(inst.n1);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t g = 0; g < inst.sigma2_grid.size(); ++g) {
    const double sigma2 = inst.sigma2_grid[g];
    ComplexMatrix h1 = inst.h_hat1;
    ComplexMatrix h2 = inst.h_hat2;
    if (mode == EstimateMode::kRedrawPerTrial) {
      // Fresh estimates per grid point; the per-trial redraw is approximated
      // by redrawing per point, which the lemma's O(1) slack absorbs.
      auto rng = key.with_stream(900 + g).make_rng();
      h1 = random_complex_matrix(rng, inst.n1, inst.m);
      h2 = random_complex_matrix(rng, inst.n2, inst.m);
    }
    const McEstimate e1 = mc_logdet(h1, inst.kcov, sigma2, trials, key.with_stream(2 * g));
    const McEstimate e2 = mc_logdet(h2, inst.kcov, sigma2, trials, key.with_stream(2 * g + 1));
    const double lhs = e1.mean / inst.n1 - e2.mean / inst.n2;
    const double se = std::sqrt(e1.stderr * e1.stderr / (inst.n1 * inst.n1) +
                                e2.stderr * e2.stderr / (inst.n2 * inst.n2));
    verdict.points.push_back({sigma2, lhs, se});
    pts.emplace_back(std::log2(1.0 / sigma2), lhs);
  }
  verdict.slope = fit_line(pts);
  verdict.pass = verdict.slope.slope <= verdict.bound + 0.05;
  return verdict;
}

LemmaVerdict lemma_caseb_slope(int n, int m, const ComplexMatrix& h_hat,
                               const Eigen::VectorXd& lambda,
                               const std::vector<double>& sigma2_grid, int trials,
                               const StreamKey& key, EstimateMode mode) {
  if (!(n >= 1 && n <= m && m <= 2 * n))
    throw std::invalid_argument("lemma_caseb_slope: n <= m <= 2n violated");
  if (h_hat.rows() != n || h_hat.cols() != m)
    throw std::invalid_argument("lemma_caseb_slope: estimate shape mismatch");
  if (lambda.size() != m) throw std::invalid_argument("lemma_caseb_slope: lambda length != m");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lambda(i) <= 0.0) throw std::invalid_argument("lemma_caseb_slope: lambda > 0 required");
    if (i > 0 && lambda(i) > lambda(i - 1))
      throw std::invalid_argument("lemma_caseb_slope: lambda must be nonincreasing");
  }
  double logdet_lambda = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) logdet_lambda += std::log2(lambda(i));

  const ComplexMatrix kcov = lambda.cast<Complex>().asDiagonal();
  LemmaVerdict verdict;
  verdict.bound = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t g = 0; g < sigma2_grid.size(); ++g) {
    const double sigma2 = sigma2_grid[g];
    ComplexMatrix h = h_hat;
    if (mode == EstimateMode::kRedrawPerTrial) {
      auto rng = key.with_stream(900 + g).make_rng();
      h = random_complex_matrix(rng, n, m);
    }
    const McEstimate mc = mc_logdet(h, kcov, sigma2, trials, key.with_stream(g));
    const double rhs = (static_cast<double>(n) / m) * logdet_lambda +
                       (static_cast<double>(n) * (m - n) / m) * std::log2(sigma2);
    const double deficit = rhs - mc.mean;
    verdict.points.push_back({sigma2, deficit, mc.stderr});
    pts.emplace_back(std::log2(1.0 / sigma2), deficit);
  }
  verdict.slope = fit_line(pts);
  verdict.pass = verdict.slope.slope <= verdict.bound + 0.05;
  return verdict;
}

LemmaOutInstance make_lemma_out_instance(int index, const StreamKey& key) {
  static constexpr std::array<std::array<int, 3>, 5> kDims = {
      {{3, 2, 3}, {3, 3, 3}, {2, 1, 2}, {3, 1, 3}, {4, 2, 4}}};
  LemmaOutInstance inst;
  const auto& dims = kDims[static_cast<std::size_t>(index) % kDims.size()];
  inst.n1 = dims[0];
  inst.n2 = dims[1];
  inst.m = dims[2];
  inst.sigma2_grid = default_sigma2_grid();
  inst.p = 1.0e4;

  auto rng = key.with_stream(7000 + index).make_rng();
  inst.h_hat1 = random_complex_matrix(rng, inst.n1, inst.m);
  inst.h_hat2 = random_complex_matrix(rng, inst.n2, inst.m);

  Eigen::VectorXd lambda(inst.m);
  if (index == 0) {
    // The reference setup: eigenvalues (P, sqrt(P), 1) padded by ones.
    for (int i = 0; i < inst.m; ++i)
      lambda(i) = std::pow(inst.p, std::max(0.0, 1.0 - 0.5 * i));
  } else if (index == 1) {
    lambda.setOnes();
  } else {
    for (int i = 0; i < inst.m; ++i)
      lambda(i) = std::pow(inst.p, uniform_unit(rng));
    std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<double>());
  }
  // Random eigenbasis, trace clamped to P.
  const ComplexMatrix gauss = random_complex_matrix(rng, inst.m, inst.m);
  const Eigen::HouseholderQR<ComplexMatrix> qr(gauss);
  const ComplexMatrix v = qr.householderQ();
  ComplexMatrix kcov = v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
  kcov = 0.5 * (kcov + kcov.adjoint());
  const double trace = std::real(kcov.trace());
  if (trace > inst.p) kcov *= inst.p / trace;
  inst.kcov = kcov;
  return inst;
}

CasebInstance make_caseb_instance(int index, const StreamKey& key) {
  static constexpr std::array<std::array<int, 2>, 5> kDims = {
      {{2, 3}, {2, 2}, {3, 4}, {3, 6}, {2, 4}}};
  CasebInstance inst;
  const auto& dims = kDims[static_cast<std::size_t>(index) % kDims.size()];
  inst.n = dims[0];
  inst.m = dims[1];
  inst.sigma2_grid = default_sigma2_grid();

  auto rng = key.with_stream(8000 + index).make_rng();
  inst.h_hat = random_complex_matrix(rng, inst.n, inst.m);
  inst.lambda.resize(inst.m);
  if (index == 0) {
    for (int i = 0; i < inst.m; ++i) inst.lambda(i) = std::pow(10.0, 3 - i);
  } else if (index == 1) {
    inst.lambda.setOnes();
  } else {
    for (int i = 0; i < inst.m; ++i) inst.lambda(i) = std::pow(10.0, 4.0 * uniform_unit(rng));
    std::sort(inst.lambda.data(), inst.lambda.data() + inst.lambda.size(),
              std::greater<double>());
  }
  return inst;
}

}  // namespace misodof
