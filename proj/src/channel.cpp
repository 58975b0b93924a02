// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/channel.hpp"

#include <stdexcept>
#include <string>

namespace misodof {

void SystemConfig::validate() const {
  if (k < 2) throw std::invalid_argument("SystemConfig: K >= 2 violated (K = " + std::to_string(k) + ")");
  if (m < k)
    throw std::invalid_argument("SystemConfig: M >= K violated (M = " + std::to_string(m) +
                                ", K = " + std::to_string(k) + ")");
  if (!(snr > 1.0))
    throw std::invalid_argument("SystemConfig: P > 1 violated (P = " + std::to_string(snr) + ")");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("SystemConfig: alpha in [0,1] violated (alpha = " +
                                std::to_string(alpha) + ")");
}

ChannelRealization sample_channel(const SystemConfig& config, const StreamKey& key) {
  config.validate();
  auto rng = key.make_rng();
  const double err_var = config.sigma2();
  const double est_var = 1.0 - err_var;
  ChannelRealization real;
  real.h_hat.resize(config.k, config.m);
  real.h_tilde.resize(config.k, config.m);
  for (int r = 0; r < config.k; ++r) {
    for (int c = 0; c < config.m; ++c) {
      real.h_hat(r, c) = complex_gaussian(rng, est_var);
      real.h_tilde(r, c) = complex_gaussian(rng, err_var);
    }
  }
  real.h = real.h_hat + real.h_tilde;
  return real;
}

ComplexVector unit_null_vector(const Eigen::Ref<const ComplexVector>& row) {
  const Eigen::Index m = row.size();
  if (m < 2) throw std::invalid_argument("unit_null_vector: dimension must be >= 2");
  const double norm2 = row.squaredNorm();
  if (norm2 == 0.0) {
    // Estimate identically zero (alpha = 0 boundary): every direction works.
    ComplexVector e = ComplexVector::Zero(m);
    e(0) = 1.0;
    return e;
  }
  // Project the basis vector with the smallest overlap out of the row span.
  Eigen::Index pick = 0;
  double best = std::abs(row(0));
  for (Eigen::Index i = 1; i < m; ++i) {
    if (std::abs(row(i)) < best) {
      best = std::abs(row(i));
      pick = i;
    }
  }
  ComplexVector v = ComplexVector::Zero(m);
  v(pick) = 1.0;
  v -= row * (std::conj(row(pick)) / norm2);
  const double n = v.norm();
  if (n == 0.0) throw std::runtime_error("unit_null_vector: degenerate null space");
  return v / n;
}

double zf_mean_residual_power(const SystemConfig& config, int trials, const StreamKey& key) {
  config.validate();
  if (trials < 1) throw std::invalid_argument("zf_mean_residual_power: trials >= 1");
  CompensatedSum acc;
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization real = sample_channel(config, key.with_counter(t));
    const ComplexVector hhat_row = real.h_hat.row(0).adjoint();
    const ComplexVector u = unit_null_vector(hhat_row);
    // h_0^H u with hhat_0^H u = 0 by construction.
    const Complex r = (real.h.row(0) * u)(0);
    acc.add(std::norm(r));
  }
  return acc.value() / trials;
}

SlopeEstimate zf_residual_exponent(const SystemConfig& config_template,
                                   const std::vector<double>& snr_grid_db, int trials,
                                   const StreamKey& key) {
  if (snr_grid_db.size() < 4)
    throw std::invalid_argument("zf_residual_exponent: need at least 4 grid points");
  const auto [lo, hi] = std::minmax_element(snr_grid_db.begin(), snr_grid_db.end());
  if (*hi - *lo < 30.0)
    throw std::invalid_argument("zf_residual_exponent: grid must span at least 30 dB");
  if (trials < 500) throw std::invalid_argument("zf_residual_exponent: trials >= 500");

  std::vector<std::pair<double, double>> points;
  points.reserve(snr_grid_db.size());
  for (std::size_t g = 0; g < snr_grid_db.size(); ++g) {
    SystemConfig config = config_template;
    config.snr = db_to_linear(snr_grid_db[g]);
    const double mean = zf_mean_residual_power(config, trials, key.with_stream(g));
    points.emplace_back(std::log10(config.snr), std::log10(mean));
  }
  return fit_line(points);
}

}  // namespace misodof
