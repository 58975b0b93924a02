// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_CHANNEL_HPP
#define MISODOF_CHANNEL_HPP

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "misodof/slope.hpp"
#include "misodof/stream_key.hpp"

namespace misodof {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// K-user MISO broadcast setting: M transmit antennas (M >= K >= 2), linear
/// SNR P > 1 and CSIT quality exponent alpha in [0, 1]. The current-channel
/// estimation error variance is sigma^2 = P^(-alpha).
struct SystemConfig {
  int k = 3;
  int m = 3;
  double snr = 1.0e4;
  double alpha = 0.5;

  double sigma2() const { return std::pow(snr, -alpha); }

  /// Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

/// One draw of the channel model: true channel H (rows h_i^H), its estimate
/// and the estimation error, with H = Hhat + Htilde entrywise.
struct ChannelRealization {
  ComplexMatrix h;
  ComplexMatrix h_hat;
  ComplexMatrix h_tilde;
};

/// Estimate entries are i.i.d. CN(0, 1 - P^(-alpha)), error entries i.i.d.
/// CN(0, P^(-alpha)), mutually independent. Same key, same matrices.
ChannelRealization sample_channel(const SystemConfig& config, const StreamKey& key);

/// Deterministic unit vector orthogonal to `row` (dimension >= 2).
ComplexVector unit_null_vector(const Eigen::Ref<const ComplexVector>& row);

/// Mean of |h_0^H u|^2 over `trials` draws, with u a unit vector zero-forced
/// against the estimated row. Under the model this equals P^(-alpha) exactly
/// in expectation.
double zf_mean_residual_power(const SystemConfig& config, int trials, const StreamKey& key);

/// Least-squares slope of log10 E|h^H u|^2 against log10 P over the dB grid.
/// Contract: slope approximately -alpha.
SlopeEstimate zf_residual_exponent(const SystemConfig& config_template,
                                   const std::vector<double>& snr_grid_db, int trials,
                                   const StreamKey& key);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace misodof

#endif  // MISODOF_CHANNEL_HPP
