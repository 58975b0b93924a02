// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_KMAT_HPP
#define MISODOF_KMAT_HPP

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "misodof/channel.hpp"
#include "misodof/slope.hpp"
#include "misodof/stream_key.hpp"

namespace misodof {

/// Per-column power budgets of one precoded group: the leading column gets
/// [ (P - P^alpha)/2 - ((n-1)/n) P^(1-alpha)/2 ]+ and each of the n-1
/// remaining columns P^(1-alpha)/(2n), where n is the group's column count.
struct GroupBudget {
  double leader = 0.0;
  double member = 0.0;
  bool clamped = false;  // leader budget hit the [.]+ clamp (below asymptotic regime)
};

GroupBudget kmat_group_budget(double p, double alpha, int group_cols);

/// Precoded symbol vectors for one order-j slot of the superposed scheme:
/// the order-j group (K-j+1 columns, destined to receivers 1..j), the
/// order-(K-j) group (j+1 columns, receivers j+1..K) and the per-user
/// zero-forcing columns.
struct SlotPrecoders {
  int j = 0;
  ComplexMatrix a_low;   // M x (K-j+1); leading column zero-forced to RX j+1..K
  ComplexMatrix a_high;  // M x (j+1); leading column zero-forced to RX 1..j
  ComplexMatrix u_zf;    // M x K; column i zero-forced to every RX except i
  Eigen::VectorXd low_budgets;
  Eigen::VectorXd high_budgets;
  double zf_budget = 0.0;  // per-column, P^alpha / K
  bool low_clamped = false;
  bool high_clamped = false;

  bool below_asymptotic_regime() const { return low_clamped || high_clamped; }
};

/// Orthonormal basis of the right null space of `rows` (full row rank
/// assumed), columns spanning ker(rows).
ComplexMatrix null_space_basis(const ComplexMatrix& rows);

/// Builds the slot: leading columns from the estimated null spaces, the rest
/// drawn at random and orthogonalized within their group, every column
/// scaled to its budget. The key only seeds the non-leading directions.
SlotPrecoders build_kmat_slot(const SystemConfig& config, int j, const ComplexMatrix& h_hat,
                              const StreamKey& key);

/// The five received-power groups tracked at each RX.
enum SignalGroup : int {
  kOwnLeader = 0,  // leading column of the RX's own group
  kOwnRest = 1,    // remaining columns of the own group
  kCross = 2,      // all columns of the opposite group
  kZfOwn = 3,      // the RX's own zero-forced symbol
  kZfOther = 4     // zero-forced symbols of the other users
};
inline constexpr int kSignalGroupCount = 5;

/// Unit-symbol mean received power per RX and group for one channel draw
/// (the symbol average is analytic, so no symbol sampling is involved).
Eigen::MatrixXd symbol_mean_group_powers(const ComplexMatrix& h, const SlotPrecoders& slot);

/// Monte Carlo mean of symbol_mean_group_powers over `trials` channel draws.
Eigen::MatrixXd power_report(const SystemConfig& config, int j, int trials,
                             const StreamKey& key);

struct ExponentSweep {
  Eigen::MatrixXd slopes;         // K x 5, log10 mean power vs log10 P
  Eigen::MatrixXd stderrs;        // K x 5
  std::vector<double> used_db;    // grid points entering the regression
  std::vector<double> excluded_db;  // clamped points (below asymptotic regime)
};

/// OLS slope of each group's log mean power against log P over the dB grid.
ExponentSweep exponent_sweep(const SystemConfig& config_template, int j,
                             const std::vector<double>& snr_grid_db, int trials,
                             const StreamKey& key);

/// One overheard (or interference) equation handed to the receivers that
/// need it; when quantized, `bits` is the total budget for the complex value
/// and `quant_error_power` the realized squared quantization error.
struct GenieEquation {
  Complex value;
  ComplexVector coeff_row;  // channel row applied to the relevant group
  int order = 0;
  bool quantized = false;
  int bits = 0;
  double quant_error_power = 0.0;
};

/// Uniform midrise quantizer per real dimension, range +-4 standard
/// deviations of the sample population, clipping outside.
class ComplexQuantizer {
 public:
  ComplexQuantizer(double std_re, double std_im, int total_bits);
  Complex quantize(Complex v) const;
  int total_bits() const { return bits_re_ + bits_im_; }

 private:
  double step(double range, int bits) const;
  double quantize_dim(double x, double range, int bits) const;
  double range_re_, range_im_;
  int bits_re_, bits_im_;
};

/// Bit budget for retransmitted equations: round((1 - alpha) log2 P).
/// Throws std::domain_error when the budget is not positive (alpha = 1
/// boundary: the retransmitted values carry no DoF-relevant power).
int genie_bit_budget(double p, double alpha);

struct QuantizationReport {
  int total_bits = 0;
  double mean_power = 0.0;
  double distortion = 0.0;  // mean |v - q(v)|^2
  std::int64_t clipped = 0;
};

/// Quantizes the sample set at the scheme's bit budget and reports the
/// resulting distortion.
QuantizationReport quantize_equation(const std::vector<Complex>& values, double p, double alpha);

/// Slope of log10 distortion vs log10 P for genie equations produced by
/// order-j slots; the scheme's bit budget tracks P, so the target is 0.
SlopeEstimate distortion_sweep(const SystemConfig& config_template, int j,
                               const std::vector<double>& snr_grid_db, int trials,
                               const StreamKey& key);

/// Everything one receiver sees in a slot plus the genie side information it
/// is entitled to.
struct SlotObservation {
  ComplexVector y;           // received samples, one per RX
  ComplexVector s_low;       // order-j group symbols (truth)
  ComplexVector s_high;      // order-(K-j) group symbols (truth)
  ComplexVector s_zf;        // zero-forced symbols (truth)
  ComplexVector noise;       // additive noise actually applied (zero if off)
};

/// Composes y = H (A_low s_low + A_high s_high + U s_zf) + noise. Any group
/// can be muted for controlled experiments.
SlotObservation transmit_slot(const ComplexMatrix& h, const SlotPrecoders& slot,
                              std::mt19937_64& rng, bool noise_on, bool zf_on);

/// The genie equations RX `rx` needs to decode its own group: its cross-group
/// interference value plus the overheard rows of its own group at the other
/// receivers. Quantizes the values when a quantizer is supplied.
std::vector<GenieEquation> make_genie(const ComplexMatrix& h, const SlotPrecoders& slot,
                                      const SlotObservation& obs, int rx,
                                      const ComplexQuantizer* quantizer);

struct DecodeResult {
  ComplexVector decoded;
  ComplexVector truth;
  double max_rel_error = 0.0;
  bool rank_failure = false;
};

/// Stacks the RX's own observation (interference removed via the genie
/// value) with the overheard equations and solves the square system for the
/// RX's own-group symbols.
DecodeResult decode_order_j(const ComplexMatrix& h, const SlotPrecoders& slot,
                            const SlotObservation& obs, int rx,
                            const std::vector<GenieEquation>& genie);

/// Exact post-equalization SINR of each own-group symbol for one draw,
/// conditioned on the channel and precoders: the stacked system is solved
/// with per-row noise variances (zero-forced layer plus thermal noise on the
/// own row, quantization distortion on genie rows) propagated through the
/// inverse. Ergodic rates follow by averaging log2(1 + SINR) over draws.
Eigen::VectorXd conditional_decode_sinr(const ComplexMatrix& h, const SlotPrecoders& slot,
                                        int rx, const std::vector<GenieEquation>& genie,
                                        bool noise_on);

struct ZfDecodeSample {
  double signal_power = 0.0;        // |h_k^H u_k s_k|^2
  double residual_power = 0.0;      // |residual - own term|^2
  double alt_leakage = 0.0;         // group energy left after subtraction, relative
  Complex estimate;                  // residual / (h_k^H u_k)
};

/// Subtracts the (decoded) group contributions from y_k and measures the
/// residual zero-forcing link: own symbol at P^alpha over a P^0 leakage
/// floor.
ZfDecodeSample successive_zf_decode(const ComplexMatrix& h, const SlotPrecoders& slot,
                                    const SlotObservation& obs, int rx,
                                    const ComplexVector& decoded_low,
                                    const ComplexVector& decoded_high);

struct RateSweep {
  std::vector<SlopeEstimate> alt_sinr_slopes;  // E log2 SINR vs log2 P, target 1 - alpha
  std::vector<SlopeEstimate> alt_rate_slopes;  // E log2(1 + SINR) vs log2 P (ergodic rate)
  SlopeEstimate zf_sinr_slope;                 // post-subtraction, target alpha
  std::vector<double> used_db;
  std::vector<double> excluded_db;
  /// Per grid point: per-symbol geometric-mean SINR and the ZF SINR (linear).
  std::vector<std::vector<double>> alt_sinr;
  std::vector<double> zf_sinr;
};

/// Full decode sweep at the given RX: per-symbol SINR slopes for the RX's
/// own group (target 1 - alpha) and the post-subtraction ZF SINR slope
/// (target alpha), with optional quantized genie delivery.
RateSweep decode_rate_sweep(const SystemConfig& config_template, int j,
                            const std::vector<double>& snr_grid_db, int trials,
                            const StreamKey& key, bool quantize, int rx = 0);

struct E2eReport {
  int n = 0;
  std::int64_t symbols_expected = 0;
  std::int64_t symbols_recovered = 0;
  std::int64_t slots = 0;
  std::int64_t ledger_slots = 0;
  double max_rel_error = 0.0;
  int rank_failures = 0;
  bool all_messages_delivered = false;
};

/// Noise-free end-to-end replay of the K = 3 walkthrough schedule at
/// alpha = 0: every slot is physically transmitted, every overheard message
/// is delivered (in a later slot or by broadcast) and checked for exact
/// recovery at every receiver that needs it.
E2eReport altmat_e2e(int n, const StreamKey& key);

}  // namespace misodof

#endif  // MISODOF_KMAT_HPP
