// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/kmat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <initializer_list>
#include <map>
#include <stdexcept>

#include "misodof/altmat.hpp"

namespace misodof {

namespace {

StreamKey lane(const StreamKey& key, std::uint64_t which) {
  return {key.master_seed, key.stream_id * 16 + which, key.counter};
}

ComplexVector random_complex_vector(std::mt19937_64& rng, Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_gaussian(rng, 1.0);
  return v;
}

}  // namespace

GroupBudget kmat_group_budget(double p, double alpha, int group_cols) {
  if (group_cols < 1) throw std::invalid_argument("kmat_group_budget: empty group");
  GroupBudget b;
  const double pa = std::pow(p, alpha);
  const double p1a = std::pow(p, 1.0 - alpha);
  const double n = static_cast<double>(group_cols);
  const double leader = 0.5 * (p - pa) - 0.5 * ((n - 1.0) / n) * p1a;
  b.clamped = leader < 0.0;
  b.leader = b.clamped ? 0.0 : leader;
  b.member = 0.5 * p1a / n;
  return b;
}

ComplexMatrix null_space_basis(const ComplexMatrix& rows) {
  const Eigen::Index m = rows.cols();
  const Eigen::Index r = rows.rows();
  if (r >= m) throw std::invalid_argument("null_space_basis: no null space (rows >= cols)");
  Eigen::JacobiSVD<ComplexMatrix> svd(rows, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(m - r);
}

SlotPrecoders build_kmat_slot(const SystemConfig& config, int j, const ComplexMatrix& h_hat,
                              const StreamKey& key) {
  config.validate();
  if (j < 1 || j > config.k - 1)
    throw std::invalid_argument("build_kmat_slot: 1 <= j <= K-1 required");
  if (h_hat.rows() != config.k || h_hat.cols() != config.m)
    throw std::invalid_argument("build_kmat_slot: estimate shape mismatch");

  const int k = config.k;
  const int m = config.m;
  auto rng = key.make_rng();

  SlotPrecoders slot;
  slot.j = j;

  const auto build_group = [&](int leader_zf_begin, int leader_zf_end, int cols,
                               const GroupBudget& budget, Eigen::VectorXd& budgets) {
    // Leading column: any unit vector of the estimated null space of the
    // opposite receivers; the rest random, orthogonalized within the group.
    ComplexMatrix rows(leader_zf_end - leader_zf_begin, m);
    for (int r = leader_zf_begin; r < leader_zf_end; ++r)
      rows.row(r - leader_zf_begin) = h_hat.row(r);
    ComplexMatrix directions(m, cols);
    directions.col(0) = null_space_basis(rows).col(0);
    for (int c = 1; c < cols; ++c) {
      ComplexVector v = random_complex_vector(rng, m);
      for (int prev = 0; prev < c; ++prev)
        v -= directions.col(prev) * (directions.col(prev).adjoint() * v)(0);
      const double norm = v.norm();
      if (norm < 1e-12) throw std::runtime_error("build_kmat_slot: degenerate direction draw");
      directions.col(c) = v / norm;
    }
    budgets.resize(cols);
    budgets(0) = budget.leader;
    ComplexMatrix scaled(m, cols);
    scaled.col(0) = directions.col(0) * std::sqrt(budget.leader);
    for (int c = 1; c < cols; ++c) {
      budgets(c) = budget.member;
      scaled.col(c) = directions.col(c) * std::sqrt(budget.member);
    }
    return scaled;
  };

  const GroupBudget low_budget = kmat_group_budget(config.snr, config.alpha, k - j + 1);
  const GroupBudget high_budget = kmat_group_budget(config.snr, config.alpha, j + 1);
  slot.a_low = build_group(j, k, k - j + 1, low_budget, slot.low_budgets);
  slot.a_high = build_group(0, j, j + 1, high_budget, slot.high_budgets);
  slot.low_clamped = low_budget.clamped;
  slot.high_clamped = high_budget.clamped;

  slot.zf_budget = std::pow(config.snr, config.alpha) / static_cast<double>(k);
  slot.u_zf.resize(m, k);
  ComplexMatrix others(k - 1, m);
  for (int i = 0; i < k; ++i) {
    int rr = 0;
    for (int r = 0; r < k; ++r)
      if (r != i) others.row(rr++) = h_hat.row(r);
    slot.u_zf.col(i) = null_space_basis(others).col(0) * std::sqrt(slot.zf_budget);
  }
  return slot;
}

Eigen::MatrixXd symbol_mean_group_powers(const ComplexMatrix& h, const SlotPrecoders& slot) {
  const int k = static_cast<int>(h.rows());
  Eigen::MatrixXd powers = Eigen::MatrixXd::Zero(k, kSignalGroupCount);
  for (int rx = 0; rx < k; ++rx) {
    const bool low_side = rx < slot.j;
    const ComplexMatrix& own = low_side ? slot.a_low : slot.a_high;
    const ComplexMatrix& cross = low_side ? slot.a_high : slot.a_low;
    const Eigen::RowVectorXcd own_gains = h.row(rx) * own;
    const Eigen::RowVectorXcd cross_gains = h.row(rx) * cross;
    const Eigen::RowVectorXcd zf_gains = h.row(rx) * slot.u_zf;
    powers(rx, kOwnLeader) = std::norm(own_gains(0));
    for (Eigen::Index c = 1; c < own_gains.size(); ++c)
      powers(rx, kOwnRest) += std::norm(own_gains(c));
    for (Eigen::Index c = 0; c < cross_gains.size(); ++c)
      powers(rx, kCross) += std::norm(cross_gains(c));
    powers(rx, kZfOwn) = std::norm(zf_gains(rx));
    for (int i = 0; i < k; ++i)
      if (i != rx) powers(rx, kZfOther) += std::norm(zf_gains(i));
  }
  return powers;
}

Eigen::MatrixXd power_report(const SystemConfig& config, int j, int trials,
                             const StreamKey& key) {
  config.validate();
  if (trials < 1) throw std::invalid_argument("power_report: trials >= 1");
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(config.k) * kSignalGroupCount);
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization real = sample_channel(config, lane(key, 0).with_counter(t));
    const SlotPrecoders slot = build_kmat_slot(config, j, real.h_hat, lane(key, 1).with_counter(t));
    const Eigen::MatrixXd powers = symbol_mean_group_powers(real.h, slot);
    for (int rx = 0; rx < config.k; ++rx)
      for (int g = 0; g < kSignalGroupCount; ++g)
        acc[rx * kSignalGroupCount + g].add(powers(rx, g));
  }
  Eigen::MatrixXd mean(config.k, kSignalGroupCount);
  for (int rx = 0; rx < config.k; ++rx)
    for (int g = 0; g < kSignalGroupCount; ++g)
      mean(rx, g) = acc[rx * kSignalGroupCount + g].value() / trials;
  return mean;
}

ExponentSweep exponent_sweep(const SystemConfig& config_template, int j,
                             const std::vector<double>& snr_grid_db, int trials,
                             const StreamKey& key) {
  if (snr_grid_db.size() < 4)
    throw std::invalid_argument("exponent_sweep: need at least 4 grid points");
  const auto [lo, hi] = std::minmax_element(snr_grid_db.begin(), snr_grid_db.end());
  if (*hi - *lo < 30.0) throw std::invalid_argument("exponent_sweep: grid must span >= 30 dB");

  ExponentSweep sweep;
  const int k = config_template.k;
  std::vector<std::vector<std::array<double, 2>>> pts(
      static_cast<std::size_t>(k) * kSignalGroupCount);
  for (std::size_t g = 0; g < snr_grid_db.size(); ++g) {
    SystemConfig config = config_template;
    config.snr = db_to_linear(snr_grid_db[g]);
    const GroupBudget low = kmat_group_budget(config.snr, config.alpha, k - j + 1);
    const GroupBudget high = kmat_group_budget(config.snr, config.alpha, j + 1);
    if (low.clamped || high.clamped) {
      sweep.excluded_db.push_back(snr_grid_db[g]);
      continue;
    }
    const Eigen::MatrixXd mean = power_report(config, j, trials, key.with_stream(g));
    for (int rx = 0; rx < k; ++rx)
      for (int grp = 0; grp < kSignalGroupCount; ++grp)
        pts[rx * kSignalGroupCount + grp].push_back(
            {std::log10(config.snr), std::log10(mean(rx, grp))});
    sweep.used_db.push_back(snr_grid_db[g]);
  }
  if (sweep.used_db.size() < 2)
    throw std::runtime_error("exponent_sweep: too few points below the clamp");
  sweep.slopes.resize(k, kSignalGroupCount);
  sweep.stderrs.resize(k, kSignalGroupCount);
  for (int rx = 0; rx < k; ++rx) {
    for (int grp = 0; grp < kSignalGroupCount; ++grp) {
      std::vector<std::pair<double, double>> line;
      for (const auto& p : pts[rx * kSignalGroupCount + grp]) line.emplace_back(p[0], p[1]);
      const SlopeEstimate est = fit_line(line);
      sweep.slopes(rx, grp) = est.slope;
      sweep.stderrs(rx, grp) = est.stderr_slope;
    }
  }
  return sweep;
}

ComplexQuantizer::ComplexQuantizer(double std_re, double std_im, int total_bits)
    : range_re_(4.0 * std_re), range_im_(4.0 * std_im) {
  if (total_bits <= 0) throw std::domain_error("ComplexQuantizer: nonpositive bit budget");
  bits_im_ = total_bits / 2;
  bits_re_ = total_bits - bits_im_;
}

double ComplexQuantizer::step(double range, int bits) const {
  return 2.0 * range / static_cast<double>(1LL << bits);
}

double ComplexQuantizer::quantize_dim(double x, double range, int bits) const {
  if (bits <= 0 || range <= 0.0) return 0.0;
  const double delta = step(range, bits);
  auto idx = static_cast<long long>(std::floor((x + range) / delta));
  idx = std::clamp(idx, 0LL, (1LL << bits) - 1);
  return -range + (static_cast<double>(idx) + 0.5) * delta;
}

Complex ComplexQuantizer::quantize(Complex v) const {
  return {quantize_dim(v.real(), range_re_, bits_re_),
          quantize_dim(v.imag(), range_im_, bits_im_)};
}

int genie_bit_budget(double p, double alpha) {
  const int bits = static_cast<int>(std::lround((1.0 - alpha) * std::log2(p)));
  if (bits <= 0)
    throw std::domain_error("genie_bit_budget: nonpositive bit budget (alpha = 1 boundary)");
  return bits;
}

QuantizationReport quantize_equation(const std::vector<Complex>& values, double p, double alpha) {
  if (values.empty()) throw std::invalid_argument("quantize_equation: empty sample set");
  QuantizationReport report;
  report.total_bits = genie_bit_budget(p, alpha);

  double m_re = 0.0, m_im = 0.0;
  for (const Complex& v : values) {
    m_re += v.real();
    m_im += v.imag();
  }
  m_re /= static_cast<double>(values.size());
  m_im /= static_cast<double>(values.size());
  double v_re = 0.0, v_im = 0.0;
  CompensatedSum power;
  for (const Complex& v : values) {
    v_re += (v.real() - m_re) * (v.real() - m_re);
    v_im += (v.imag() - m_im) * (v.imag() - m_im);
    power.add(std::norm(v));
  }
  v_re /= static_cast<double>(values.size());
  v_im /= static_cast<double>(values.size());
  report.mean_power = power.value() / static_cast<double>(values.size());

  const ComplexQuantizer q(std::sqrt(v_re), std::sqrt(v_im), report.total_bits);
  CompensatedSum dist;
  for (const Complex& v : values) {
    const Complex e = v - q.quantize(v);
    dist.add(std::norm(e));
    if (std::abs(v.real()) > 4.0 * std::sqrt(v_re) || std::abs(v.imag()) > 4.0 * std::sqrt(v_im))
      ++report.clipped;
  }
  report.distortion = dist.value() / static_cast<double>(values.size());
  return report;
}

SlopeEstimate distortion_sweep(const SystemConfig& config_template, int j,
                               const std::vector<double>& snr_grid_db, int trials,
                               const StreamKey& key) {
  if (snr_grid_db.size() < 2)
    throw std::invalid_argument("distortion_sweep: need at least 2 grid points");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t g = 0; g < snr_grid_db.size(); ++g) {
    SystemConfig config = config_template;
    config.snr = db_to_linear(snr_grid_db[g]);
    const StreamKey base = key.with_stream(g);
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(trials) * config.k);
    for (int t = 0; t < trials; ++t) {
      const ChannelRealization real = sample_channel(config, lane(base, 0).with_counter(t));
      const SlotPrecoders slot =
          build_kmat_slot(config, j, real.h_hat, lane(base, 1).with_counter(t));
      auto rng = lane(base, 2).with_counter(t).make_rng();
      const SlotObservation obs = transmit_slot(real.h, slot, rng, false, false);
      // The values the scheme would retransmit: every overheard equation and
      // interference term, all scaling like P^(1-alpha).
      for (const GenieEquation& eq : make_genie(real.h, slot, obs, 0, nullptr))
        values.push_back(eq.value);
    }
    const QuantizationReport report = quantize_equation(values, config.snr, config.alpha);
    pts.emplace_back(std::log10(config.snr), std::log10(report.distortion));
  }
  return fit_line(pts);
}

SlotObservation transmit_slot(const ComplexMatrix& h, const SlotPrecoders& slot,
                              std::mt19937_64& rng, bool noise_on, bool zf_on) {
  const Eigen::Index k = h.rows();
  SlotObservation obs;
  obs.s_low = random_complex_vector(rng, slot.a_low.cols());
  obs.s_high = random_complex_vector(rng, slot.a_high.cols());
  obs.s_zf = zf_on ? random_complex_vector(rng, slot.u_zf.cols())
                   : ComplexVector::Zero(slot.u_zf.cols());
  ComplexVector x = slot.a_low * obs.s_low + slot.a_high * obs.s_high;
  if (zf_on) x += slot.u_zf * obs.s_zf;
  obs.noise = ComplexVector::Zero(k);
  if (noise_on)
    for (Eigen::Index i = 0; i < k; ++i) obs.noise(i) = complex_gaussian(rng, 1.0);
  obs.y = h * x + obs.noise;
  return obs;
}

std::vector<GenieEquation> make_genie(const ComplexMatrix& h, const SlotPrecoders& slot,
                                      const SlotObservation& obs, int rx,
                                      const ComplexQuantizer* quantizer) {
  const int k = static_cast<int>(h.rows());
  const bool low_side = rx < slot.j;
  const ComplexMatrix& own = low_side ? slot.a_low : slot.a_high;
  const ComplexMatrix& cross = low_side ? slot.a_high : slot.a_low;
  const ComplexVector& own_syms = low_side ? obs.s_low : obs.s_high;
  const ComplexVector& cross_syms = low_side ? obs.s_high : obs.s_low;

  const auto fill = [&](GenieEquation& eq, Complex exact) {
    if (quantizer != nullptr) {
      eq.value = quantizer->quantize(exact);
      eq.quantized = true;
      eq.bits = quantizer->total_bits();
      eq.quant_error_power = std::norm(eq.value - exact);
    } else {
      eq.value = exact;
    }
  };

  std::vector<GenieEquation> genie;
  // genie[0]: the RX's own cross-group interference (subtraction side info).
  GenieEquation interference;
  fill(interference, (h.row(rx) * (cross * cross_syms))(0));
  interference.coeff_row = (h.row(rx) * cross).transpose();
  interference.order = low_side ? k - slot.j + 1 : slot.j + 1;
  genie.push_back(std::move(interference));

  // genie[1..]: the own-group rows overheard at the opposite receivers.
  const int begin = low_side ? slot.j : 0;
  const int end = low_side ? k : slot.j;
  for (int i = begin; i < end; ++i) {
    GenieEquation eq;
    fill(eq, (h.row(i) * (own * own_syms))(0));
    eq.coeff_row = (h.row(i) * own).transpose();
    eq.order = low_side ? slot.j + 1 : k - slot.j + 1;
    genie.push_back(std::move(eq));
  }
  return genie;
}

Eigen::VectorXd conditional_decode_sinr(const ComplexMatrix& h, const SlotPrecoders& slot,
                                        int rx, const std::vector<GenieEquation>& genie,
                                        bool noise_on) {
  const int k = static_cast<int>(h.rows());
  const bool low_side = rx < slot.j;
  const ComplexMatrix& own = low_side ? slot.a_low : slot.a_high;
  const Eigen::Index n = own.cols();
  if (static_cast<Eigen::Index>(genie.size()) != n)
    throw std::invalid_argument("conditional_decode_sinr: genie size mismatch");
  ComplexMatrix g(n, n);
  Eigen::VectorXd row_noise(n);
  g.row(0) = h.row(rx) * own;
  // Own row: the zero-forced layer is treated as noise, plus thermal noise
  // and whatever distortion the subtracted interference value carries.
  double v0 = noise_on ? 1.0 : 0.0;
  for (int i = 0; i < k; ++i) v0 += std::norm((h.row(rx) * slot.u_zf.col(i))(0));
  row_noise(0) = v0 + genie[0].quant_error_power;
  for (Eigen::Index e = 1; e < n; ++e) {
    g.row(e) = genie[e].coeff_row.transpose();
    row_noise(e) = genie[e].quant_error_power;
  }
  const ComplexMatrix inv = g.inverse();
  Eigen::VectorXd sinr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double err = 0.0;
    for (Eigen::Index e = 0; e < n; ++e) err += std::norm(inv(i, e)) * row_noise(e);
    sinr(i) = 1.0 / std::max(err, 1e-300);  // unit-power symbols
  }
  return sinr;
}

DecodeResult decode_order_j(const ComplexMatrix& h, const SlotPrecoders& slot,
                            const SlotObservation& obs, int rx,
                            const std::vector<GenieEquation>& genie) {
  const bool low_side = rx < slot.j;
  const ComplexMatrix& own = low_side ? slot.a_low : slot.a_high;
  const Eigen::Index n = own.cols();
  if (static_cast<Eigen::Index>(genie.size()) != n)
    throw std::invalid_argument("decode_order_j: expected " + std::to_string(n) +
                                " genie equations (interference + overheard)");
  ComplexMatrix g(n, n);
  ComplexVector rhs(n);
  g.row(0) = h.row(rx) * own;
  rhs(0) = obs.y(rx) - genie[0].value;
  for (Eigen::Index e = 1; e < n; ++e) {
    g.row(e) = genie[e].coeff_row.transpose();
    rhs(e) = genie[e].value;
  }
  DecodeResult result;
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(g);
  qr.setThreshold(1e-12);
  result.rank_failure = qr.rank() < n;
  result.decoded = qr.solve(rhs);
  result.truth = low_side ? obs.s_low : obs.s_high;
  const double ref = result.truth.norm();
  result.max_rel_error = (result.decoded - result.truth).norm() / (ref > 0.0 ? ref : 1.0);
  return result;
}

ZfDecodeSample successive_zf_decode(const ComplexMatrix& h, const SlotPrecoders& slot,
                                    const SlotObservation& obs, int rx,
                                    const ComplexVector& decoded_low,
                                    const ComplexVector& decoded_high) {
  ZfDecodeSample sample;
  const Complex residual =
      obs.y(rx) - (h.row(rx) * (slot.a_low * decoded_low + slot.a_high * decoded_high))(0);
  const Complex own_gain = (h.row(rx) * slot.u_zf.col(rx))(0);
  const Complex own_term = own_gain * obs.s_zf(rx);
  sample.signal_power = std::norm(own_term);
  sample.residual_power = std::norm(residual - own_term);
  const Complex alt_true = (h.row(rx) * (slot.a_low * obs.s_low + slot.a_high * obs.s_high))(0);
  const Complex alt_left =
      (h.row(rx) * (slot.a_low * (obs.s_low - decoded_low) +
                    slot.a_high * (obs.s_high - decoded_high)))(0);
  sample.alt_leakage = std::abs(alt_left) / std::max(std::abs(alt_true), 1e-300);
  sample.estimate = std::abs(own_gain) > 0.0 ? residual / own_gain : Complex(0.0, 0.0);
  return sample;
}

RateSweep decode_rate_sweep(const SystemConfig& config_template, int j,
                            const std::vector<double>& snr_grid_db, int trials,
                            const StreamKey& key, bool quantize, int rx) {
  if (snr_grid_db.size() < 4)
    throw std::invalid_argument("decode_rate_sweep: need at least 4 grid points");
  if (trials < 1) throw std::invalid_argument("decode_rate_sweep: trials >= 1");

  RateSweep sweep;
  const int k = config_template.k;
  const int own_cols = rx < j ? k - j + 1 : j + 1;
  std::vector<std::vector<std::pair<double, double>>> sinr_pts(own_cols);
  std::vector<std::vector<std::pair<double, double>>> rate_pts(own_cols);
  std::vector<std::pair<double, double>> zf_pts;

  for (std::size_t g = 0; g < snr_grid_db.size(); ++g) {
    SystemConfig config = config_template;
    config.snr = db_to_linear(snr_grid_db[g]);
    const GroupBudget low = kmat_group_budget(config.snr, config.alpha, k - j + 1);
    const GroupBudget high = kmat_group_budget(config.snr, config.alpha, j + 1);
    if (low.clamped || high.clamped) {
      sweep.excluded_db.push_back(snr_grid_db[g]);
      continue;
    }
    // Common random numbers across grid points: the draws per trial index t
    // are shared by every P, so the heavy-tailed conditioning factor of the
    // stacked solve cancels out of the slope.
    const StreamKey base = key;

    // Pilot pass: fix the quantizer ranges from the equation population.
    std::optional<ComplexQuantizer> quantizer;
    if (quantize) {
      std::vector<Complex> pilot_values;
      const int pilot = std::min(trials, 256);
      for (int t = 0; t < pilot; ++t) {
        const ChannelRealization real = sample_channel(config, lane(base, 8).with_counter(t));
        const SlotPrecoders slot =
            build_kmat_slot(config, j, real.h_hat, lane(base, 9).with_counter(t));
        auto rng = lane(base, 10).with_counter(t).make_rng();
        const SlotObservation obs = transmit_slot(real.h, slot, rng, true, true);
        for (const GenieEquation& eq : make_genie(real.h, slot, obs, rx, nullptr))
          pilot_values.push_back(eq.value);
      }
      double var_re = 0.0, var_im = 0.0;
      for (const Complex& v : pilot_values) {
        var_re += v.real() * v.real();
        var_im += v.imag() * v.imag();
      }
      var_re /= static_cast<double>(pilot_values.size());
      var_im /= static_cast<double>(pilot_values.size());
      quantizer.emplace(std::sqrt(var_re), std::sqrt(var_im),
                        genie_bit_budget(config.snr, config.alpha));
    }

    std::vector<CompensatedSum> log_sinr(own_cols), log_rate(own_cols);
    CompensatedSum zf_signal, zf_floor;
    for (int t = 0; t < trials; ++t) {
      const ChannelRealization real = sample_channel(config, lane(base, 0).with_counter(t));
      const SlotPrecoders slot =
          build_kmat_slot(config, j, real.h_hat, lane(base, 1).with_counter(t));
      auto rng = lane(base, 2).with_counter(t).make_rng();
      const SlotObservation obs = transmit_slot(real.h, slot, rng, true, true);
      const auto genie =
          make_genie(real.h, slot, obs, rx, quantizer ? &*quantizer : nullptr);
      const Eigen::VectorXd sinr = conditional_decode_sinr(real.h, slot, rx, genie, true);
      for (int s = 0; s < own_cols; ++s) {
        log_sinr[s].add(std::log2(sinr(s)));
        log_rate[s].add(std::log2(1.0 + sinr(s)));
      }
      // The ZF stage models reliable group decoding: subtraction with the
      // true symbols, per the successive structure.
      const ZfDecodeSample zf =
          successive_zf_decode(real.h, slot, obs, rx, obs.s_low, obs.s_high);
      zf_signal.add(zf.signal_power);
      zf_floor.add(zf.residual_power);
    }
    const double log2p = std::log2(config.snr);
    std::vector<double> sinr_row(own_cols);
    for (int s = 0; s < own_cols; ++s) {
      sinr_row[s] = std::exp2(log_sinr[s].value() / trials);  // geometric mean
      sinr_pts[s].emplace_back(log2p, log_sinr[s].value() / trials);
      rate_pts[s].emplace_back(log2p, log_rate[s].value() / trials);
    }
    const double zf_sinr = zf_signal.value() / zf_floor.value();
    zf_pts.emplace_back(log2p, std::log2(zf_sinr));
    sweep.alt_sinr.push_back(std::move(sinr_row));
    sweep.zf_sinr.push_back(zf_sinr);
    sweep.used_db.push_back(snr_grid_db[g]);
  }
  if (zf_pts.size() < 2) throw std::runtime_error("decode_rate_sweep: too few usable points");
  for (int s = 0; s < own_cols; ++s) {
    sweep.alt_sinr_slopes.push_back(fit_line(sinr_pts[s]));
    sweep.alt_rate_slopes.push_back(fit_line(rate_pts[s]));
  }
  sweep.zf_sinr_slope = fit_line(zf_pts);
  return sweep;
}

namespace {

// End-to-end replay machinery for the three-user walkthrough at alpha = 0.
struct E2eMessage {
  Complex value;
  std::array<bool, 3> needs{};      // which receivers must obtain it
  std::array<bool, 3> delivered{};  // where it has been recovered exactly
};

class E2eRun {
 public:
  E2eRun(int n, const StreamKey& key, E2eReport& report)
      : n_(n), key_(key), report_(report) {}

  void execute() {
    for (const auto& [a, b] : std::array<std::pair<int, int>, 3>{{{0, 1}, {1, 2}, {2, 0}}})
      init_slot(a, b);
    for (int m = 1; m <= n_; ++m) {
      std::vector<std::size_t> order3;
      for (int r = 0; r < 3; ++r) order3.push_back(rotation_slot(r));
      for (std::size_t id : order3) broadcast(id);
    }
    // Termination: broadcast every still-pending pair message.
    for (auto& [pair, queue] : pair_queues_) {
      (void)pair;
      while (!queue.empty()) {
        broadcast(queue.front());
        queue.pop_front();
      }
    }
    for (const E2eMessage& msg : messages_) {
      for (int rx = 0; rx < 3; ++rx) {
        if (msg.needs[rx] && !msg.delivered[rx]) return;  // leaves flag false
      }
    }
    report_.all_messages_delivered = true;
  }

 private:
  ComplexMatrix next_channel() {
    SystemConfig config;
    config.k = 3;
    config.m = 3;
    config.snr = 2.0;  // immaterial at alpha = 0 with noise off
    config.alpha = 0.0;
    return sample_channel(config, lane(key_, 0).with_counter(slot_index_)).h;
  }

  std::mt19937_64 slot_rng() { return lane(key_, 1).with_counter(slot_index_).make_rng(); }

  // Order-1 data symbols: counted as recovered only below the tolerance.
  void check_recovery(const ComplexVector& got, const ComplexVector& truth) {
    const double ref = std::max(truth.norm(), 1e-300);
    const double rel = (got - truth).norm() / ref;
    report_.max_rel_error = std::max(report_.max_rel_error, rel);
    if (rel < 1e-8) report_.symbols_recovered += truth.size();
  }

  // Carried message values: track the error without touching the order-1 count.
  void check_carried(const ComplexVector& got, const ComplexVector& truth) {
    const double ref = std::max(truth.norm(), 1e-300);
    report_.max_rel_error = std::max(report_.max_rel_error, (got - truth).norm() / ref);
  }

  ComplexVector solve_checked(const ComplexMatrix& g, const ComplexVector& rhs) {
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(g);
    qr.setThreshold(1e-12);
    if (qr.rank() < g.cols()) ++report_.rank_failures;
    return qr.solve(rhs);
  }

  std::size_t push_message(Complex value, std::initializer_list<int> needs) {
    E2eMessage msg;
    msg.value = value;
    for (int rx : needs) msg.needs[rx] = true;
    messages_.push_back(msg);
    return messages_.size() - 1;
  }

  void mark_delivered(std::size_t id, int rx, Complex recovered) {
    const double rel =
        std::abs(recovered - messages_[id].value) / std::max(std::abs(messages_[id].value), 1e-300);
    report_.max_rel_error = std::max(report_.max_rel_error, rel);
    if (rel < 1e-8) messages_[id].delivered[rx] = true;
  }

  // One initialization slot: two fresh symbols for each of the pair, the two
  // crossed interference values become pair messages.
  void init_slot(int a, int b) {
    const ComplexMatrix h = next_channel();
    auto rng = slot_rng();
    const ComplexMatrix pa = random_matrix(rng, 3, 2);
    const ComplexMatrix pb = random_matrix(rng, 3, 2);
    const ComplexVector ua = random_complex_vector(rng, 2);
    const ComplexVector ub = random_complex_vector(rng, 2);
    const ComplexVector y = h * (pa * ua + pb * ub);

    const Complex m_at_a = (h.row(a) * (pb * ub))(0);  // interference seen at a
    const Complex m_at_b = (h.row(b) * (pa * ua))(0);
    const std::size_t id_a = push_message(m_at_a, {a, b});
    const std::size_t id_b = push_message(m_at_b, {a, b});
    pair_queues_[pair_key(a, b)].push_back(id_a);
    pair_queues_[pair_key(a, b)].push_back(id_b);

    // Decoding at a: own observation minus interference, plus the overheard
    // equation from b.
    ComplexMatrix ga(2, 2);
    ga.row(0) = h.row(a) * pa;
    ga.row(1) = h.row(b) * pa;
    ComplexVector rhs_a(2);
    rhs_a(0) = y(a) - m_at_a;
    rhs_a(1) = m_at_b;
    check_recovery(solve_checked(ga, rhs_a), ua);

    ComplexMatrix gb(2, 2);
    gb.row(0) = h.row(b) * pb;
    gb.row(1) = h.row(a) * pb;
    ComplexVector rhs_b(2);
    rhs_b(0) = y(b) - m_at_b;
    rhs_b(1) = m_at_a;
    check_recovery(solve_checked(gb, rhs_b), ub);

    ++slot_index_;
  }

  // One main-iteration rotation slot: three fresh symbols for RX r overlaid
  // with two pending pair-(s,t) messages; returns the new order-3 message.
  std::size_t rotation_slot(int r) {
    const int s = (r + 1) % 3;
    const int t = (r + 2) % 3;
    auto& queue = pair_queues_[pair_key(s, t)];
    if (queue.size() < 2) throw std::logic_error("altmat_e2e: pair queue underflow");
    const std::size_t c0 = queue.front();
    queue.pop_front();
    const std::size_t c1 = queue.front();
    queue.pop_front();

    const ComplexMatrix h = next_channel();
    auto rng = slot_rng();
    const ComplexMatrix pa = random_matrix(rng, 3, 3);
    const ComplexMatrix pb = random_matrix(rng, 3, 2);
    const ComplexVector u1 = random_complex_vector(rng, 3);
    ComplexVector u23(2);
    u23 << messages_[c0].value, messages_[c1].value;
    const ComplexVector y = h * (pa * u1 + pb * u23);

    const Complex m3 = (h.row(r) * (pb * u23))(0);
    const Complex m_rs = (h.row(s) * (pa * u1))(0);
    const Complex m_rt = (h.row(t) * (pa * u1))(0);
    const std::size_t id3 = push_message(m3, {0, 1, 2});
    const std::size_t id_rs = push_message(m_rs, {r, s});
    const std::size_t id_rt = push_message(m_rt, {r, t});
    pair_queues_[pair_key(r, s)].push_back(id_rs);
    pair_queues_[pair_key(r, t)].push_back(id_rt);

    // RX r: remove the order-3 interference, add the two overheard rows.
    ComplexMatrix gr(3, 3);
    gr.row(0) = h.row(r) * pa;
    gr.row(1) = h.row(s) * pa;
    gr.row(2) = h.row(t) * pa;
    ComplexVector rhs_r(3);
    rhs_r(0) = y(r) - m3;
    rhs_r(1) = m_rs;
    rhs_r(2) = m_rt;
    check_recovery(solve_checked(gr, rhs_r), u1);

    // RX s and t: remove their own overheard interference, use the order-3
    // message as the second equation; this is also how the two carried pair
    // messages get delivered.
    decode_carried(h, pb, u23, y, s, r, m_rs, m3, c0, c1);
    decode_carried(h, pb, u23, y, t, r, m_rt, m3, c0, c1);

    ++slot_index_;
    return id3;
  }

  // The order-3 equation m3 = h_owner^H (pb u23) supplies the second row.
  void decode_carried(const ComplexMatrix& h, const ComplexMatrix& pb, const ComplexVector& u23,
                      const ComplexVector& y, int rx, int owner, Complex own_interference,
                      Complex m3, std::size_t c0, std::size_t c1) {
    ComplexMatrix g(2, 2);
    g.row(0) = h.row(rx) * pb;
    g.row(1) = h.row(owner) * pb;
    ComplexVector rhs(2);
    rhs(0) = y(rx) - own_interference;
    rhs(1) = m3;
    const ComplexVector dec = solve_checked(g, rhs);
    check_carried(dec, u23);
    mark_delivered(c0, rx, dec(0));
    mark_delivered(c1, rx, dec(1));
  }

  // Broadcast delivery of one message: a random beacon column, every RX
  // divides out its own channel gain.
  void broadcast(std::size_t id) {
    const ComplexMatrix h = next_channel();
    auto rng = slot_rng();
    const ComplexVector c = random_complex_vector(rng, 3);
    const ComplexVector y = h * (c * messages_[id].value);
    for (int rx = 0; rx < 3; ++rx) {
      const Complex gain = (h.row(rx) * c)(0);
      if (std::abs(gain) < 1e-12) {
        ++report_.rank_failures;
        continue;
      }
      mark_delivered(id, rx, y(rx) / gain);
    }
    ++slot_index_;
  }

  static ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = complex_gaussian(rng, 1.0);
    return m;
  }

  static int pair_key(int a, int b) { return (1 << a) | (1 << b); }

  int n_;
  StreamKey key_;
  E2eReport& report_;
  std::vector<E2eMessage> messages_;
  std::map<int, std::deque<std::size_t>> pair_queues_;
  std::int64_t slot_index_ = 0;

 public:
  std::int64_t slots_used() const { return slot_index_; }
};

}  // namespace

E2eReport altmat_e2e(int n, const StreamKey& key) {
  if (n < 0) throw std::invalid_argument("altmat_e2e: n >= 0 required");
  E2eReport report;
  report.n = n;
  report.symbols_expected = 12 + 9 * static_cast<std::int64_t>(n);
  E2eRun run(n, key, report);
  run.execute();
  report.slots = run.slots_used();
  report.ledger_slots = run_altmat(3, n, ScheduleVariant::kK3Paper).total_slots();
  return report;
}

}  // namespace misodof
