// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "misodof/kmat.hpp"

using namespace misodof;

namespace {

const StreamKey kKey{0x5EED5EED5EED5EEDULL, 0, 0};

SystemConfig make_config(int k, int m, double snr, double alpha) {
  SystemConfig c;
  c.k = k;
  c.m = m;
  c.snr = snr;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST_CASE("power budgets at the reference point") {
  // K = 3, j = 1, alpha = 1/2, P = 1e4: leader (P - P^a)/2 - P^(1-a)/3,
  // members P^(1-a)/6.
  const GroupBudget low = kmat_group_budget(1e4, 0.5, 3);
  CHECK_FALSE(low.clamped);
  CHECK(low.leader == doctest::Approx(4916.6666666666667).epsilon(1e-12));
  CHECK(low.member == doctest::Approx(100.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("alpha = 1 collapses the aligned groups onto zero-forcing") {
  const GroupBudget b = kmat_group_budget(1e4, 1.0, 3);
  CHECK(b.clamped);
  CHECK(b.leader == 0.0);
  const SystemConfig c = make_config(3, 3, 1e4, 1.0);
  const ChannelRealization real = sample_channel(c, kKey);
  const SlotPrecoders slot = build_kmat_slot(c, 1, real.h_hat, kKey);
  CHECK(slot.below_asymptotic_regime());
  CHECK(slot.a_low.col(0).norm() == 0.0);
  CHECK(slot.zf_budget == doctest::Approx(1e4 / 3.0));
}

TEST_CASE("slot precoder feasibility across the parameter grid") {
  for (int k = 2; k <= 6; ++k) {
    for (int m : {k, k + 1}) {
      for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (double p : {1e2, 1e4, 1e6}) {
          const SystemConfig c = make_config(k, m, p, alpha);
          const ChannelRealization real = sample_channel(c, kKey.with_counter(k * 100 + m));
          for (int j = 1; j <= k - 1; ++j) {
            const SlotPrecoders slot =
                build_kmat_slot(c, j, real.h_hat, kKey.with_stream(j));
            const double pa = std::pow(p, alpha);
            const double p1a = std::pow(p, 1.0 - alpha);

            // Budget arithmetic, clamp included.
            const double lead_low =
                std::max(0.0, 0.5 * (p - pa) - 0.5 * (k - j) / (k - j + 1.0) * p1a);
            CHECK(slot.low_budgets(0) == doctest::Approx(lead_low).epsilon(1e-12));
            CHECK(slot.a_low.col(0).squaredNorm() ==
                  doctest::Approx(lead_low).epsilon(1e-9));
            for (int col = 1; col < k - j + 1; ++col)
              CHECK(slot.a_low.col(col).squaredNorm() ==
                    doctest::Approx(0.5 * p1a / (k - j + 1)).epsilon(1e-9));
            const double lead_high =
                std::max(0.0, 0.5 * (p - pa) - 0.5 * j / (j + 1.0) * p1a);
            CHECK(slot.a_high.col(0).squaredNorm() ==
                  doctest::Approx(lead_high).epsilon(1e-9));

            // Zero-forcing conditions of the leading columns.
            if (!slot.low_clamped) {
              const double scale = slot.a_low.col(0).norm();
              for (int rx = j; rx < k; ++rx)
                CHECK(std::abs((real.h_hat.row(rx) * slot.a_low.col(0))(0)) < 1e-9 * scale);
            }
            if (!slot.high_clamped) {
              const double scale = slot.a_high.col(0).norm();
              for (int rx = 0; rx < j; ++rx)
                CHECK(std::abs((real.h_hat.row(rx) * slot.a_high.col(0))(0)) < 1e-9 * scale);
            }

            // In-group orthogonality and span of the nonzero columns.
            const auto check_group = [&](const ComplexMatrix& g) {
              std::vector<int> cols;
              for (int a = 0; a < g.cols(); ++a)
                if (g.col(a).norm() > 0.0) cols.push_back(a);
              for (std::size_t a = 0; a < cols.size(); ++a)
                for (std::size_t b = a + 1; b < cols.size(); ++b)
                  CHECK(std::abs((g.col(cols[a]).adjoint() * g.col(cols[b]))(0)) <
                        1e-9 * g.col(cols[a]).norm() * g.col(cols[b]).norm());
              ComplexMatrix sub(g.rows(), static_cast<Eigen::Index>(cols.size()));
              for (std::size_t a = 0; a < cols.size(); ++a) sub.col(a) = g.col(cols[a]);
              Eigen::ColPivHouseholderQR<ComplexMatrix> qr(sub);
              qr.setThreshold(1e-9);
              CHECK(qr.rank() == static_cast<Eigen::Index>(cols.size()));
            };
            check_group(slot.a_low);
            check_group(slot.a_high);

            // Conventional zero-forcing of the order-1 layer.
            for (int i = 0; i < k; ++i) {
              CHECK(slot.u_zf.col(i).squaredNorm() == doctest::Approx(pa / k).epsilon(1e-9));
              for (int rx = 0; rx < k; ++rx) {
                if (rx == i) continue;
                CHECK(std::abs((real.h_hat.row(rx) * slot.u_zf.col(i))(0)) <
                      1e-9 * slot.u_zf.col(i).norm());
              }
            }

            // Total budget: exactly P when unclamped; in the clamped regime
            // the member columns may spill by at most P^alpha worth of power.
            const double total = slot.low_budgets.sum() + slot.high_budgets.sum() +
                                 k * slot.zf_budget;
            CHECK(total <= p * (1.0 + std::pow(p, alpha - 1.0) + 1e-9));
            if (!slot.below_asymptotic_regime())
              CHECK(total == doctest::Approx(p).epsilon(1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("alpha = 1 boundary: leaders clamp, the zero-forced layer scales like P") {
  SystemConfig c = make_config(3, 3, 1e4, 1.0);
  const Eigen::MatrixXd lo = power_report(c, 1, 400, kKey.with_stream(90));
  c.snr = 1e6;
  const Eigen::MatrixXd hi = power_report(c, 1, 400, kKey.with_stream(91));
  // Own-RX zero-forced power follows P exactly (budget P^alpha / K = P / 3).
  const double slope = std::log10(hi(0, kZfOwn) / lo(0, kZfOwn)) / 2.0;
  CHECK(std::abs(slope - 1.0) < 0.05);
  // Group leaders carry zero power; what remains of the groups is O(1).
  const ChannelRealization real = sample_channel(c, kKey.with_stream(92));
  const SlotPrecoders slot = build_kmat_slot(c, 1, real.h_hat, kKey.with_stream(93));
  CHECK(slot.a_low.col(0).norm() == 0.0);
  CHECK(slot.a_high.col(0).norm() == 0.0);
  CHECK(hi(0, kOwnRest) < 2.0);
  // Every grid point is below the asymptotic regime, so the exponent sweep
  // refuses to regress.
  CHECK_THROWS_AS(exponent_sweep(c, 1, {20, 30, 40, 50, 60}, 10, kKey), std::runtime_error);
}

TEST_CASE("realized transmit power matches the planned budget") {
  const SystemConfig c = make_config(3, 3, 1e4, 0.5);
  CompensatedSum realized;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization real = sample_channel(c, kKey.with_counter(t));
    const SlotPrecoders slot = build_kmat_slot(c, 1, real.h_hat, kKey.with_stream(1).with_counter(t));
    auto rng = kKey.with_stream(2).with_counter(t).make_rng();
    const SlotObservation obs = transmit_slot(real.h, slot, rng, false, true);
    realized.add((slot.a_low * obs.s_low + slot.a_high * obs.s_high + slot.u_zf * obs.s_zf)
                     .squaredNorm());
  }
  const double planned = 1e4;  // budgets sum exactly to P in this regime
  CHECK(realized.value() / trials == doctest::Approx(planned).epsilon(0.1));
}

TEST_CASE("noise-free decode is exact for K up to 5") {
  for (int k = 2; k <= 5; ++k) {
    const SystemConfig c = make_config(k, k, 1e4, 0.4);
    for (int j = 1; j <= k - 1; ++j) {
      for (int t = 0; t < 20; ++t) {
        const ChannelRealization real = sample_channel(c, kKey.with_counter(17 * k + t));
        const SlotPrecoders slot =
            build_kmat_slot(c, j, real.h_hat, kKey.with_stream(j).with_counter(t));
        auto rng = kKey.with_stream(99).with_counter(t).make_rng();
        const SlotObservation obs = transmit_slot(real.h, slot, rng, false, false);
        for (int rx = 0; rx < k; ++rx) {
          const auto genie = make_genie(real.h, slot, obs, rx, nullptr);
          const DecodeResult dec = decode_order_j(real.h, slot, obs, rx, genie);
          CHECK_FALSE(dec.rank_failure);
          CHECK(dec.max_rel_error < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("stacked decode matrices stay invertible over many draws") {
  const SystemConfig c = make_config(3, 3, 1e4, 0.5);
  int failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const ChannelRealization real = sample_channel(c, kKey.with_stream(7).with_counter(t));
    const SlotPrecoders slot =
        build_kmat_slot(c, 1, real.h_hat, kKey.with_stream(8).with_counter(t));
    ComplexMatrix g(3, 3);
    for (int i = 0; i < 3; ++i) g.row(i) = real.h.row(i) * slot.a_low;
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(g);
    qr.setThreshold(1e-12);
    if (qr.rank() < 3) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("exact subtraction leaves no group energy behind") {
  const SystemConfig c = make_config(3, 3, 1e4, 0.7);
  for (int t = 0; t < 50; ++t) {
    const ChannelRealization real = sample_channel(c, kKey.with_counter(t));
    const SlotPrecoders slot = build_kmat_slot(c, 1, real.h_hat, kKey.with_counter(t + 1));
    auto rng = kKey.with_stream(3).with_counter(t).make_rng();
    const SlotObservation obs = transmit_slot(real.h, slot, rng, false, true);
    const ZfDecodeSample zf =
        successive_zf_decode(real.h, slot, obs, 0, obs.s_low, obs.s_high);
    CHECK(zf.alt_leakage < 1e-9);
    // With noise off the residual is exactly the zero-forced layer.
    const Complex expect = (real.h.row(0) * (slot.u_zf * obs.s_zf))(0);
    const Complex got = zf.estimate * (real.h.row(0) * slot.u_zf.col(0))(0);
    CHECK(std::abs(got - expect) < 1e-9 * std::abs(expect));
  }
}

TEST_CASE("bit budgets and quantizer behavior") {
  CHECK(genie_bit_budget(1e3, 0.0) == 10);
  CHECK_THROWS_AS(genie_bit_budget(1e4, 1.0), std::domain_error);

  // Gaussian population with power ~ P^(1-alpha).
  auto rng = kKey.with_stream(40).make_rng();
  const double p = 1e3;
  std::vector<Complex> values;
  for (int i = 0; i < 20000; ++i) values.push_back(complex_gaussian(rng, p));
  const QuantizationReport report = quantize_equation(values, p, 0.0);
  CHECK(report.total_bits == 10);
  // Uniform-quantizer bound: per-dimension distortion <= step^2/4 plus
  // clipping; 4 * range^2 * 2^-10 is a generous envelope.
  const double range2 = 16.0 * (p / 2.0);
  CHECK(report.distortion <= 4.0 * range2 * std::pow(2.0, -10));
  CHECK(report.distortion > 0.0);

  // More bits at fixed P: distortion collapses to the clipping floor.
  std::vector<double> dist;
  for (int bits : {6, 10, 14, 18}) {
    const ComplexQuantizer q(std::sqrt(p / 2), std::sqrt(p / 2), bits);
    CompensatedSum d;
    for (const Complex& v : values) d.add(std::norm(v - q.quantize(v)));
    dist.push_back(d.value() / values.size());
  }
  CHECK(dist[1] < dist[0] / 8.0);
  CHECK(dist[2] < dist[1] / 8.0);
  // Clip floor: between 18 bits and "infinite" bits nothing changes much.
  CHECK(dist[3] >= 0.0);
}

TEST_CASE("quantized distortion stays flat in P") {
  const SystemConfig c = make_config(3, 3, 1e4, 0.5);
  const SlopeEstimate est =
      distortion_sweep(c, 1, {30, 40, 50, 60}, 400, kKey.with_stream(50));
  CHECK(std::abs(est.slope) < 0.1);
}

TEST_CASE("decode SINR slopes: quantized genie costs at most 0.05") {
  const std::vector<double> grid = {40, 50, 60, 70, 80};
  for (double alpha : {0.3, 0.5}) {
    const SystemConfig c = make_config(3, 3, 1e4, alpha);
    const RateSweep analog = decode_rate_sweep(c, 1, grid, 1000, kKey.with_stream(60), false, 0);
    const RateSweep quant = decode_rate_sweep(c, 1, grid, 1000, kKey.with_stream(60), true, 0);
    for (std::size_t s = 0; s < analog.alt_sinr_slopes.size(); ++s) {
      const double da = analog.alt_sinr_slopes[s].slope;
      const double dq = quant.alt_sinr_slopes[s].slope;
      CHECK(std::abs(da - (1.0 - alpha)) < 0.07);
      CHECK(da - dq <= 0.05 + 1e-9);
    }
  }
}

TEST_CASE("per-symbol rate slope tracks 1 - alpha at the reference point") {
  const SystemConfig c = make_config(3, 3, 1e4, 0.5);
  const RateSweep sweep =
      decode_rate_sweep(c, 1, {40, 50, 60, 70, 80}, 1500, kKey.with_stream(61), false, 0);
  for (const SlopeEstimate& est : sweep.alt_rate_slopes)
    CHECK(std::abs(est.slope - 0.5) < 0.07);
  CHECK(std::abs(sweep.zf_sinr_slope.slope - 0.5) < 0.07);
}

TEST_CASE("end-to-end walkthrough: exact recovery and ledger-consistent slots") {
  for (int n = 0; n <= 1; ++n) {
    const E2eReport report = altmat_e2e(n, kKey.with_stream(70 + n));
    CHECK(report.symbols_expected == 12 + 9 * n);
    CHECK(report.symbols_recovered == report.symbols_expected);
    CHECK(report.max_rel_error < 1e-8);
    CHECK(report.rank_failures == 0);
    CHECK(report.slots == 9 + 6 * n);
    CHECK(report.slots == report.ledger_slots);
    CHECK(report.all_messages_delivered);
  }
}
