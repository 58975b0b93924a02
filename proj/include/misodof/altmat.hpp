// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_ALTMAT_HPP
#define MISODOF_ALTMAT_HPP

#include <cstdint>
#include <vector>

#include "misodof/rational.hpp"

namespace misodof {

/// One order-j phase slot of the alternative alignment: transmits K-j+1
/// order-j symbols together with j+1 order-(K-j) symbols, and turns the
/// overheard interference into K-j order-(j+1) plus j order-(K-j+1) messages.
struct PhaseSpec {
  int k = 0;
  int j = 0;

  int low_in() const { return k - j + 1; }    // order-j inputs
  int high_in() const { return j + 1; }       // order-(K-j) inputs
  int gen_low() const { return k - j; }       // order-(j+1) outputs
  int gen_high() const { return j; }          // order-(K-j+1) outputs

  void validate() const;
};

/// Exact per-order message ledger. Counts are integers by construction; an
/// off-by-one in the schedule surfaces as a negative-stock error rather than
/// a silently wrong rational.
struct MessageInventory {
  int k = 0;
  std::vector<std::int64_t> pending;  // pending[j], j in 2..K; slots 0..1 unused
  std::int64_t order1_consumed = 0;
  std::int64_t slots = 0;

  explicit MessageInventory(int users) : k(users), pending(users + 1, 0) {}

  std::int64_t total_pending() const {
    std::int64_t sum = 0;
    for (int j = 2; j <= k; ++j) sum += pending[j];
    return sum;
  }
};

enum class Substitution {
  kNone,       // every input must come from pending stock
  kShortfall,  // missing stock is replaced by fresh order-1 symbols
  kAll         // all inputs are fresh order-1 symbols (initialization)
};

enum class StepKind { kInitPhase, kIterationPhase, kOrderKBroadcast, kTermination };

struct OrderCount {
  int order = 0;
  std::int64_t count = 0;
};

struct TraceStep {
  StepKind kind = StepKind::kIterationPhase;
  int iteration = 0;  // 0 = initialization, 1..n = main steps, n+1 = termination
  int j = 0;          // phase order, or broadcast order
  std::int64_t slots = 0;
  std::vector<OrderCount> consumed;
  std::vector<OrderCount> generated;
  std::int64_t substituted_order1 = 0;  // order-1 symbols standing in for stock
};

enum class ScheduleVariant { kGeneral, kK3Paper };

struct ScheduleTrace {
  int k = 0;
  int n = 0;
  ScheduleVariant variant = ScheduleVariant::kGeneral;
  int replication_multiplier = 0;  // the xK circular replication, DoF-neutral
  std::vector<TraceStep> steps;
  MessageInventory inventory{2};

  std::int64_t order1_delivered() const { return inventory.order1_consumed; }
  std::int64_t total_slots() const { return inventory.slots; }

  /// Recomputes (order-1 total, slot total, per-order generated - consumed)
  /// from the step records and checks them against the final inventory.
  bool reconciles() const;
};

/// One phase application; consumes stock (or order-1 substitutes per the
/// policy), generates the overheard messages, spends one slot. Appends the
/// step record when `step_out` is non-null.
void apply_order_phase(MessageInventory& inv, const PhaseSpec& spec, Substitution policy,
                       TraceStep* step_out = nullptr);

/// Broadcast delivery of `count` order-K messages, one slot each.
void broadcast_order_k(MessageInventory& inv, std::int64_t count, TraceStep* step_out = nullptr);

/// Executes initialization, n main iterations and termination for one user
/// permutation (the xK replication is reported as a multiplier only).
ScheduleTrace run_altmat(int k, int n, ScheduleVariant variant = ScheduleVariant::kGeneral);

/// Exact order-1 symbols delivered / slots used.
ExactRatio finite_n_dof(int k, int n, ScheduleVariant variant = ScheduleVariant::kGeneral);

struct Lemma1Row {
  int order = 0;
  std::int64_t generated = 0;
  std::int64_t consumed = 0;
  bool balanced = false;
};

struct Lemma1Report {
  int k = 0;
  int cycle_start = 0;   // first steady-state iteration measured
  int cycle_length = 0;  // 1 for odd K, 2 for even K
  std::vector<Lemma1Row> rows;
  bool all_balanced = false;
};

/// Per-order generated == consumed over one steady-state iteration (odd K)
/// or two-iteration cycle (even K), exact integers.
Lemma1Report check_lemma1(int k);

/// Sums the phase DoF identities symbolically (plus half the middle identity
/// when K is even) over unknowns x_j = 1 / DoF_j; after substituting
/// DoF_K = 1, everything must cancel to K x_1 = 1 + (K-1)/2. Returns the
/// resulting DoF_1 = 2K/(K+1); throws if the cancellation leaves a residual.
ExactRatio telescoped_dof1(int k);

}  // namespace misodof

#endif  // MISODOF_ALTMAT_HPP
