// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#include "misodof/altmat.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace misodof {

void PhaseSpec::validate() const {
  if (k < 2) throw std::invalid_argument("PhaseSpec: K >= 2 required");
  if (j < 1 || j > k - j)
    throw std::invalid_argument("PhaseSpec: 1 <= j <= K-j required (j = " + std::to_string(j) +
                                ", K = " + std::to_string(k) + ")");
}

bool ScheduleTrace::reconciles() const {
  std::int64_t order1 = 0;
  std::int64_t slot_sum = 0;
  std::map<int, std::int64_t> net;  // generated - consumed per order >= 2
  for (const TraceStep& step : steps) {
    slot_sum += step.slots;
    for (const OrderCount& oc : step.consumed) {
      if (oc.order == 1) {
        order1 += oc.count;
      } else {
        net[oc.order] -= oc.count;
      }
    }
    for (const OrderCount& oc : step.generated) net[oc.order] += oc.count;
  }
  if (order1 != inventory.order1_consumed || slot_sum != inventory.slots) return false;
  for (int j = 2; j <= k; ++j) {
    const auto it = net.find(j);
    const std::int64_t balance = it == net.end() ? 0 : it->second;
    if (balance != inventory.pending[j]) return false;
  }
  return true;
}

namespace {

// Draws `need` inputs of the given order, honoring the substitution policy.
// Returns the number actually taken from pending stock.
std::int64_t draw_stock(MessageInventory& inv, int order, std::int64_t need, Substitution policy,
                        TraceStep* step) {
  if (order == 1) {
    inv.order1_consumed += need;
    if (step != nullptr) step->consumed.push_back({1, need});
    return 0;
  }
  std::int64_t from_stock = 0;
  switch (policy) {
    case Substitution::kAll:
      from_stock = 0;
      break;
    case Substitution::kShortfall:
      from_stock = std::min(inv.pending[order], need);
      break;
    case Substitution::kNone:
      if (inv.pending[order] < need)
        throw std::runtime_error("ledger: insufficient order-" + std::to_string(order) +
                                 " stock: need " + std::to_string(need) + ", have " +
                                 std::to_string(inv.pending[order]) + " (shortfall " +
                                 std::to_string(need - inv.pending[order]) + ")");
      from_stock = need;
      break;
  }
  const std::int64_t substituted = need - from_stock;
  inv.pending[order] -= from_stock;
  if (step != nullptr) {
    if (from_stock > 0) step->consumed.push_back({order, from_stock});
    if (substituted > 0) {
      step->consumed.push_back({1, substituted});
      step->substituted_order1 += substituted;
    }
  }
  inv.order1_consumed += substituted;
  return from_stock;
}

}  // namespace

void apply_order_phase(MessageInventory& inv, const PhaseSpec& spec, Substitution policy,
                       TraceStep* step_out) {
  spec.validate();
  if (inv.k != spec.k) throw std::invalid_argument("apply_order_phase: K mismatch");
  TraceStep step;
  step.j = spec.j;
  step.slots = 1;
  draw_stock(inv, spec.j, spec.low_in(), policy, &step);
  draw_stock(inv, spec.k - spec.j, spec.high_in(), policy, &step);
  inv.pending[spec.j + 1] += spec.gen_low();
  step.generated.push_back({spec.j + 1, spec.gen_low()});
  if (spec.gen_high() > 0) {
    inv.pending[spec.k - spec.j + 1] += spec.gen_high();
    if (spec.k - spec.j + 1 == spec.j + 1) {
      step.generated.back().count += spec.gen_high();
    } else {
      step.generated.push_back({spec.k - spec.j + 1, spec.gen_high()});
    }
  }
  inv.slots += 1;
  if (step_out != nullptr) *step_out = step;
}

void broadcast_order_k(MessageInventory& inv, std::int64_t count, TraceStep* step_out) {
  if (count < 0) throw std::invalid_argument("broadcast_order_k: negative count");
  if (inv.pending[inv.k] < count)
    throw std::runtime_error("ledger: insufficient order-" + std::to_string(inv.k) +
                             " stock for broadcast: need " + std::to_string(count) + ", have " +
                             std::to_string(inv.pending[inv.k]));
  inv.pending[inv.k] -= count;
  inv.slots += count;
  if (step_out != nullptr) {
    step_out->kind = StepKind::kOrderKBroadcast;
    step_out->j = inv.k;
    step_out->slots = count;
    if (count > 0) step_out->consumed.push_back({inv.k, count});
  }
}

namespace {

class LedgerEngine {
 public:
  explicit LedgerEngine(int k) : k_(k), inv_(k) {
    if (k < 2) throw std::invalid_argument("run_altmat: K >= 2 required");
  }

  int phase_count() const { return k_ % 2 == 1 ? (k_ - 1) / 2 : k_ / 2 - 1; }

  void initialize(std::vector<TraceStep>& steps) {
    for (int j = 1; j <= phase_count(); ++j) {
      TraceStep step;
      apply_order_phase(inv_, {k_, j}, Substitution::kAll, &step);
      step.kind = StepKind::kInitPhase;
      step.iteration = 0;
      steps.push_back(std::move(step));
    }
    if (inv_.pending[k_] > 0) {
      TraceStep step;
      broadcast_order_k(inv_, 1, &step);
      step.iteration = 0;
      steps.push_back(std::move(step));
    }
  }

  // One main iteration: all order-j phases (the middle phase only every
  // second step when K is even), then the order-K broadcast.
  bool run_iteration(int m, std::vector<TraceStep>& steps) {
    bool substituted = false;
    for (int j = 1; j <= phase_count(); ++j) substituted |= run_phase(m, j, steps);
    if (k_ % 2 == 0 && m % 2 == 1) substituted |= run_phase(m, k_ / 2, steps);
    if (inv_.pending[k_] > 0) {
      TraceStep step;
      broadcast_order_k(inv_, 1, &step);
      step.iteration = m;
      steps.push_back(std::move(step));
    }
    return substituted;
  }

  void terminate(int n, std::vector<TraceStep>& steps) {
    for (int order = 2; order <= k_; ++order) {
      const std::int64_t count = inv_.pending[order];
      if (count == 0) continue;
      TraceStep step;
      step.kind = StepKind::kTermination;
      step.iteration = n + 1;
      step.j = order;
      step.slots = count;
      step.consumed.push_back({order, count});
      inv_.pending[order] = 0;
      inv_.slots += count;
      steps.push_back(std::move(step));
    }
    if (inv_.total_pending() != 0)
      throw std::logic_error("ledger: pending messages after termination");
  }

  const MessageInventory& inventory() const { return inv_; }

 private:
  bool run_phase(int m, int j, std::vector<TraceStep>& steps) {
    TraceStep step;
    apply_order_phase(inv_, {k_, j}, Substitution::kShortfall, &step);
    step.kind = StepKind::kIterationPhase;
    step.iteration = m;
    const bool substituted = step.substituted_order1 > 0;
    steps.push_back(std::move(step));
    return substituted;
  }

  int k_;
  MessageInventory inv_;
};

ScheduleTrace run_k3_paper(int n) {
  ScheduleTrace trace;
  trace.k = 3;
  trace.n = n;
  trace.variant = ScheduleVariant::kK3Paper;
  trace.replication_multiplier = 1;  // the K=3 walkthrough already rotates pairs
  MessageInventory inv(3);

  // Initialization: three pair slots, four order-1 symbols each, every slot
  // leaving two order-2 messages behind.
  for (int pair = 0; pair < 3; ++pair) {
    TraceStep step;
    step.kind = StepKind::kInitPhase;
    step.iteration = 0;
    step.j = 1;
    step.slots = 1;
    step.consumed.push_back({1, 4});
    step.generated.push_back({2, 2});
    inv.order1_consumed += 4;
    inv.pending[2] += 2;
    inv.slots += 1;
    trace.steps.push_back(std::move(step));
  }
  // Main iterations: three rotation slots (3 fresh order-1 + 2 pending
  // order-2 each) followed by three order-3 broadcasts.
  for (int m = 1; m <= n; ++m) {
    for (int rot = 0; rot < 3; ++rot) {
      TraceStep step;
      apply_order_phase(inv, {3, 1}, Substitution::kNone, &step);
      step.kind = StepKind::kIterationPhase;
      step.iteration = m;
      trace.steps.push_back(std::move(step));
    }
    TraceStep step;
    broadcast_order_k(inv, 3, &step);
    step.iteration = m;
    trace.steps.push_back(std::move(step));
  }
  // Termination: the six pending order-2 messages are simply broadcast.
  if (inv.pending[2] > 0) {
    TraceStep step;
    step.kind = StepKind::kTermination;
    step.iteration = n + 1;
    step.j = 2;
    step.slots = inv.pending[2];
    step.consumed.push_back({2, inv.pending[2]});
    inv.slots += inv.pending[2];
    inv.pending[2] = 0;
    trace.steps.push_back(std::move(step));
  }
  trace.inventory = inv;
  return trace;
}

}  // namespace

ScheduleTrace run_altmat(int k, int n, ScheduleVariant variant) {
  if (n < 0) throw std::invalid_argument("run_altmat: n >= 0 required");
  if (variant == ScheduleVariant::kK3Paper) {
    if (k != 3) throw std::invalid_argument("run_altmat: the K3 walkthrough variant needs K = 3");
    return run_k3_paper(n);
  }
  LedgerEngine engine(k);
  ScheduleTrace trace;
  trace.k = k;
  trace.n = n;
  trace.variant = variant;
  trace.replication_multiplier = k;
  engine.initialize(trace.steps);
  for (int m = 1; m <= n; ++m) engine.run_iteration(m, trace.steps);
  engine.terminate(n, trace.steps);
  trace.inventory = engine.inventory();
  return trace;
}

ExactRatio finite_n_dof(int k, int n, ScheduleVariant variant) {
  const ScheduleTrace trace = run_altmat(k, n, variant);
  if (trace.total_slots() == 0) return ExactRatio(0);
  return {BigInt(trace.order1_delivered()), BigInt(trace.total_slots())};
}

Lemma1Report check_lemma1(int k) {
  if (k < 3) throw std::invalid_argument("check_lemma1: K >= 3 required");
  const int cycle = k % 2 == 1 ? 1 : 2;
  const int horizon = 16 + cycle;

  LedgerEngine engine(k);
  std::vector<TraceStep> steps;
  engine.initialize(steps);

  std::vector<std::vector<std::int64_t>> state_before;
  std::vector<bool> substituted;
  std::vector<std::size_t> step_offset;
  for (int m = 1; m <= horizon; ++m) {
    state_before.push_back(engine.inventory().pending);
    step_offset.push_back(steps.size());
    substituted.push_back(engine.run_iteration(m, steps));
  }
  state_before.push_back(engine.inventory().pending);
  step_offset.push_back(steps.size());

  int start = -1;
  for (int w = 1; w + cycle <= horizon; ++w) {
    bool clean = true;
    for (int i = 0; i < cycle; ++i) clean &= !substituted[w - 1 + i];
    if (clean && state_before[w - 1] == state_before[w - 1 + cycle]) {
      start = w;
      break;
    }
  }
  if (start < 0) throw std::logic_error("check_lemma1: no steady-state cycle found");

  Lemma1Report report;
  report.k = k;
  report.cycle_start = start;
  report.cycle_length = cycle;
  std::map<int, std::int64_t> generated, consumed;
  for (std::size_t s = step_offset[start - 1]; s < step_offset[start - 1 + cycle]; ++s) {
    if (steps[s].kind != StepKind::kIterationPhase) continue;
    for (const OrderCount& oc : steps[s].consumed) consumed[oc.order] += oc.count;
    for (const OrderCount& oc : steps[s].generated) generated[oc.order] += oc.count;
  }
  report.all_balanced = true;
  for (int order = 2; order <= k - 1; ++order) {
    Lemma1Row row;
    row.order = order;
    row.generated = generated.count(order) ? generated[order] : 0;
    row.consumed = consumed.count(order) ? consumed[order] : 0;
    row.balanced = row.generated == row.consumed;
    report.all_balanced &= row.balanced;
    report.rows.push_back(row);
  }
  return report;
}

ExactRatio telescoped_dof1(int k) {
  if (k < 2) throw std::invalid_argument("telescoped_dof1: K >= 2 required");
  // coeff[j] multiplies x_j = 1/DoF_j; coeff[0] is the constant term of
  // (LHS - RHS) = 0 for each phase identity
  //   (j+1) x_{K-j} + (K-j+1) x_j - (K-j) x_{j+1} - j x_{K-j+1} - 1 = 0.
  std::vector<ExactRatio> sum(k + 1);
  const auto add_identity = [&](int j, const ExactRatio& weight) {
    sum[k - j] += weight * ExactRatio(j + 1);
    sum[j] += weight * ExactRatio(k - j + 1);
    sum[j + 1] -= weight * ExactRatio(k - j);
    sum[k - j + 1] -= weight * ExactRatio(j);
    sum[0] -= weight;
  };
  const int full_phases = k % 2 == 1 ? (k - 1) / 2 : k / 2 - 1;
  for (int j = 1; j <= full_phases; ++j) add_identity(j, ExactRatio(1));
  if (k % 2 == 0) add_identity(k / 2, ExactRatio(BigInt(1), BigInt(2)));

  // DoF_K = 1: fold the x_K coefficient into the constant.
  sum[0] += sum[k];
  sum[k] = ExactRatio(0);

  for (int j = 2; j <= k; ++j)
    if (!sum[j].is_zero())
      throw std::logic_error("telescoped_dof1: residual coefficient on x_" + std::to_string(j) +
                             ": " + sum[j].str());
  if (sum[1] != ExactRatio(k))
    throw std::logic_error("telescoped_dof1: x_1 coefficient " + sum[1].str() + ", expected " +
                           std::to_string(k));
  const ExactRatio expected_const = -(ExactRatio(1) + ExactRatio(BigInt(k - 1), BigInt(2)));
  if (sum[0] != expected_const)
    throw std::logic_error("telescoped_dof1: constant term " + sum[0].str() + ", expected " +
                           expected_const.str());
  // K x_1 = 1 + (K-1)/2  =>  DoF_1 = K / (1 + (K-1)/2) = 2K/(K+1).
  return ExactRatio(k) / (-sum[0]);
}

}  // namespace misodof
