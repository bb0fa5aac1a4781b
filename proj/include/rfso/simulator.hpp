#pragma once

#include <cstdint>
#include <functional>

#include "rfso/allocation.hpp"
#include "rfso/capacity.hpp"
#include "rfso/channels.hpp"

namespace rfso::sim {

// Relay buffer between blocks. q_bits is Q[b] (bits buffered after the
// block-b arrivals); the previous decision and backhaul rate are kept so the
// next step can remove what the RF hop drained at the end of block b.
struct QueueState {
  double q_bits = 0.0;
  int prev_q_decision = 1;
  double prev_c2 = 0.0;
};

struct StepDeliveries {
  double fso_bits = 0.0;
  double rf_bits = 0.0;
};

struct SimResult {
  double tau_per_block = 0.0;  // delivered bits per block
  double delivered_rf_bits = 0.0;
  double delivered_fso_bits = 0.0;
  std::int64_t blocks_access_active = 0;
  double final_queue_bits = 0.0;
  double total_arrival_bits = 0.0;
  std::int64_t blocks = 0;
};

enum class BenchmarkKind {
  Proposed,
  MixedRfFsoOnly,   // q = 1 every block, RF backhaul disabled
  ConventionalRf,   // FSO disabled, static access/backhaul block split
};

// One block of the buffer recursion. Order within the block: the FSO hop
// drains the backlog left after the previous block's RF departure, then the
// access arrivals land, then the RF hop serves the post-arrival queue.
StepDeliveries step_block(QueueState& state, const capacity::RateTriple& rates, int q_decision,
                          int n_symbols, std::int64_t m);

// Simulates B blocks of the chosen protocol from a cold start.
// ConventionalRf first estimates its static split from params.sim.samples
// policy draws (consumed from the same rng), then interleaves access blocks
// deterministically by accumulated deficit.
SimResult run_protocol(BenchmarkKind kind, const allocation::Policy& policy,
                       const channels::SystemParams& params, const channels::LinkBudget& budget,
                       capacity::AccessMode mode, numerics::Rng& rng, std::int64_t blocks);

struct BenchmarkSet {
  SimResult proposed;
  SimResult mixed;
  SimResult conventional_rf;
};

// Runs all three benchmarks against one shared rate stream (common random
// numbers), so protocol comparisons at a sweep point see identical channels.
// conv_rf_access_fraction is the static access-block share for the RF-only
// benchmark; callers usually derive it from policy-phase sample means.
BenchmarkSet run_benchmarks_shared(const allocation::Policy& policy,
                                   double conv_rf_access_fraction,
                                   const channels::SystemParams& params,
                                   const channels::LinkBudget& budget, capacity::AccessMode mode,
                                   numerics::Rng& rng, std::int64_t blocks);

struct FlowCheckResult {
  double avg_departure = 0.0;
  double min_bound = 0.0;  // min of the empirical arrival and demand means
};

// Scalar queue driven by arbitrary arrival and departure-demand processes;
// the long-run departure rate approaches min(E{a}, E{d}).
FlowCheckResult flow_conservation_check(const std::function<double()>& arrival_rate_fn,
                                        const std::function<double()>& departure_cap_fn,
                                        std::int64_t blocks);

}  // namespace rfso::sim
