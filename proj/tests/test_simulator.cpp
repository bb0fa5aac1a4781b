#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "rfso/allocation.hpp"
#include "rfso/simulator.hpp"

namespace {

using rfso::capacity::RateTriple;
using rfso::sim::QueueState;
using rfso::sim::step_block;

}  // namespace

TEST_CASE("queue step: hand-checked block sequences") {
  // Cold start, access block: nothing leaves, arrivals are buffered.
  {
    QueueState st;
    const auto dl = step_block(st, {4.0, 3.0, 0.5}, 1, 10, 2);
    CHECK(dl.fso_bits == 0.0);
    CHECK(dl.rf_bits == 0.0);
    CHECK(st.q_bits == 40.0);
  }

  // Saturated buffer, relay block: FSO drains its cap, RF serves the rest.
  {
    QueueState st;
    st.q_bits = 1000.0;
    st.prev_q_decision = 1;
    st.prev_c2 = 0.0;
    const auto dl = step_block(st, {4.0, 3.0, 0.5}, 0, 10, 2);
    CHECK(dl.fso_bits == 10.0);   // min(1000, M*N*c_fso)
    CHECK(dl.rf_bits == 30.0);    // min(990, N*c2)
    CHECK(st.q_bits == 990.0);    // RF departure is removed next block
  }

  // Three-block trace with decisions 1,0,1 and constant rates (4, 3, 0.5),
  // N = 10, M = 2: deliveries (0,0), (10,30), (0,0); queue 40, 30, 40.
  {
    QueueState st;
    const int decisions[3] = {1, 0, 1};
    const double want_fso[3] = {0.0, 10.0, 0.0};
    const double want_rf[3] = {0.0, 30.0, 0.0};
    const double want_q[3] = {40.0, 30.0, 40.0};
    for (int b = 0; b < 3; ++b) {
      const auto dl = step_block(st, {4.0, 3.0, 0.5}, decisions[b], 10, 2);
      CHECK(dl.fso_bits == want_fso[b]);
      CHECK(dl.rf_bits == want_rf[b]);
      CHECK(st.q_bits == want_q[b]);
    }
    // Ledger: 2 access blocks of 40 bits in, 40 delivered, 40 still queued.
  }
}

TEST_CASE("queue step: argument validation") {
  QueueState st;
  const RateTriple r{1.0, 1.0, 0.1};
  CHECK_THROWS_AS(step_block(st, r, 2, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, r, -1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, r, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, r, 1, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, {-1.0, 1.0, 0.1}, 1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, {1.0, std::nan(""), 0.1}, 1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(step_block(st, {1.0, 1.0, -0.1}, 1, 10, 1), std::invalid_argument);
}

TEST_CASE("queue step: exact bit conservation over random trajectories") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u1(0.0, 12.0);
  std::uniform_real_distribution<double> u2(0.0, 6.0);
  std::uniform_real_distribution<double> uf(0.0, 1.0);
  std::bernoulli_distribution coin(0.6);

  const int n = 10;
  const std::int64_t m = 3;
  QueueState st;
  double arrivals = 0.0;
  double delivered = 0.0;
  int last_q = 1;
  double last_c2 = 0.0;
  for (int b = 0; b < 10000; ++b) {
    const RateTriple r{u1(gen), u2(gen), uf(gen)};
    const int q = coin(gen) ? 1 : 0;
    const double carried_before =
        std::max(0.0, st.q_bits - (1 - st.prev_q_decision) * n * st.prev_c2);
    const auto dl = step_block(st, r, q, n, m);
    // Causality: the FSO hop cannot deliver more than was buffered.
    CHECK(dl.fso_bits <= carried_before + 1e-9);
    CHECK(dl.fso_bits <= static_cast<double>(m) * n * r.c_fso + 1e-9);
    CHECK(st.q_bits >= 0.0);
    arrivals += q * static_cast<double>(n) * r.c1;
    delivered += dl.fso_bits + dl.rf_bits;
    last_q = q;
    last_c2 = r.c2;
  }
  const double final_queue = std::max(0.0, st.q_bits - (1 - last_q) * n * last_c2);
  CHECK(arrivals == doctest::Approx(delivered + final_queue).epsilon(1e-9));
}

TEST_CASE("flow check: deterministic and stochastic departure rates") {
  using rfso::sim::flow_conservation_check;

  // Arrival-limited: every block departs exactly the arrival.
  {
    const auto r = flow_conservation_check([] { return 2.0; }, [] { return 3.0; }, 1000);
    CHECK(r.avg_departure == 2.0);
    CHECK(r.min_bound == 2.0);
  }
  // Demand-limited: the queue grows, departures track the demand.
  {
    const auto r = flow_conservation_check([] { return 3.0; }, [] { return 2.0; }, 1000);
    CHECK(r.avg_departure == 2.0);
    CHECK(r.min_bound == 2.0);
  }
  // Stable stochastic load: long-run departure meets the flow bound.
  {
    std::mt19937_64 gen(62);
    std::uniform_real_distribution<double> ua(0.0, 2.0);
    std::uniform_real_distribution<double> ud(1.0, 3.0);
    const auto r = flow_conservation_check([&] { return ua(gen); }, [&] { return ud(gen); },
                                           200000);
    CHECK(std::fabs(r.avg_departure - r.min_bound) <= 0.01 * r.min_bound);
    CHECK(r.avg_departure <= r.min_bound + 1e-12);
  }
  {
    CHECK_THROWS_AS(flow_conservation_check([] { return -1.0; }, [] { return 1.0; }, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(flow_conservation_check([] { return 1.0; }, [] { return 1.0; }, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("protocol run: cold start, determinism, lambda-one equivalence") {
  rfso::channels::SystemParams params;
  params.sim.samples = 500;  // conventional-RF pre-pass draws
  const auto budget = rfso::channels::derive_link_budget(params);
  rfso::allocation::Policy policy;
  policy.lambda = 1.0;

  // One block from a cold start buffers everything and delivers nothing.
  {
    rfso::numerics::Rng rng(21, 0);
    const auto res = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                             budget, rfso::capacity::AccessMode::FixedRateZF, rng,
                                             1);
    CHECK(res.blocks == 1);
    CHECK(res.blocks_access_active == 1);
    CHECK(res.tau_per_block == 0.0);
    CHECK(res.total_arrival_bits > 0.0);
    CHECK(res.final_queue_bits == res.total_arrival_bits);
  }

  // Same stream, same result; different stream, different result.
  {
    rfso::numerics::Rng a(21, 1), b(21, 1), c(21, 2);
    const auto ra = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                            budget, rfso::capacity::AccessMode::FixedRateZF, a,
                                            200);
    const auto rb = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                            budget, rfso::capacity::AccessMode::FixedRateZF, b,
                                            200);
    const auto rc = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                            budget, rfso::capacity::AccessMode::FixedRateZF, c,
                                            200);
    CHECK(ra.tau_per_block == rb.tau_per_block);
    CHECK(ra.total_arrival_bits == rb.total_arrival_bits);
    CHECK(ra.final_queue_bits == rb.final_queue_bits);
    CHECK(ra.tau_per_block != rc.tau_per_block);
  }

  // With lambda = 1 the proposed protocol always plays the access link and
  // never uses the RF backhaul: identical to the mixed benchmark.
  {
    rfso::numerics::Rng a(21, 3), b(21, 3);
    const auto rp = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                            budget, rfso::capacity::AccessMode::FixedRateZF, a,
                                            500);
    const auto rm = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::MixedRfFsoOnly, policy,
                                            params, budget,
                                            rfso::capacity::AccessMode::FixedRateZF, b, 500);
    CHECK(rp.tau_per_block == rm.tau_per_block);
    CHECK(rp.delivered_rf_bits == 0.0);
    CHECK(rm.delivered_rf_bits == 0.0);
    CHECK(rp.delivered_fso_bits == rm.delivered_fso_bits);
    CHECK(rp.blocks_access_active == 500);
  }

  {
    rfso::numerics::Rng rng(21, 4);
    CHECK_THROWS_AS(rfso::sim::run_protocol(rfso::sim::BenchmarkKind::Proposed, policy, params,
                                            budget, rfso::capacity::AccessMode::FixedRateZF, rng,
                                            0),
                    std::invalid_argument);
  }
}

TEST_CASE("protocol run: throughput approaches the flow bound") {
  rfso::channels::SystemParams params;
  params.sim.samples = 2000;
  const auto budget = rfso::channels::derive_link_budget(params);
  rfso::allocation::Policy policy;
  policy.lambda = 1.0;
  const auto mode = rfso::capacity::AccessMode::FixedRateZF;

  // Clear air at 1 km: the optical hop dwarfs the access hop, so the mixed
  // protocol delivers the mean access rate.
  rfso::numerics::Rng rate_rng(22, 0);
  const auto avg = rfso::allocation::estimate_average_rates(1.0, params, budget, mode, rate_rng,
                                                            20000);
  const double flow_mixed =
      std::min(avg.c1_bar, static_cast<double>(budget.M) * avg.c_fso_bar);

  rfso::numerics::Rng sim_rng(22, 1);
  const auto mixed = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::MixedRfFsoOnly, policy,
                                             params, budget, mode, sim_rng, 20000);
  const double tau_rate = mixed.tau_per_block / params.sim.symbols_per_block;
  CHECK(std::fabs(tau_rate - flow_mixed) <= 0.02 * flow_mixed);

  // Conventional RF: static split rho = C2/(C1+C2) bounds the per-symbol
  // rate by C1*C2/(C1+C2); the simulation sits near but never above it.
  rfso::numerics::Rng conv_rng(22, 2);
  const auto conv = rfso::sim::run_protocol(rfso::sim::BenchmarkKind::ConventionalRf, policy,
                                            params, budget, mode, conv_rng, 20000);
  rfso::numerics::Rng chk_rng(22, 3);
  const auto raw = rfso::allocation::estimate_average_rates(1.0, params, budget, mode, chk_rng,
                                                            20000);
  // Unconditioned means: at lambda = 1 c1_bar is the plain access mean; the
  // backhaul mean needs its own pass with the mask flipped.
  double c2_mean = 0.0;
  {
    rfso::numerics::Rng r2(22, 3);
    rfso::channels::SystemParams p2 = params;
    const auto b2 = budget;
    for (int i = 0; i < 20000; ++i) {
      const auto ch = rfso::channels::sample_block(p2, b2, r2);
      c2_mean += rfso::capacity::backhaul_capacity(ch.H2, p2, b2);
    }
    c2_mean /= 20000.0;
  }
  const double conv_bound = raw.c1_bar * c2_mean / (raw.c1_bar + c2_mean);
  const double conv_rate = conv.tau_per_block / params.sim.symbols_per_block;
  CHECK(conv_rate <= conv_bound * 1.02);
  CHECK(conv_rate >= conv_bound * 0.80);
  CHECK(conv.delivered_fso_bits == 0.0);
}

TEST_CASE("shared-stream benchmarks: equivalences and the static split") {
  rfso::channels::SystemParams params;
  params.sim.samples = 500;
  const auto budget = rfso::channels::derive_link_budget(params);
  rfso::allocation::Policy policy;
  policy.lambda = 1.0;
  const auto mode = rfso::capacity::AccessMode::FixedRateZF;

  // lambda = 1: proposed and mixed see the same stream and act identically.
  {
    rfso::numerics::Rng rng(23, 0);
    const auto set = rfso::sim::run_benchmarks_shared(policy, 0.5, params, budget, mode, rng,
                                                      3000);
    CHECK(set.proposed.tau_per_block == set.mixed.tau_per_block);
    CHECK(set.proposed.delivered_fso_bits == set.mixed.delivered_fso_bits);
    CHECK(set.proposed.delivered_rf_bits == 0.0);
    CHECK(set.proposed.total_arrival_bits == set.mixed.total_arrival_bits);
    CHECK(set.proposed.final_queue_bits == set.mixed.final_queue_bits);
    CHECK(set.conventional_rf.delivered_fso_bits == 0.0);
  }

  // Deficit interleaving hits the requested access share within one block.
  {
    for (const double rho : {0.0, 0.25, 1.0 / 3.0, 0.5, 0.777, 1.0}) {
      rfso::numerics::Rng rng(23, 1);
      const auto set = rfso::sim::run_benchmarks_shared(policy, rho, params, budget, mode, rng,
                                                        1000);
      CHECK(std::fabs(static_cast<double>(set.conventional_rf.blocks_access_active) -
                      rho * 1000.0) <= 1.0);
    }
  }

  // Determinism across repeated runs.
  {
    rfso::numerics::Rng a(23, 2), b(23, 2);
    const auto s1 = rfso::sim::run_benchmarks_shared(policy, 0.3, params, budget, mode, a, 500);
    const auto s2 = rfso::sim::run_benchmarks_shared(policy, 0.3, params, budget, mode, b, 500);
    CHECK(s1.proposed.tau_per_block == s2.proposed.tau_per_block);
    CHECK(s1.mixed.tau_per_block == s2.mixed.tau_per_block);
    CHECK(s1.conventional_rf.tau_per_block == s2.conventional_rf.tau_per_block);
  }

  {
    rfso::numerics::Rng rng(23, 3);
    CHECK_THROWS_AS(
        rfso::sim::run_benchmarks_shared(policy, 1.5, params, budget, mode, rng, 100),
        std::invalid_argument);
    CHECK_THROWS_AS(
        rfso::sim::run_benchmarks_shared(policy, std::nan(""), params, budget, mode, rng, 100),
        std::invalid_argument);
    CHECK_THROWS_AS(rfso::sim::run_benchmarks_shared(policy, 0.5, params, budget, mode, rng, 0),
                    std::invalid_argument);
  }
}
