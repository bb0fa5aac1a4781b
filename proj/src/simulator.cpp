#include "rfso/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rfso::sim {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

// Accumulates one protocol's queue trajectory. The caller feeds one rate
// triple per block; rate masking (disabled hops) and the relay/access
// decision are applied here so every benchmark can share a rate stream.
class ProtocolEngine {
 public:
  ProtocolEngine(BenchmarkKind kind, double lambda, int n_symbols, std::int64_t m,
                 double access_fraction)
      : kind_(kind),
        lambda_(lambda),
        n_symbols_(n_symbols),
        m_(m),
        access_fraction_(access_fraction) {
    if (kind_ == BenchmarkKind::ConventionalRf &&
        !(access_fraction_ >= 0.0 && access_fraction_ <= 1.0)) {
      throw std::invalid_argument("access_fraction must lie in [0, 1]");
    }
  }

  void consume(capacity::RateTriple rates) {
    int q = 1;
    switch (kind_) {
      case BenchmarkKind::Proposed:
        q = allocation::select_q(lambda_, rates.c1, rates.c2);
        break;
      case BenchmarkKind::MixedRfFsoOnly:
        rates.c2 = 0.0;
        q = 1;
        break;
      case BenchmarkKind::ConventionalRf:
        rates.c_fso = 0.0;
        deficit_ += access_fraction_;
        if (deficit_ >= 1.0) {
          q = 1;
          deficit_ -= 1.0;
        } else {
          q = 0;
        }
        break;
    }
    const StepDeliveries dl = step_block(state_, rates, q, n_symbols_, m_);
    delivered_fso_ += dl.fso_bits;
    delivered_rf_ += dl.rf_bits;
    arrivals_ += q * static_cast<double>(n_symbols_) * rates.c1;
    access_blocks_ += q;
    ++blocks_;
  }

  SimResult finish() const {
    SimResult out;
    out.blocks = blocks_;
    out.delivered_fso_bits = delivered_fso_;
    out.delivered_rf_bits = delivered_rf_;
    out.blocks_access_active = access_blocks_;
    out.total_arrival_bits = arrivals_;
    out.tau_per_block =
        blocks_ > 0 ? (delivered_fso_ + delivered_rf_) / static_cast<double>(blocks_) : 0.0;
    // Bits still buffered once the final block's RF departure is removed.
    out.final_queue_bits =
        pos(state_.q_bits - (1 - state_.prev_q_decision) * static_cast<double>(n_symbols_) *
                                state_.prev_c2);
    return out;
  }

 private:
  BenchmarkKind kind_;
  double lambda_;
  int n_symbols_;
  std::int64_t m_;
  double access_fraction_;
  double deficit_ = 0.0;
  QueueState state_;
  double delivered_fso_ = 0.0;
  double delivered_rf_ = 0.0;
  double arrivals_ = 0.0;
  std::int64_t access_blocks_ = 0;
  std::int64_t blocks_ = 0;
};

}  // namespace

StepDeliveries step_block(QueueState& state, const capacity::RateTriple& rates, int q_decision,
                          int n_symbols, std::int64_t m) {
  if (q_decision != 0 && q_decision != 1) {
    throw std::invalid_argument("q_decision must be 0 or 1");
  }
  if (n_symbols <= 0) throw std::invalid_argument("n_symbols must be positive");
  if (m <= 0) throw std::invalid_argument("m must be positive");
  if (!(rates.c1 >= 0.0) || !(rates.c2 >= 0.0) || !(rates.c_fso >= 0.0) ||
      !std::isfinite(rates.c1) || !std::isfinite(rates.c2) || !std::isfinite(rates.c_fso)) {
    throw std::invalid_argument("rates must be finite and non-negative");
  }
  const double n = static_cast<double>(n_symbols);

  // Backlog left after the previous block's RF departure.
  const double carried = pos(state.q_bits - (1 - state.prev_q_decision) * n * state.prev_c2);

  StepDeliveries out;
  out.fso_bits = std::min(carried, static_cast<double>(m) * n * rates.c_fso);
  const double interim = carried - out.fso_bits;

  state.q_bits = interim + q_decision * n * rates.c1;
  out.rf_bits = std::min(state.q_bits, (1 - q_decision) * n * rates.c2);

  state.prev_q_decision = q_decision;
  state.prev_c2 = rates.c2;
  return out;
}

SimResult run_protocol(BenchmarkKind kind, const allocation::Policy& policy,
                       const channels::SystemParams& params, const channels::LinkBudget& budget,
                       capacity::AccessMode mode, numerics::Rng& rng, std::int64_t blocks) {
  if (blocks <= 0) throw std::invalid_argument("blocks must be positive");

  double access_fraction = std::numeric_limits<double>::quiet_NaN();
  if (kind == BenchmarkKind::ConventionalRf) {
    // Static split from a policy pre-pass: the throughput-optimal fraction of
    // access blocks equalises the two hops, rho = C2_bar / (C1_bar + C2_bar).
    double sum_c1 = 0.0;
    double sum_c2 = 0.0;
    const std::int64_t n = params.sim.samples;
    for (std::int64_t i = 0; i < n; ++i) {
      const capacity::RateTriple r =
          capacity::rates_for_block(channels::sample_block(params, budget, rng), params, budget, mode);
      sum_c1 += r.c1;
      sum_c2 += r.c2;
    }
    access_fraction = sum_c1 + sum_c2 > 0.0 ? sum_c2 / (sum_c1 + sum_c2) : 0.0;
  }

  ProtocolEngine engine(kind, policy.lambda, params.sim.symbols_per_block, budget.M,
                        access_fraction);
  for (std::int64_t b = 0; b < blocks; ++b) {
    engine.consume(
        capacity::rates_for_block(channels::sample_block(params, budget, rng), params, budget, mode));
  }
  return engine.finish();
}

BenchmarkSet run_benchmarks_shared(const allocation::Policy& policy,
                                   double conv_rf_access_fraction,
                                   const channels::SystemParams& params,
                                   const channels::LinkBudget& budget, capacity::AccessMode mode,
                                   numerics::Rng& rng, std::int64_t blocks) {
  if (blocks <= 0) throw std::invalid_argument("blocks must be positive");
  const int n = params.sim.symbols_per_block;
  ProtocolEngine proposed(BenchmarkKind::Proposed, policy.lambda, n, budget.M, 0.0);
  ProtocolEngine mixed(BenchmarkKind::MixedRfFsoOnly, policy.lambda, n, budget.M, 0.0);
  ProtocolEngine conv(BenchmarkKind::ConventionalRf, policy.lambda, n, budget.M,
                      conv_rf_access_fraction);
  for (std::int64_t b = 0; b < blocks; ++b) {
    const capacity::RateTriple rates =
        capacity::rates_for_block(channels::sample_block(params, budget, rng), params, budget, mode);
    proposed.consume(rates);
    mixed.consume(rates);
    conv.consume(rates);
  }
  BenchmarkSet out;
  out.proposed = proposed.finish();
  out.mixed = mixed.finish();
  out.conventional_rf = conv.finish();
  return out;
}

FlowCheckResult flow_conservation_check(const std::function<double()>& arrival_rate_fn,
                                        const std::function<double()>& departure_cap_fn,
                                        std::int64_t blocks) {
  if (blocks <= 0) throw std::invalid_argument("blocks must be positive");
  double queue = 0.0;
  double sum_dep = 0.0;
  double sum_arr = 0.0;
  double sum_cap = 0.0;
  for (std::int64_t b = 0; b < blocks; ++b) {
    const double a = arrival_rate_fn();
    const double d = departure_cap_fn();
    if (!(a >= 0.0) || !(d >= 0.0)) {
      throw std::invalid_argument("arrival and departure rates must be non-negative");
    }
    queue += a;
    const double dep = std::min(queue, d);
    queue -= dep;
    sum_dep += dep;
    sum_arr += a;
    sum_cap += d;
  }
  const double nb = static_cast<double>(blocks);
  FlowCheckResult out;
  out.avg_departure = sum_dep / nb;
  out.min_bound = std::min(sum_arr / nb, sum_cap / nb);
  return out;
}

}  // namespace rfso::sim
