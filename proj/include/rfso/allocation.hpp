#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "rfso/capacity.hpp"
#include "rfso/channels.hpp"

namespace rfso::allocation {

struct Policy {
  double lambda = 1.0;  // in (0, 1]
  capacity::AccessMode access_mode = capacity::AccessMode::FixedRateZF;
};

struct AverageRates {
  double c1_bar = 0.0;    // mean of q* . c1
  double c2_bar = 0.0;    // mean of (1 - q*) . c2
  double c_fso_bar = 0.0; // mean of c_fso
  std::int64_t samples_used = 0;
  double std_errs[3] = {0.0, 0.0, 0.0};
};

enum class BalanceCase {
  FsoSufficient,  // optical backhaul alone carries the access inflow
  Balanced,       // RF backhaul active, inflow/outflow balanced
};

struct UpperBoundResult {
  double lambda_star = 1.0;
  double tau_upp_per_block = 0.0;  // bits per block
  AverageRates averages;
  BalanceCase balance_case = BalanceCase::FsoSufficient;
  std::int64_t iterations = 0;
  double residual = 0.0;  // c1_bar - c2_bar - M*c_fso_bar at termination
};

// delta[i] = delta0 / (1 + i/decay). A NaN delta0 means "auto": scale the
// step to the rate magnitudes of the sample set.
struct StepSchedule {
  double delta0 = std::numeric_limits<double>::quiet_NaN();
  double decay = 100.0;
};

struct SolveOptions {
  StepSchedule step;
  double tol = 1e-3;
  std::int64_t max_iters = 400;
};

// Block-level time-sharing decision: 1 (access link active) iff
// lambda*c1 >= (1-lambda)*c2. Ties resolve to 1.
bool select_q(double lambda, double c1, double c2);

// Averages of (q*.c1, (1-q*).c2, c_fso) over an explicit sample set.
AverageRates average_rates_over(double lambda, std::span<const capacity::RateTriple> samples);

// Monte Carlo version of the above over freshly drawn channel blocks.
AverageRates estimate_average_rates(double lambda, const channels::SystemParams& params,
                                    const channels::LinkBudget& budget, capacity::AccessMode mode,
                                    numerics::Rng& rng, std::int64_t n_samples);

// Dual solve over a fixed sample set (common random numbers): the gate test
// for the FSO-sufficient case, otherwise a projected subgradient iteration
// on lambda. When the sample distribution is discrete the balance residual
// can be unreachable by iteration alone; the solver then locates the kink of
// the piecewise-linear dual and completes the tied mass fractionally, which
// reproduces the exact linear-program optimum.
UpperBoundResult solve_lambda_over(std::span<const capacity::RateTriple> samples, std::int64_t m,
                                   int n_symbols, const SolveOptions& options);

// Draws params.sim.samples blocks and solves on them. Sentinels in options
// (NaN delta0, tol <= 0, max_iters <= 0) fall back to params.sim settings,
// with delta0 defaulting to 0.5 / sum of the fixed user rates.
UpperBoundResult solve_lambda(const channels::SystemParams& params,
                              const channels::LinkBudget& budget, capacity::AccessMode mode,
                              numerics::Rng& rng, const StepSchedule& step = {},
                              double tol = -1.0, std::int64_t max_iters = -1);

// N * min(c1_bar, c2_bar + M * c_fso_bar).
double tau_upper_bound(const AverageRates& avg, const channels::LinkBudget& budget,
                       const channels::SystemParams& params);

}  // namespace rfso::allocation
