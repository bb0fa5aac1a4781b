#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rfso/allocation.hpp"
#include "rfso/errors.hpp"

namespace {

using rfso::capacity::RateTriple;

// Equiprobable four-state discrete test distribution; one sample per state
// makes sample averages exact state expectations.
std::vector<RateTriple> four_state_span() {
  return {{8.0, 1.0, 0.10}, {6.0, 5.0, 0.30}, {2.0, 7.0, 0.05}, {4.0, 3.0, 0.20}};
}

std::vector<oracle::DiscreteState> four_state_oracle() {
  return {{8.0, 1.0, 0.25}, {6.0, 5.0, 0.25}, {2.0, 7.0, 0.25}, {4.0, 3.0, 0.25}};
}

std::vector<RateTriple> random_span(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u1(0.0, 10.0);
  std::uniform_real_distribution<double> u2(0.0, 8.0);
  std::uniform_real_distribution<double> uf(0.0, 1.0);
  std::vector<RateTriple> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back({u1(gen), u2(gen), uf(gen)});
  return out;
}

}  // namespace

TEST_CASE("time-share decision: orientation, ties, scaling, domain") {
  using rfso::allocation::select_q;

  CHECK(select_q(1.0, 0.0, 5.0));   // lambda = 1 always plays the access link
  CHECK(select_q(0.5, 3.0, 2.0));   // 1.5 >= 1.0
  CHECK_FALSE(select_q(0.2, 1.0, 1.0));
  CHECK(select_q(0.4, 3.0, 2.0));   // exact tie 1.2 = 1.2 resolves to 1

  // Exhaustive orientation grid against the definition.
  for (int li = 1; li <= 10; ++li) {
    const double lambda = li / 10.0;
    for (const double c1 : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      for (const double c2 : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(select_q(lambda, c1, c2) == (lambda * c1 >= (1.0 - lambda) * c2));
        // Joint rate scaling never changes the decision.
        CHECK(select_q(lambda, 7.0 * c1, 7.0 * c2) == select_q(lambda, c1, c2));
      }
    }
  }

  CHECK_THROWS_AS(select_q(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(select_q(-0.1, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(select_q(1.1, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(select_q(std::nan(""), 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(select_q(0.5, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(select_q(0.5, 1.0, std::nan("")), std::domain_error);
}

TEST_CASE("masked averages over a sample set") {
  using rfso::allocation::average_rates_over;

  // lambda = 1: every block goes to the access link.
  {
    std::mt19937_64 gen(51);
    const auto span = random_span(gen, 500);
    const auto avg = average_rates_over(1.0, span);
    double sum1 = 0.0, sumf = 0.0;
    for (const auto& s : span) {
      sum1 += s.c1;
      sumf += s.c_fso;
    }
    CHECK(avg.c2_bar == 0.0);
    CHECK(avg.c1_bar == doctest::Approx(sum1 / 500.0).epsilon(1e-12));
    CHECK(avg.c_fso_bar == doctest::Approx(sumf / 500.0).epsilon(1e-12));
    CHECK(avg.samples_used == 500);
    for (const double se : avg.std_errs) CHECK(se >= 0.0);
  }

  // Constant span: averages equal the per-block values of the active side.
  {
    const std::vector<RateTriple> span(10, RateTriple{4.0, 6.0, 0.3});
    const auto on = average_rates_over(0.9, span);   // 3.6 >= 0.6
    CHECK(on.c1_bar == 4.0);
    CHECK(on.c2_bar == 0.0);
    const auto off = average_rates_over(0.1, span);  // 0.4 < 5.4
    CHECK(off.c1_bar == 0.0);
    CHECK(off.c2_bar == 6.0);
    CHECK(off.std_errs[0] == 0.0);  // constant sample, no spread
    CHECK(off.std_errs[1] == 0.0);
  }

  // Four-state set at lambda = 0.3: only the (8,1) state plays access.
  {
    const auto span = four_state_span();
    const auto avg = average_rates_over(0.3, span);
    CHECK(avg.c1_bar == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(avg.c2_bar == doctest::Approx(3.75).epsilon(1e-12));
    CHECK(avg.c_fso_bar == doctest::Approx(0.1625).epsilon(1e-12));
  }

  // Randomized draws from the same four states: sample averages land within
  // a few reported standard errors of the exact expectations.
  {
    const auto states = four_state_span();
    std::mt19937_64 gen(52);
    std::uniform_int_distribution<std::size_t> pick(0, 3);
    std::vector<RateTriple> span;
    for (int i = 0; i < 20000; ++i) span.push_back(states[pick(gen)]);
    const auto avg = average_rates_over(0.3, span);
    CHECK(std::fabs(avg.c1_bar - 2.0) <= 4.0 * avg.std_errs[0]);
    CHECK(std::fabs(avg.c2_bar - 3.75) <= 4.0 * avg.std_errs[1]);
    CHECK(std::fabs(avg.c_fso_bar - 0.1625) <= 4.0 * avg.std_errs[2]);
    CHECK(avg.std_errs[0] > 0.0);
  }

  {
    const std::vector<RateTriple> empty;
    CHECK_THROWS_AS(average_rates_over(0.5, empty), std::invalid_argument);
    const auto span = four_state_span();
    CHECK_THROWS_AS(average_rates_over(0.0, span), std::domain_error);
    CHECK_THROWS_AS(average_rates_over(1.5, span), std::domain_error);
  }
}

TEST_CASE("masked averages: monotone coupling in lambda on a common set") {
  std::mt19937_64 gen(53);
  const auto span = random_span(gen, 2000);
  double prev1 = -1.0;
  double prev2 = 1e300;
  for (int i = 1; i <= 20; ++i) {
    const double lambda = i / 20.0;
    const auto avg = rfso::allocation::average_rates_over(lambda, span);
    CHECK(avg.c1_bar >= prev1 - 1e-12);  // access set grows with lambda
    CHECK(avg.c2_bar <= prev2 + 1e-12);
    prev1 = avg.c1_bar;
    prev2 = avg.c2_bar;
  }
}

TEST_CASE("throughput bound helper") {
  rfso::channels::SystemParams params;
  params.sim.symbols_per_block = 10;
  rfso::channels::LinkBudget budget;
  budget.M = 50;

  rfso::allocation::AverageRates avg;
  avg.c1_bar = 5.0;
  avg.c2_bar = 1.0;
  avg.c_fso_bar = 0.1;
  // min(5, 1 + 50*0.1) = 5
  CHECK(rfso::allocation::tau_upper_bound(avg, budget, params) ==
        doctest::Approx(50.0).epsilon(1e-12));
  avg.c_fso_bar = 0.05;
  // min(5, 3.5) = 3.5
  CHECK(rfso::allocation::tau_upper_bound(avg, budget, params) ==
        doctest::Approx(35.0).epsilon(1e-12));
}

TEST_CASE("dual solve: symmetric constant channels balance at one half") {
  const std::vector<RateTriple> span(100, RateTriple{4.0, 4.0, 0.0});
  const auto r = rfso::allocation::solve_lambda_over(span, 1, 10, {});
  CHECK(r.balance_case == rfso::allocation::BalanceCase::Balanced);
  CHECK(r.lambda_star == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.averages.c1_bar == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.averages.c2_bar == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(r.residual) <= 1e-12);
  CHECK(r.tau_upp_per_block == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("dual solve: four-state distribution against grid and LP oracles") {
  const auto span = four_state_span();
  rfso::allocation::SolveOptions options;
  const auto r = rfso::allocation::solve_lambda_over(span, 3, 100, options);

  // Balance lives at the kink lambda = 5/11 with fractional completion
  // theta = 0.4875/2.75 of the tied state.
  CHECK(r.balance_case == rfso::allocation::BalanceCase::Balanced);
  CHECK(std::fabs(r.lambda_star - 5.0 / 11.0) < 1e-9);
  CHECK(r.averages.c1_bar == doctest::Approx(3.2659090909090907).epsilon(1e-12));
  CHECK(r.averages.c2_bar == doctest::Approx(2.7784090909090907).epsilon(1e-12));
  CHECK(r.averages.c_fso_bar == doctest::Approx(0.1625).epsilon(1e-12));
  CHECK(std::fabs(r.residual) <= 1e-12);
  CHECK(r.tau_upp_per_block == doctest::Approx(326.59090909090907).epsilon(1e-12));
  CHECK(r.iterations == options.max_iters);  // discrete jumps defeat the iteration

  // Independent dual-function grid search over lambda.
  const double fso_term = 3.0 * 0.1625;
  const double grid_lambda = oracle::dual_grid_argmin(four_state_oracle(), fso_term, 10000);
  CHECK(std::fabs(r.lambda_star - grid_lambda) < 1e-3);

  // Exact linear-program enumeration of the per-symbol optimum.
  const double lp = oracle::lp_enumeration_value(four_state_oracle(), fso_term);
  CHECK(std::fabs(r.tau_upp_per_block - 100.0 * lp) <= 1e-9);

  // Internal consistency with the bound helper.
  rfso::channels::SystemParams params;
  params.sim.symbols_per_block = 100;
  rfso::channels::LinkBudget budget;
  budget.M = 3;
  CHECK(r.tau_upp_per_block ==
        doctest::Approx(rfso::allocation::tau_upper_bound(r.averages, budget, params))
            .epsilon(1e-12));
}

TEST_CASE("dual solve: ample optical backhaul short-circuits to lambda = 1") {
  const std::vector<RateTriple> span(10, RateTriple{2.0, 0.1, 1.0});
  const auto r = rfso::allocation::solve_lambda_over(span, 3, 100, {});
  CHECK(r.balance_case == rfso::allocation::BalanceCase::FsoSufficient);
  CHECK(r.lambda_star == 1.0);
  CHECK(r.iterations == 0);
  CHECK(r.averages.c1_bar == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.averages.c2_bar == 0.0);
  CHECK(r.residual == doctest::Approx(-1.0).epsilon(1e-12));  // c1_bar - M*cfso_bar
  CHECK(r.tau_upp_per_block == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("dual solve: random spans satisfy the bound identity") {
  std::mt19937_64 gen(54);
  for (int trial = 0; trial < 10; ++trial) {
    const auto span = random_span(gen, 400);
    const auto r = rfso::allocation::solve_lambda_over(span, 5, 1000, {});
    const double expect =
        1000.0 * std::min(r.averages.c1_bar, r.averages.c2_bar + 5.0 * r.averages.c_fso_bar);
    CHECK(r.tau_upp_per_block == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.lambda_star > 0.0);
    CHECK(r.lambda_star <= 1.0);
    if (r.balance_case == rfso::allocation::BalanceCase::Balanced) {
      // Balanced solutions carry a small relative balance residual.
      CHECK(std::fabs(r.residual) <=
            1e-3 * (r.averages.c2_bar + 5.0 * r.averages.c_fso_bar) + 1e-9);
    }
  }
}

TEST_CASE("dual solve: degenerate sets raise diagnostics") {
  using rfso::allocation::solve_lambda_over;

  // Access rate with no backhaul at all: balance would need lambda = 0.
  {
    const std::vector<RateTriple> span(4, RateTriple{1.0, 0.0, 0.0});
    try {
      solve_lambda_over(span, 1, 10, {});
      FAIL("expected convergence_error");
    } catch (const rfso::convergence_error& e) {
      CHECK(e.residual() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::string(e.what()).find("lambda = 0") != std::string::npos);
    }
  }

  // All-zero rates cannot balance either.
  {
    const std::vector<RateTriple> span(4, RateTriple{0.0, 0.0, 0.0});
    // mean_c1 = 0 <= M*0 takes the FSO-sufficient gate with zero throughput.
    const auto r = solve_lambda_over(span, 1, 10, {});
    CHECK(r.tau_upp_per_block == 0.0);
    CHECK(r.balance_case == rfso::allocation::BalanceCase::FsoSufficient);
  }

  {
    const std::vector<RateTriple> empty;
    CHECK_THROWS_AS(solve_lambda_over(empty, 1, 10, {}), std::invalid_argument);
    const auto span = four_state_span();
    CHECK_THROWS_AS(solve_lambda_over(span, 0, 10, {}), std::invalid_argument);
    CHECK_THROWS_AS(solve_lambda_over(span, 1, 0, {}), std::invalid_argument);
  }
}

TEST_CASE("monte carlo estimate and solve on the physical channel") {
  rfso::channels::SystemParams params;
  params.sim.samples = 2000;
  const auto budget = rfso::channels::derive_link_budget(params);

  // lambda = 1 masks the backhaul exactly.
  {
    rfso::numerics::Rng rng(9, 0);
    const auto avg = rfso::allocation::estimate_average_rates(
        1.0, params, budget, rfso::capacity::AccessMode::FixedRateZF, rng, 500);
    CHECK(avg.c2_bar == 0.0);
    CHECK(avg.c1_bar > 0.0);
    CHECK(avg.c1_bar <= 40.0);
    CHECK(avg.samples_used == 500);
    CHECK_THROWS_AS(rfso::allocation::estimate_average_rates(
                        1.0, params, budget, rfso::capacity::AccessMode::FixedRateZF, rng, 0),
                    std::invalid_argument);
  }

  // Clear air at 1 km: the optical link alone covers the access inflow, so
  // the solver takes the gate case.
  {
    rfso::numerics::Rng rng(9, 1);
    const auto r = rfso::allocation::solve_lambda(
        params, budget, rfso::capacity::AccessMode::FixedRateZF, rng);
    CHECK(r.balance_case == rfso::allocation::BalanceCase::FsoSufficient);
    CHECK(r.lambda_star == 1.0);
    CHECK(r.iterations == 0);
    CHECK(r.averages.samples_used == params.sim.samples);
    CHECK(r.tau_upp_per_block ==
          doctest::Approx(params.sim.symbols_per_block * r.averages.c1_bar).epsilon(1e-12));
    // Determinism: same stream, same result.
    rfso::numerics::Rng rng2(9, 1);
    const auto r2 = rfso::allocation::solve_lambda(
        params, budget, rfso::capacity::AccessMode::FixedRateZF, rng2);
    CHECK(r2.lambda_star == r.lambda_star);
    CHECK(r2.tau_upp_per_block == r.tau_upp_per_block);
    CHECK(r2.averages.c1_bar == r.averages.c1_bar);
  }
}
