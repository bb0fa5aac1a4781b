#include "rfso/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rfso::allocation {
namespace {

// Decision rule without the public-domain check, so the subgradient
// iteration may evaluate the clamped boundary lambda = 0.
inline bool raw_q(double lambda, double c1, double c2) {
  return lambda * c1 >= (1.0 - lambda) * c2;
}

struct BinaryAverages {
  double c1_bar;
  double c2_bar;
};

BinaryAverages averages_at(double lambda, std::span<const capacity::RateTriple> samples) {
  double a1 = 0.0, a2 = 0.0;
  for (const auto& s : samples) {
    if (raw_q(lambda, s.c1, s.c2))
      a1 += s.c1;
    else
      a2 += s.c2;
  }
  const auto n = static_cast<double>(samples.size());
  return {a1 / n, a2 / n};
}

void fill_std_errs(double lambda, std::span<const capacity::RateTriple> samples,
                   AverageRates& avg) {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (const auto& s : samples) {
    const bool q = raw_q(lambda, s.c1, s.c2);
    const double v1 = (q ? s.c1 : 0.0) - avg.c1_bar;
    const double v2 = (q ? 0.0 : s.c2) - avg.c2_bar;
    const double v3 = s.c_fso - avg.c_fso_bar;
    s1 += v1 * v1;
    s2 += v2 * v2;
    s3 += v3 * v3;
  }
  const auto n = static_cast<double>(samples.size());
  avg.std_errs[0] = std::sqrt(s1 / n / n);
  avg.std_errs[1] = std::sqrt(s2 / n / n);
  avg.std_errs[2] = std::sqrt(s3 / n / n);
}

// Exact dual kink: the subgradient is a nondecreasing step function of
// lambda with jumps at b_i = c2_i/(c1_i + c2_i). Find the first breakpoint
// where it turns nonnegative and split the tied mass so the balance holds
// exactly on the sample set.
UpperBoundResult resolve_at_kink(std::span<const capacity::RateTriple> samples, std::int64_t m,
                                 int n_symbols, double mean_cfso, std::int64_t iterations) {
  struct Point {
    double b, c1, c2;
  };
  std::vector<Point> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples)
    if (s.c1 + s.c2 > 0.0) pts.push_back({s.c2 / (s.c1 + s.c2), s.c1, s.c2});
  const auto n = static_cast<double>(samples.size());
  const double m_cfso = static_cast<double>(m) * mean_cfso;
  if (pts.empty())
    throw convergence_error("solve_lambda: no balance point exists (all rates zero)", -m_cfso);
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.b < b.b; });

  double below_c1 = 0.0;  // sum of c1 over b_i < current value (q = 1 side)
  double above_c2 = std::accumulate(pts.begin(), pts.end(), 0.0,
                                    [](double acc, const Point& p) { return acc + p.c2; });
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    double tie_c1 = 0.0, tie_c2 = 0.0;
    while (j < pts.size() && pts[j].b == pts[i].b) {
      tie_c1 += pts[j].c1;
      tie_c2 += pts[j].c2;
      ++j;
    }
    const double g_below = (below_c1 - above_c2) / n - m_cfso;
    const double g_at = (below_c1 + tie_c1 - (above_c2 - tie_c2)) / n - m_cfso;
    if (g_at >= 0.0) {
      if (pts[i].b <= 0.0)
        throw convergence_error("solve_lambda: balance point at lambda = 0", g_at);
      const double jump = (tie_c1 + tie_c2) / n;
      const double theta = jump > 0.0 ? std::clamp(-g_below / jump, 0.0, 1.0) : 0.0;
      UpperBoundResult r;
      r.lambda_star = pts[i].b;
      r.balance_case = BalanceCase::Balanced;
      r.iterations = iterations;
      r.averages.c1_bar = (below_c1 + theta * tie_c1) / n;
      r.averages.c2_bar = (above_c2 - tie_c2 + (1.0 - theta) * tie_c2) / n;
      r.averages.c_fso_bar = mean_cfso;
      r.averages.samples_used = static_cast<std::int64_t>(samples.size());
      fill_std_errs(r.lambda_star, samples, r.averages);
      r.residual = r.averages.c1_bar - r.averages.c2_bar - m_cfso;
      r.tau_upp_per_block =
          n_symbols * std::min(r.averages.c1_bar, r.averages.c2_bar + m_cfso);
      return r;
    }
    below_c1 += tie_c1;
    above_c2 -= tie_c2;
    i = j;
  }
  throw convergence_error("solve_lambda: subgradient never changes sign",
                          (below_c1 - above_c2) / n - m_cfso);
}

}  // namespace

bool select_q(double lambda, double c1, double c2) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::domain_error("select_q: lambda must be in (0, 1]");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
    throw std::domain_error("select_q: rates must be finite and >= 0");
  return raw_q(lambda, c1, c2);
}

AverageRates average_rates_over(double lambda, std::span<const capacity::RateTriple> samples) {
  if (samples.empty()) throw std::invalid_argument("average_rates_over: empty sample set");
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::domain_error("average_rates_over: lambda must be in (0, 1]");
  const auto [c1b, c2b] = averages_at(lambda, samples);
  AverageRates avg;
  avg.c1_bar = c1b;
  avg.c2_bar = c2b;
  avg.c_fso_bar =
      std::accumulate(samples.begin(), samples.end(), 0.0,
                      [](double acc, const capacity::RateTriple& s) { return acc + s.c_fso; }) /
      static_cast<double>(samples.size());
  avg.samples_used = static_cast<std::int64_t>(samples.size());
  fill_std_errs(lambda, samples, avg);
  return avg;
}

AverageRates estimate_average_rates(double lambda, const channels::SystemParams& params,
                                    const channels::LinkBudget& budget, capacity::AccessMode mode,
                                    numerics::Rng& rng, std::int64_t n_samples) {
  if (n_samples < 1) throw std::invalid_argument("estimate_average_rates: n_samples must be >= 1");
  std::vector<capacity::RateTriple> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (std::int64_t i = 0; i < n_samples; ++i)
    samples.push_back(
        capacity::rates_for_block(channels::sample_block(params, budget, rng), params, budget, mode));
  return average_rates_over(lambda, samples);
}

UpperBoundResult solve_lambda_over(std::span<const capacity::RateTriple> samples, std::int64_t m,
                                   int n_symbols, const SolveOptions& options) {
  if (samples.empty()) throw std::invalid_argument("solve_lambda_over: empty sample set");
  if (m < 1) throw std::invalid_argument("solve_lambda_over: M must be >= 1");
  if (n_symbols < 1) throw std::invalid_argument("solve_lambda_over: N must be >= 1");
  const auto n = static_cast<double>(samples.size());
  double mean_c1 = 0.0, mean_c2 = 0.0, mean_cfso = 0.0;
  for (const auto& s : samples) {
    mean_c1 += s.c1;
    mean_c2 += s.c2;
    mean_cfso += s.c_fso;
  }
  mean_c1 /= n;
  mean_c2 /= n;
  mean_cfso /= n;
  const double m_cfso = static_cast<double>(m) * mean_cfso;

  if (mean_c1 <= m_cfso) {
    UpperBoundResult r;
    r.lambda_star = 1.0;
    r.balance_case = BalanceCase::FsoSufficient;
    r.iterations = 0;
    r.averages.c1_bar = mean_c1;
    r.averages.c2_bar = 0.0;
    r.averages.c_fso_bar = mean_cfso;
    r.averages.samples_used = static_cast<std::int64_t>(samples.size());
    fill_std_errs(1.0, samples, r.averages);
    r.residual = mean_c1 - m_cfso;
    r.tau_upp_per_block = n_symbols * mean_c1;
    return r;
  }

  const double tol = options.tol;
  const double delta0 = std::isnan(options.step.delta0)
                            ? 0.5 / std::max(mean_c1 + mean_c2 + m_cfso, 1e-12)
                            : options.step.delta0;
  double lambda = 0.5;
  for (std::int64_t it = 0; it < options.max_iters; ++it) {
    const auto [c1b, c2b] = averages_at(lambda, samples);
    const double g = c1b - c2b - m_cfso;
    const double denom = c2b + m_cfso;
    if (std::abs(g) <= tol * denom && lambda > 0.0) {
      UpperBoundResult r;
      r.lambda_star = lambda;
      r.balance_case = BalanceCase::Balanced;
      r.iterations = it + 1;
      r.averages.c1_bar = c1b;
      r.averages.c2_bar = c2b;
      r.averages.c_fso_bar = mean_cfso;
      r.averages.samples_used = static_cast<std::int64_t>(samples.size());
      fill_std_errs(lambda, samples, r.averages);
      r.residual = g;
      r.tau_upp_per_block = n_symbols * std::min(c1b, denom);
      return r;
    }
    const double decay = options.step.decay > 0.0 ? options.step.decay : 100.0;
    const double delta = delta0 / (1.0 + static_cast<double>(it) / decay);
    lambda = std::clamp(lambda - delta * g, 0.0, 1.0);
  }
  return resolve_at_kink(samples, m, n_symbols, mean_cfso, options.max_iters);
}

UpperBoundResult solve_lambda(const channels::SystemParams& params,
                              const channels::LinkBudget& budget, capacity::AccessMode mode,
                              numerics::Rng& rng, const StepSchedule& step, double tol,
                              std::int64_t max_iters) {
  SolveOptions opt;
  opt.step = step;
  if (std::isnan(opt.step.delta0)) {
    const double rate_sum =
        std::accumulate(params.access.rate_bits.begin(), params.access.rate_bits.end(), 0.0);
    opt.step.delta0 = 0.5 / std::max(rate_sum, 1e-12);
  }
  opt.tol = tol > 0.0 ? tol : params.sim.solver_tol;
  opt.max_iters = max_iters > 0 ? max_iters : params.sim.solver_max_iters;

  std::vector<capacity::RateTriple> samples;
  samples.reserve(static_cast<std::size_t>(params.sim.samples));
  for (std::int64_t i = 0; i < params.sim.samples; ++i)
    samples.push_back(
        capacity::rates_for_block(channels::sample_block(params, budget, rng), params, budget, mode));
  return solve_lambda_over(samples, budget.M, params.sim.symbols_per_block, opt);
}

double tau_upper_bound(const AverageRates& avg, const channels::LinkBudget& budget,
                       const channels::SystemParams& params) {
  return params.sim.symbols_per_block *
         std::min(avg.c1_bar, avg.c2_bar + static_cast<double>(budget.M) * avg.c_fso_bar);
}

}  // namespace rfso::allocation
