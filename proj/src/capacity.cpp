#include "rfso/capacity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rfso::capacity {

Eigen::VectorXd zf_snrs(const numerics::ComplexMatrix& h1, const Eigen::VectorXd& power_w,
                        double sigma2_relay) {
  if (power_w.size() != h1.cols())
    throw std::invalid_argument("zf_snrs: one power entry per column required");
  if (!(sigma2_relay > 0.0)) throw std::invalid_argument("zf_snrs: sigma2 must be > 0");
  try {
    const Eigen::VectorXd inv_diag = numerics::hermitian_gram_inverse_diag(h1);
    Eigen::VectorXd snr(h1.cols());
    for (Eigen::Index k = 0; k < h1.cols(); ++k)
      snr(k) = power_w(k) / (sigma2_relay * inv_diag(k));
    return snr;
  } catch (const singular_matrix_error&) {
    return Eigen::VectorXd::Zero(h1.cols());
  }
}

double access_rate_fixed(const numerics::ComplexMatrix& h1, const channels::SystemParams& params,
                         const channels::LinkBudget& budget) {
  const int k = params.topology.users;
  Eigen::VectorXd power(k);
  for (int i = 0; i < k; ++i) power(i) = params.access.power_w[static_cast<std::size_t>(i)];
  const Eigen::VectorXd snr = zf_snrs(h1, power, budget.sigma2_relay);
  double rate = 0.0;
  for (int i = 0; i < k; ++i) {
    const double r = params.access.rate_bits[static_cast<std::size_t>(i)];
    if (snr(i) >= std::exp2(r) - 1.0) rate += r;
  }
  return rate;
}

double access_rate_adaptive(const numerics::ComplexMatrix& h1,
                            const channels::SystemParams& params,
                            const channels::LinkBudget& budget) {
  const int k = params.topology.users;
  const int j = params.topology.relay_antennas;
  numerics::ComplexMatrix scaled = h1;
  for (int col = 0; col < k; ++col)
    scaled.col(col) *=
        std::sqrt(params.access.power_w[static_cast<std::size_t>(col)] / budget.sigma2_relay);
  numerics::ComplexMatrix m = numerics::ComplexMatrix::Identity(j, j);
  m.noalias() += scaled * scaled.adjoint();
  return numerics::log2_det_hermitian_psd(m);
}

double waterfill_level(const Eigen::VectorXd& sing_vals, double sigma2, double total_power_w) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("waterfill_level: sigma2 must be > 0");
  if (!(total_power_w > 0.0)) throw std::invalid_argument("waterfill_level: power must be > 0");
  // Noise-to-gain floors of the usable modes, ascending.
  std::vector<double> floors;
  floors.reserve(static_cast<std::size_t>(sing_vals.size()));
  for (Eigen::Index i = 0; i < sing_vals.size(); ++i)
    if (sing_vals(i) > 0.0) floors.push_back(sigma2 / (sing_vals(i) * sing_vals(i)));
  if (floors.empty()) throw std::domain_error("waterfill_level: all singular values are zero");
  std::sort(floors.begin(), floors.end());

  double floor_sum = 0.0;
  for (std::size_t m = 0; m < floors.size(); ++m) {
    floor_sum += floors[m];
    const double mu = (total_power_w + floor_sum) / static_cast<double>(m + 1);
    if (m + 1 == floors.size() || mu <= floors[m + 1]) return mu;
  }
  return (total_power_w + floor_sum) / static_cast<double>(floors.size());
}

double backhaul_capacity(const numerics::ComplexMatrix& h2, const channels::SystemParams& params,
                         const channels::LinkBudget& budget) {
  const Eigen::VectorXd chi = numerics::svd_singular_values(h2);
  if (chi(0) <= 0.0) return 0.0;
  const double mu = waterfill_level(chi, budget.sigma2_dest, params.backhaul.power_w);
  double cap = 0.0;
  for (Eigen::Index i = 0; i < chi.size(); ++i) {
    if (chi(i) <= 0.0) continue;
    const double bits = std::log2(mu * chi(i) * chi(i) / budget.sigma2_dest);
    if (bits > 0.0) cap += bits;
  }
  return cap;
}

namespace {

// e^{x^2}·erfc(x) for x >= 0 without overflow.
double erfcx_pos(double x) {
  if (x < 13.0) return std::exp(x * x) * std::erfc(x);
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv2x2;
    sum += term;
  }
  return sum * std::numbers::inv_sqrtpi / x;
}

// sum_{n>=1} (-1)^{n+1} [erfcx((n-1/2)s) + erfcx((n+1/2)s)] / n, accelerated by
// repeated averaging of the partial sums (terms are completely monotone in n).
double ook_corner_series(double s) {
  constexpr int kTerms = 48;
  std::array<double, kTerms> avg{};
  double partial = 0.0;
  for (int n = 1; n <= kTerms; ++n) {
    const double b = (erfcx_pos((n - 0.5) * s) + erfcx_pos((n + 0.5) * s)) / n;
    partial += (n % 2 == 1) ? b : -b;
    avg[static_cast<std::size_t>(n - 1)] = partial;
  }
  for (int level = kTerms - 1; level > 0; --level)
    for (int i = 0; i < level; ++i)
      avg[static_cast<std::size_t>(i)] =
          0.5 * (avg[static_cast<std::size_t>(i)] + avg[static_cast<std::size_t>(i + 1)]);
  return avg[0];
}

}  // namespace

double ook_capacity(double p, double sigma2_fso, int quad_order) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::domain_error("ook_capacity: p must be >= 0");
  if (!(sigma2_fso > 0.0)) throw std::domain_error("ook_capacity: sigma2 must be > 0");
  const auto& nodes = numerics::gauss_hermite_nodes(quad_order);
  if (p == 0.0) return 0.0;
  const double s2 = p * p / (2.0 * sigma2_fso);
  if (s2 > 700.0) return 1.0;  // gap to 1 is below double precision here
  const double s = std::sqrt(s2);
  static const double sqrt_pi = std::sqrt(std::numbers::pi);

  if (s2 > 1.0) {
    // The integrand log(1 + e^a1 + e^a2 + e^{a1+a2}) factors into
    // softplus(a1) + softplus(a2) with a1,2 = ±2ts − s²; each softplus splits
    // into a linear ramp (a closed-form erfc integral) plus a soft corner of
    // width ~1/s at |t| = s/2. A fixed-order Hermite rule cannot resolve that
    // corner once s² is a few units, so this branch integrates it exactly:
    // substituting v = 2ts − s² turns the corner term into Gaussian-damped
    // exponentials whose integrals are erfcx values.
    const double bracket = s - 0.5 * s2 * sqrt_pi * erfcx_pos(0.5 * s) +
                           0.5 * sqrt_pi * ook_corner_series(s);
    const double cap = 1.0 - std::exp(-0.25 * s2) * bracket / (sqrt_pi * std::numbers::ln2);
    return std::clamp(cap, 0.0, 1.0);
  }

  double acc = 0.0;
  for (const auto& [t, w] : nodes) {
    const double a1 = 2.0 * t * s - s2;
    const double a2 = -2.0 * t * s - s2;
    const double a3 = -2.0 * s2;
    // log(1 + e^a1 + e^a2 + e^a3), shifted by the max exponent.
    const double m = std::max({0.0, a1, a2, a3});
    const double lse =
        m + std::log(std::exp(-m) + std::exp(a1 - m) + std::exp(a2 - m) + std::exp(a3 - m));
    acc += w * lse;
  }
  const double cap = 1.0 - acc / (2.0 * sqrt_pi * std::numbers::ln2);
  return std::clamp(cap, 0.0, 1.0);
}

RateTriple rates_for_block(const channels::ChannelRealization& ch,
                           const channels::SystemParams& params,
                           const channels::LinkBudget& budget, AccessMode mode) {
  RateTriple r;
  r.c1 = mode == AccessMode::FixedRateZF ? access_rate_fixed(ch.H1, params, budget)
                                         : access_rate_adaptive(ch.H1, params, budget);
  r.c2 = backhaul_capacity(ch.H2, params, budget);
  const double p = params.fso.responsivity * ch.g * params.fso.power_w;
  r.c_fso = ook_capacity(p, params.fso.noise_variance_a2, params.sim.quad_order);
  return r;
}

}  // namespace rfso::capacity
