#pragma once

#include "rfso/channels.hpp"
#include "rfso/numerics.hpp"

namespace rfso::capacity {

// Per-block rates: c1/c2 in bits per RF symbol, c_fso in bits per FSO symbol.
struct RateTriple {
  double c1 = 0.0;
  double c2 = 0.0;
  double c_fso = 0.0;
};

enum class AccessMode {
  FixedRateZF,    // fixed per-user rates behind a zero-forcing detector
  AdaptiveMacSum, // multiple-access sum capacity
};

// Post-detection SNR per user for zero-forcing separation,
// gamma_k = P_k / (sigma2 * [(H1^H H1)^{-1}]_kk). A near-singular Gram
// matrix is an outage: all SNRs zero.
Eigen::VectorXd zf_snrs(const numerics::ComplexMatrix& h1, const Eigen::VectorXd& power_w,
                        double sigma2_relay);

// Sum of the fixed per-user rates whose ZF SNR meets the decodability
// threshold 2^R - 1 (inclusive).
double access_rate_fixed(const numerics::ComplexMatrix& h1, const channels::SystemParams& params,
                         const channels::LinkBudget& budget);

// Multiple-access sum capacity log2|I + H1 diag(P) H1^H / sigma2|.
double access_rate_adaptive(const numerics::ComplexMatrix& h1,
                            const channels::SystemParams& params,
                            const channels::LinkBudget& budget);

// Water level mu with sum_j max(mu - sigma2/chi_j^2, 0) = P, by the sorted
// active-set closed form. Throws std::domain_error when all chi are zero.
double waterfill_level(const Eigen::VectorXd& sing_vals, double sigma2, double total_power_w);

// MIMO capacity of the backhaul with waterfilling over the singular modes.
double backhaul_capacity(const numerics::ComplexMatrix& h2, const channels::SystemParams& params,
                         const channels::LinkBudget& budget);

// Capacity of the binary-intensity Gaussian channel at received electrical
// amplitude p and noise variance sigma2. Low SNR uses Gauss-Hermite
// quadrature with the inner exponentials evaluated in log space; above
// p^2/(2 sigma2) = 1 the integral is evaluated in closed form (erfc series),
// which stays accurate where a fixed-order rule cannot resolve the integrand.
// Clamped to [0, 1].
double ook_capacity(double p, double sigma2_fso, int quad_order);

// All three per-block rates for one channel realization.
RateTriple rates_for_block(const channels::ChannelRealization& ch,
                           const channels::SystemParams& params,
                           const channels::LinkBudget& budget, AccessMode mode);

}  // namespace rfso::capacity
