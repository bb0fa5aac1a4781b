#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rfso/errors.hpp"

namespace rfso::numerics {

using ComplexMatrix = Eigen::MatrixXcd;

// Counter-based generator (Philox4x64-10). A (seed, stream) pair selects a
// disjoint slice of the counter space, so sub-streams never overlap and any
// stream can be recreated independently of draw order elsewhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double next_double();
  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi);
  // Standard normal via Box-Muller (second variate cached).
  double next_normal();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  // Fresh generator with the same seed on another stream.
  Rng substream(std::uint64_t stream) const noexcept { return Rng(seed_, stream); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t ctr_lo_ = 0;
  std::uint64_t ctr_hi_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Magnitude draw of a Ricean channel: omega is the direct-to-scattered power
// ratio, psi the total power (LOS amplitude^2 = omega*psi/(1+omega), scatter
// variance psi/(2(1+omega)) per complex dimension). omega = 0 is Rayleigh.
double sample_rice(Rng& rng, double omega, double psi);

// Gamma variate, shape/scale parameterization (Marsaglia-Tsang squeeze).
double sample_gamma(Rng& rng, double shape, double scale);

// Product of two independent unit-mean Gamma variates with shapes alpha and
// beta; mean 1, variance 1/alpha + 1/beta + 1/(alpha*beta).
double sample_gamma_gamma(Rng& rng, double alpha, double beta);

// Gauss error function.
double erf(double x);

struct QuadratureNode {
  double node;
  double weight;
};

// Gauss-Hermite rule for integrals weighted by exp(-t^2): sum w_i f(t_i)
// is exact for polynomials of degree <= 2*order - 1. order in [1, 256].
const std::vector<QuadratureNode>& gauss_hermite_nodes(int order);

// Singular values of A, descending. Computed from the Gram matrix of the
// smaller side, which is accurate for the well-scaled matrices used here
// and several times faster than a full SVD at these sizes.
Eigen::VectorXd svd_singular_values(const ComplexMatrix& a);

// Real diagonal of (A^H A)^{-1} for a full-column-rank A (rows >= cols).
// Throws singular_matrix_error when the Gram condition number exceeds 1e12.
Eigen::VectorXd hermitian_gram_inverse_diag(const ComplexMatrix& a);

// log2 |A| for Hermitian positive semidefinite A (eigenvalue sum in log
// space; -inf for a singular A). Eigenvalues below -1e-9 relative to the
// spectral radius, or non-Hermitian input, raise std::domain_error.
double log2_det_hermitian_psd(const ComplexMatrix& a);

}  // namespace rfso::numerics
