#include "rfso/numerics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rfso::numerics {
namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const auto p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> x,
                                           std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, x[0], hi0, lo0);
    mulhilo(kPhiloxM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ key[0], lo1, hi0 ^ x[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return x;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

void Rng::refill() {
  buf_ = philox4x64_10({ctr_lo_, ctr_hi_, stream_, 0}, {seed_, 0});
  if (++ctr_lo_ == 0) ++ctr_hi_;
  buf_pos_ = 0;
}

std::uint64_t Rng::next_u64() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double Rng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 on (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double sample_rice(Rng& rng, double omega, double psi) {
  if (!(psi > 0.0) || !std::isfinite(psi)) throw std::domain_error("sample_rice: psi must be > 0");
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw std::domain_error("sample_rice: omega must be >= 0");
  const double los = std::sqrt(psi * omega / (1.0 + omega));
  const double sigma = std::sqrt(psi / (2.0 * (1.0 + omega)));
  const double x = los + sigma * rng.next_normal();
  const double y = sigma * rng.next_normal();
  return std::hypot(x, y);
}

double sample_gamma(Rng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::domain_error("sample_gamma: shape must be > 0");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::domain_error("sample_gamma: scale must be > 0");
  if (shape < 1.0) {
    const double u = static_cast<double>((rng.next_u64() >> 11) + 1) * 0x1.0p-53;
    return sample_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = rng.next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double sample_gamma_gamma(Rng& rng, double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::domain_error("sample_gamma_gamma: alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::domain_error("sample_gamma_gamma: beta must be > 0");
  return sample_gamma(rng, alpha, 1.0 / alpha) * sample_gamma(rng, beta, 1.0 / beta);
}

double erf(double x) { return std::erf(x); }

const std::vector<QuadratureNode>& gauss_hermite_nodes(int order) {
  if (order < 1 || order > 256)
    throw std::domain_error("gauss_hermite_nodes: order must be in [1, 256]");
  static std::mutex mu;
  static std::map<int, std::vector<QuadratureNode>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Golub-Welsch on the symmetric Jacobi matrix of the (physicists')
  // Hermite recurrence: zero diagonal, off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  std::vector<QuadratureNode> nodes(order);
  for (int i = 0; i < order; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    nodes[i] = {eig.eigenvalues()(i), sqrt_pi * v0 * v0};
  }
  // Enforce the exact +/- symmetry of the rule.
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    const double t = 0.5 * (nodes[j].node - nodes[i].node);
    nodes[i].node = -t;
    nodes[j].node = t;
    const double w = 0.5 * (nodes[i].weight + nodes[j].weight);
    nodes[i].weight = w;
    nodes[j].weight = w;
  }
  if (order % 2 == 1) nodes[order / 2].node = 0.0;
  return cache.emplace(order, std::move(nodes)).first->second;
}

Eigen::VectorXd svd_singular_values(const ComplexMatrix& a) {
  if (!a.allFinite()) throw std::domain_error("svd_singular_values: non-finite entries");
  const Eigen::Index m = std::min(a.rows(), a.cols());
  ComplexMatrix gram;
  if (a.rows() >= a.cols())
    gram.noalias() = a.adjoint() * a;
  else
    gram.noalias() = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
  Eigen::VectorXd vals(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lam = eig.eigenvalues()(m - 1 - i);
    vals(i) = lam > 0.0 ? std::sqrt(lam) : 0.0;
  }
  return vals;
}

Eigen::VectorXd hermitian_gram_inverse_diag(const ComplexMatrix& a) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("hermitian_gram_inverse_diag: rows must be >= cols");
  if (!a.allFinite()) throw std::domain_error("hermitian_gram_inverse_diag: non-finite entries");
  const Eigen::Index k = a.cols();
  ComplexMatrix gram;
  gram.noalias() = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  const double lam_min = eig.eigenvalues()(0);
  const double lam_max = eig.eigenvalues()(k - 1);
  if (!(lam_min > 0.0) || lam_max / lam_min > 1e12)
    throw singular_matrix_error("hermitian_gram_inverse_diag: Gram matrix near-singular");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(k);
  for (Eigen::Index kk = 0; kk < k; ++kk)
    for (Eigen::Index j = 0; j < k; ++j)
      diag(kk) += std::norm(eig.eigenvectors()(kk, j)) / eig.eigenvalues()(j);
  return diag;
}

double log2_det_hermitian_psd(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw std::domain_error("log2_det_hermitian_psd: matrix not square");
  if (!a.allFinite()) throw std::domain_error("log2_det_hermitian_psd: non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::domain_error("log2_det_hermitian_psd: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a, Eigen::EigenvaluesOnly);
  const double lam_max = eig.eigenvalues()(a.rows() - 1);
  const double tol = 1e-9 * std::max(1.0, lam_max);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double lam = eig.eigenvalues()(i);
    if (lam < -tol) throw std::domain_error("log2_det_hermitian_psd: matrix not PSD");
    if (lam <= 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log2(lam);
  }
  return sum;
}

}  // namespace rfso::numerics
