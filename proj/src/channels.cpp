#include "rfso/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rfso::channels {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SystemParams: " + what);
}

bool pos(double v) { return std::isfinite(v) && v > 0.0; }

// Average power gain of an RF link: free-space reference at d_ref with
// dBi antenna gains, then power-law decay.
double rf_power_gain(double distance_m, double tx_dbi, double rx_dbi, const RfCommonParams& rf) {
  const double amp_gain = std::pow(10.0, (tx_dbi + rx_dbi) / 20.0);
  const double ref = rf.wavelength_m * amp_gain / (4.0 * std::numbers::pi * rf.reference_distance_m);
  return ref * ref * std::pow(rf.reference_distance_m / distance_m, rf.pathloss_exponent);
}

}  // namespace

void SystemParams::validate() const {
  require(topology.users >= 1, "users must be >= 1");
  require(topology.relay_antennas >= topology.users, "J >= K required");
  require(topology.dest_antennas >= 1, "dest_antennas must be >= 1");
  const auto k = static_cast<std::size_t>(topology.users);
  require(access.distance_m.size() == k, "access distance list must have one entry per user");
  require(access.power_w.size() == k, "access power list must have one entry per user");
  require(access.rate_bits.size() == k, "access rate list must have one entry per user");
  for (double d : access.distance_m) require(pos(d), "access distances must be > 0");
  for (double p : access.power_w) require(pos(p), "access powers must be > 0");
  for (double r : access.rate_bits) require(pos(r), "access rates must be > 0");
  require(std::isfinite(access.tx_gain_dbi) && std::isfinite(access.rx_gain_dbi),
          "access gains must be finite");
  require(std::isfinite(access.rice.omega) && access.rice.omega >= 0.0,
          "access Rice omega must be >= 0");
  require(pos(access.rice.psi), "access Rice psi must be > 0");
  require(pos(backhaul.distance_m), "backhaul distance must be > 0");
  require(pos(backhaul.power_w), "backhaul power must be > 0");
  require(std::isfinite(backhaul.tx_gain_dbi) && std::isfinite(backhaul.rx_gain_dbi),
          "backhaul gains must be finite");
  require(std::isfinite(backhaul.rice.omega) && backhaul.rice.omega >= 0.0,
          "backhaul Rice omega must be >= 0");
  require(pos(backhaul.rice.psi), "backhaul Rice psi must be > 0");
  require(pos(rf.wavelength_m), "RF wavelength must be > 0");
  require(pos(rf.bandwidth_hz), "RF bandwidth must be > 0");
  require(pos(rf.reference_distance_m), "reference distance must be > 0");
  require(pos(rf.pathloss_exponent), "pathloss exponent must be > 0");
  require(std::isfinite(rf.noise_density_dbm_per_mhz), "noise density must be finite");
  require(std::isfinite(rf.noise_figure_db), "noise figure must be finite");
  require(pos(fso.distance_m), "FSO distance must be > 0");
  require(pos(fso.power_w), "FSO power must be > 0");
  require(pos(fso.wavelength_m), "FSO wavelength must be > 0");
  require(pos(fso.bandwidth_hz), "FSO bandwidth must be > 0");
  require(pos(fso.responsivity), "responsivity must be > 0");
  require(pos(fso.noise_variance_a2), "FSO noise variance must be > 0");
  require(std::isfinite(fso.attenuation_db_per_m) && fso.attenuation_db_per_m >= 0.0,
          "attenuation must be >= 0");
  require(pos(fso.cn2), "cn2 must be > 0");
  require(pos(fso.divergence_rad), "divergence must be > 0");
  require(pos(fso.aperture_radius_m), "aperture radius must be > 0");
  require(fso.bandwidth_hz >= rf.bandwidth_hz, "FSO bandwidth must be >= RF bandwidth");
  require(sim.symbols_per_block >= 1, "symbols_per_block must be >= 1");
  require(sim.blocks >= 1, "blocks must be >= 1");
  require(sim.samples >= 1, "samples must be >= 1");
  require(sim.quad_order >= 1 && sim.quad_order <= 256, "quad_order must be in [1, 256]");
  require(pos(sim.solver_tol), "solver_tol must be > 0");
  require(sim.solver_max_iters >= 1, "solver_max_iters must be >= 1");
}

LinkBudget derive_link_budget(const SystemParams& params) {
  params.validate();
  LinkBudget b;

  const int k = params.topology.users;
  b.h_a_access.resize(k);
  for (int i = 0; i < k; ++i)
    b.h_a_access(i) = rf_power_gain(params.access.distance_m[static_cast<std::size_t>(i)],
                                    params.access.tx_gain_dbi, params.access.rx_gain_dbi,
                                    params.rf);
  b.h_a_backhaul = rf_power_gain(params.backhaul.distance_m, params.backhaul.tx_gain_dbi,
                                 params.backhaul.rx_gain_dbi, params.rf);

  const double noise_dbm = params.rf.noise_density_dbm_per_mhz +
                           10.0 * std::log10(params.rf.bandwidth_hz / 1e6) +
                           params.rf.noise_figure_db;
  b.sigma2_relay = std::pow(10.0, (noise_dbm - 30.0) / 10.0);
  b.sigma2_dest = b.sigma2_relay;

  const double d = params.fso.distance_m;
  const double r = params.fso.aperture_radius_m;
  const double collect =
      numerics::erf(std::sqrt(std::numbers::pi) * r /
                    (std::sqrt(2.0) * params.fso.divergence_rad * d));
  b.g_a = collect * collect * std::pow(10.0, -params.fso.attenuation_db_per_m * d / 10.0);

  // Spherical-wave scintillation parameters.
  const double wavenum = 2.0 * std::numbers::pi / params.fso.wavelength_m;
  const double rytov2 =
      0.5 * params.fso.cn2 * std::pow(wavenum, 7.0 / 6.0) * std::pow(d, 11.0 / 6.0);
  const double fresnel2 = wavenum * r * r / d;
  const double rytov125 = std::pow(rytov2, 6.0 / 5.0);
  b.alpha = 1.0 / std::expm1(0.49 * rytov2 /
                             std::pow(1.0 + 0.18 * fresnel2 + 0.56 * rytov125, 7.0 / 6.0));
  b.beta = 1.0 / std::expm1(0.51 * rytov2 * std::pow(1.0 + 0.69 * rytov125, -5.0 / 6.0) /
                            std::pow(1.0 + 0.9 * fresnel2 + 0.62 * fresnel2 * rytov125,
                                     5.0 / 6.0));
  if (!(b.alpha > 0.0) || !std::isfinite(b.alpha) || !(b.beta > 0.0) || !std::isfinite(b.beta))
    throw std::domain_error("derive_link_budget: scintillation parameters out of range");

  b.M = std::llround(params.fso.bandwidth_hz / params.rf.bandwidth_hz);
  b.p_scale = params.fso.responsivity * b.g_a * params.fso.power_w;
  return b;
}

ChannelRealization sample_block(const SystemParams& params, const LinkBudget& budget,
                                numerics::Rng& rng) {
  const int k = params.topology.users;
  const int j = params.topology.relay_antennas;
  const int l = params.topology.dest_antennas;
  ChannelRealization ch;
  ch.H1.resize(j, k);
  ch.H2.resize(l, j);

  for (int col = 0; col < k; ++col) {
    const double amp_scale = std::sqrt(budget.h_a_access(col));
    for (int row = 0; row < j; ++row) {
      const double mag =
          amp_scale * numerics::sample_rice(rng, params.access.rice.omega, params.access.rice.psi);
      const double phase = rng.next_uniform(-std::numbers::pi, std::numbers::pi);
      ch.H1(row, col) = std::polar(mag, phase);
    }
  }
  const double bh_scale = std::sqrt(budget.h_a_backhaul);
  for (int col = 0; col < j; ++col) {
    for (int row = 0; row < l; ++row) {
      const double mag = bh_scale * numerics::sample_rice(rng, params.backhaul.rice.omega,
                                                          params.backhaul.rice.psi);
      const double phase = rng.next_uniform(-std::numbers::pi, std::numbers::pi);
      ch.H2(row, col) = std::polar(mag, phase);
    }
  }
  ch.g = budget.g_a * numerics::sample_gamma_gamma(rng, budget.alpha, budget.beta);
  return ch;
}

}  // namespace rfso::channels
