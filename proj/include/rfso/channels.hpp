#pragma once

#include <cstdint>
#include <vector>

#include "rfso/numerics.hpp"

namespace rfso::channels {

struct RiceParams {
  double omega = 0.0;  // direct-to-scattered power ratio
  double psi = 1.0;    // total path power
};

struct TopologyParams {
  int users = 5;           // K
  int relay_antennas = 10; // J
  int dest_antennas = 10;  // L
};

// Uplink user -> relay RF links (one entry per user where vectors appear).
struct AccessParams {
  std::vector<double> distance_m = std::vector<double>(5, 400.0);
  std::vector<double> power_w = std::vector<double>(5, 0.2);
  std::vector<double> rate_bits = std::vector<double>(5, 8.0);
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 8.0;
  RiceParams rice{0.0, 1.0};
};

// Relay -> destination RF backhaul link.
struct BackhaulParams {
  double distance_m = 1000.0;
  double power_w = 2.0;
  double tx_gain_dbi = 10.0;
  double rx_gain_dbi = 15.0;
  RiceParams rice{4.0, 1.0};
};

struct RfCommonParams {
  double wavelength_m = 0.0857;
  double bandwidth_hz = 20e6;
  double reference_distance_m = 60.0;
  double pathloss_exponent = 3.5;
  double noise_density_dbm_per_mhz = -114.0;
  double noise_figure_db = 5.0;
};

// Relay -> destination optical link.
struct FsoParams {
  double distance_m = 1000.0;
  double power_w = 0.04;
  double wavelength_m = 1.55e-6;
  double bandwidth_hz = 1e9;
  double responsivity = 0.5;
  double noise_variance_a2 = 1e-14;
  double attenuation_db_per_m = 0.43e-3;
  double cn2 = 50e-15;  // refractive-index structure parameter, m^(-2/3)
  double divergence_rad = 2e-3;
  double aperture_radius_m = 0.1;
};

struct SimParams {
  int symbols_per_block = 10000;      // N
  std::int64_t blocks = 100000;       // B
  std::int64_t samples = 100000;      // Monte Carlo draws for expectations
  std::uint64_t seed = 1;
  int quad_order = 64;
  double solver_tol = 1e-3;
  std::int64_t solver_max_iters = 400;
};

struct SystemParams {
  TopologyParams topology;
  AccessParams access;
  BackhaulParams backhaul;
  RfCommonParams rf;
  FsoParams fso;
  SimParams sim;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Deterministic per-experiment quantities derived from SystemParams.
struct LinkBudget {
  Eigen::VectorXd h_a_access;  // per-user average access power gain
  double h_a_backhaul = 0.0;
  double g_a = 0.0;            // FSO geometric + atmospheric power gain
  double alpha = 0.0;          // scintillation shape parameters
  double beta = 0.0;
  double sigma2_relay = 0.0;   // RF noise power, W
  double sigma2_dest = 0.0;
  std::int64_t M = 0;          // FSO symbols per RF symbol
  double p_scale = 0.0;        // responsivity * g_a * P_fso, A
};

struct ChannelRealization {
  numerics::ComplexMatrix H1;  // J x K access matrix
  numerics::ComplexMatrix H2;  // L x J backhaul matrix
  double g = 0.0;              // FSO power gain for the block
};

LinkBudget derive_link_budget(const SystemParams& params);

// One i.i.d. fading block: Ricean entries (uniform phase) scaled by the
// average gains, and a Gamma-Gamma FSO gain.
ChannelRealization sample_block(const SystemParams& params, const LinkBudget& budget,
                                numerics::Rng& rng);

}  // namespace rfso::channels
