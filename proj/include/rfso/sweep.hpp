#pragma once

#include <string>
#include <vector>

#include "rfso/allocation.hpp"
#include "rfso/capacity.hpp"
#include "rfso/channels.hpp"
#include "rfso/simulator.hpp"

namespace rfso::sweep {

// One atmospheric condition. name is a label for the canonical echo and may
// be empty for points given as bare attenuation values.
struct WeatherPoint {
  double kappa_db_per_m = 0.0;
  double cn2 = 0.0;
  std::string name;
};

struct ExperimentConfig {
  channels::SystemParams base;
  std::vector<WeatherPoint> weather;
  std::vector<double> distances_m;
  std::vector<sim::BenchmarkKind> protocols;
  capacity::AccessMode mode = capacity::AccessMode::FixedRateZF;
  std::string output_path = "sweep.csv";
};

struct SweepRow {
  double kappa_db_per_m = 0.0;
  double cn2 = 0.0;
  double distance_m = 0.0;
  sim::BenchmarkKind protocol = sim::BenchmarkKind::Proposed;
  bool has_policy = false;  // lambda_star / balance_case only apply to Proposed
  double lambda_star = 0.0;
  allocation::BalanceCase balance_case = allocation::BalanceCase::FsoSufficient;
  double c1_bar = 0.0;
  double c2_bar = 0.0;
  double c_fso_bar = 0.0;
  double tau_upp_bits_per_block = 0.0;
  double tau_sim_bits_per_block = 0.0;
  double tau_norm_bits_per_sec = 0.0;
};

// The five named conditions with their (attenuation, C_n^2) pairs.
const std::vector<WeatherPoint>& named_weather_points();

// C_n^2 for a bare attenuation value: log-log interpolation across the named
// conditions, clamped at both ends. Exact hits return the tabulated value.
double interpolate_cn2(double kappa_db_per_m);

const char* protocol_name(sim::BenchmarkKind kind);
const char* balance_case_name(allocation::BalanceCase c);

ExperimentConfig default_config();

// Parses a JSON config document (empty text = all defaults). Sections:
// topology, rf, fso, sim, sweep. Unknown keys are rejected with their path;
// syntax errors report the line. Throws config_error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Deterministic full-precision serialization; parse(canonical_config_text(c))
// reproduces c and the text is a fixed point of parse-then-serialize.
std::string canonical_config_text(const ExperimentConfig& cfg);

// Full experiment: for every (weather, distance) derive the link budget,
// estimate average rates, solve the relay policy (when Proposed is
// requested), simulate all benchmarks over a common rate stream, and emit
// one row per requested protocol. Rows are sorted by (kappa, cn2, distance,
// protocol) so worker scheduling never changes the output.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct PolicySummary {
  allocation::UpperBoundResult result;
  double tau_norm_bits_per_sec = 0.0;
};

// Solves the relay policy at the base-config operating point only.
PolicySummary run_policy(const ExperimentConfig& cfg);

// Rate triple of a single seeded channel draw at the base operating point.
capacity::RateTriple capacity_probe(const ExperimentConfig& cfg);

std::string csv_string(const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace rfso::sweep
