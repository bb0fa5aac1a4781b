#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "rfso/errors.hpp"
#include "rfso/sweep.hpp"

namespace rfso::sweep {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw config_error(msg); }

// Typed accessors over one config section; every successful read is recorded
// so finish() can reject keys that matched nothing.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + ": expected an object");
  }

  double number(const std::string& key, double fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(path_ + "." + key + ": expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(path_ + "." + key + ": expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      fail(path_ + "." + key + ": expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(path_ + "." + key + ": expected a string");
    return v->get<std::string>();
  }

  // Scalar-or-array field broadcast to n entries.
  std::vector<double> number_list(const std::string& key, std::size_t n,
                                  const std::vector<double>& fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (v->is_number()) return std::vector<double>(n, v->get<double>());
    if (!v->is_array()) fail(path_ + "." + key + ": expected a number or an array of numbers");
    if (v->size() != n) {
      fail(path_ + "." + key + ": expected " + std::to_string(n) + " entries, got " +
           std::to_string(v->size()));
    }
    std::vector<double> out;
    out.reserve(n);
    for (const json& e : *v) {
      if (!e.is_number()) fail(path_ + "." + key + ": expected numeric entries");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json* raw(const std::string& key) { return take(key); }

  void finish() {
    for (const auto& item : j_.items()) {
      if (seen_.count(item.key()) == 0) fail("unknown key: " + path_ + "." + item.key());
    }
  }

 private:
  const json* take(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const WeatherPoint* find_named(const std::string& name) {
  for (const WeatherPoint& w : named_weather_points()) {
    if (w.name == name) return &w;
  }
  return nullptr;
}

// Attaches the tabulated label when a point coincides with a named condition.
std::string matched_name(double kappa, double cn2) {
  for (const WeatherPoint& w : named_weather_points()) {
    if (w.kappa_db_per_m == kappa && w.cn2 == cn2) return w.name;
  }
  return {};
}

std::vector<WeatherPoint> parse_weather(const json& arr, const std::string& path) {
  if (!arr.is_array()) fail(path + ": expected an array");
  if (arr.empty()) fail(path + " must be non-empty");
  std::vector<WeatherPoint> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& e = arr[i];
    const std::string epath = path + "[" + std::to_string(i) + "]";
    WeatherPoint w;
    if (e.is_string()) {
      const WeatherPoint* named = find_named(e.get<std::string>());
      if (named == nullptr) fail(epath + ": unknown weather name: " + e.get<std::string>());
      w = *named;
    } else if (e.is_number()) {
      w.kappa_db_per_m = e.get<double>();
      if (!(w.kappa_db_per_m > 0.0)) fail(epath + ": attenuation must be positive");
      w.cn2 = interpolate_cn2(w.kappa_db_per_m);
      w.name = matched_name(w.kappa_db_per_m, w.cn2);
    } else if (e.is_object()) {
      Section s(e, epath);
      const json* kv = s.raw("kappa_db_per_m");
      if (kv == nullptr) fail(epath + ": kappa_db_per_m is required");
      if (!kv->is_number()) fail(epath + ".kappa_db_per_m: expected a number");
      w.kappa_db_per_m = kv->get<double>();
      if (!(w.kappa_db_per_m > 0.0)) fail(epath + ": attenuation must be positive");
      w.cn2 = s.number("cn2", interpolate_cn2(w.kappa_db_per_m));
      if (!(w.cn2 > 0.0)) fail(epath + ": cn2 must be positive");
      w.name = s.text("name", matched_name(w.kappa_db_per_m, w.cn2));
      s.finish();
    } else {
      fail(epath + ": expected a weather name, an attenuation value, or an object");
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<double> parse_distances(const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.empty()) fail(path + ": expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const json& e : arr) {
    if (!e.is_number() || !(e.get<double>() > 0.0)) fail(path + ": distances must be positive");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<sim::BenchmarkKind> parse_protocols(const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.empty()) fail(path + ": expected a non-empty array of names");
  std::vector<sim::BenchmarkKind> out;
  for (const json& e : arr) {
    if (!e.is_string()) fail(path + ": expected protocol names");
    const std::string name = e.get<std::string>();
    sim::BenchmarkKind kind;
    if (name == protocol_name(sim::BenchmarkKind::Proposed)) {
      kind = sim::BenchmarkKind::Proposed;
    } else if (name == protocol_name(sim::BenchmarkKind::MixedRfFsoOnly)) {
      kind = sim::BenchmarkKind::MixedRfFsoOnly;
    } else if (name == protocol_name(sim::BenchmarkKind::ConventionalRf)) {
      kind = sim::BenchmarkKind::ConventionalRf;
    } else {
      fail(path + ": unknown protocol: " + name);
    }
    if (std::find(out.begin(), out.end(), kind) != out.end()) {
      fail(path + ": duplicate protocol: " + name);
    }
    out.push_back(kind);
  }
  return out;
}

capacity::AccessMode parse_access_mode(const std::string& name, const std::string& path) {
  if (name == "fixed_rate_zf") return capacity::AccessMode::FixedRateZF;
  if (name == "adaptive_mac_sum") return capacity::AccessMode::AdaptiveMacSum;
  fail(path + ": unknown access mode: " + name);
}

const char* access_mode_name(capacity::AccessMode mode) {
  return mode == capacity::AccessMode::FixedRateZF ? "fixed_rate_zf" : "adaptive_mac_sum";
}

}  // namespace

const std::vector<WeatherPoint>& named_weather_points() {
  static const std::vector<WeatherPoint> table = {
      {0.43e-3, 50e-15, "clear_air"},
      {4.2e-3, 17e-15, "haze"},
      {20e-3, 3e-15, "light_fog"},
      {42.2e-3, 2e-15, "moderate_fog"},
      {125e-3, 1e-15, "heavy_fog"},
  };
  return table;
}

double interpolate_cn2(double kappa_db_per_m) {
  if (!(kappa_db_per_m > 0.0)) throw std::domain_error("attenuation must be positive");
  const std::vector<WeatherPoint>& t = named_weather_points();
  if (kappa_db_per_m <= t.front().kappa_db_per_m) return t.front().cn2;
  if (kappa_db_per_m >= t.back().kappa_db_per_m) return t.back().cn2;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (kappa_db_per_m == t[i].kappa_db_per_m) return t[i].cn2;
    if (kappa_db_per_m < t[i + 1].kappa_db_per_m) {
      const double u = (std::log(kappa_db_per_m) - std::log(t[i].kappa_db_per_m)) /
                       (std::log(t[i + 1].kappa_db_per_m) - std::log(t[i].kappa_db_per_m));
      return std::exp((1.0 - u) * std::log(t[i].cn2) + u * std::log(t[i + 1].cn2));
    }
  }
  return t.back().cn2;
}

const char* protocol_name(sim::BenchmarkKind kind) {
  switch (kind) {
    case sim::BenchmarkKind::Proposed:
      return "proposed";
    case sim::BenchmarkKind::MixedRfFsoOnly:
      return "mixed_rf_fso";
    case sim::BenchmarkKind::ConventionalRf:
      return "conventional_rf";
  }
  return "?";
}

const char* balance_case_name(allocation::BalanceCase c) {
  return c == allocation::BalanceCase::FsoSufficient ? "fso_sufficient" : "balanced";
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.weather = named_weather_points();
  cfg.distances_m = {1000.0, 2000.0};
  cfg.protocols = {sim::BenchmarkKind::Proposed, sim::BenchmarkKind::MixedRfFsoOnly,
                   sim::BenchmarkKind::ConventionalRf};
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  std::string body = text;
  const auto first = body.find_first_not_of(" \t\r\n");
  body = first == std::string::npos ? std::string("{}") : body;

  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error& e) {
    fail(std::string("config syntax error: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be an object");

  static const std::set<std::string> sections = {"topology", "rf", "fso", "sim", "sweep"};
  for (const auto& item : root.items()) {
    if (sections.count(item.key()) == 0) fail("unknown key: " + item.key());
  }

  ExperimentConfig cfg = default_config();
  channels::SystemParams& p = cfg.base;

  if (root.contains("topology")) {
    Section s(root["topology"], "topology");
    p.topology.users = static_cast<int>(s.integer("users", p.topology.users));
    p.topology.relay_antennas =
        static_cast<int>(s.integer("relay_antennas", p.topology.relay_antennas));
    p.topology.dest_antennas =
        static_cast<int>(s.integer("dest_antennas", p.topology.dest_antennas));
    s.finish();
  }
  if (p.topology.users <= 0) fail("topology.users must be positive");
  const std::size_t k = static_cast<std::size_t>(p.topology.users);
  // Per-user defaults are uniform; re-broadcast them to the configured count
  // before any rf overrides are applied.
  p.access.distance_m.assign(k, p.access.distance_m.front());
  p.access.power_w.assign(k, p.access.power_w.front());
  p.access.rate_bits.assign(k, p.access.rate_bits.front());

  if (root.contains("rf")) {
    Section s(root["rf"], "rf");
    p.rf.wavelength_m = s.number("wavelength_m", p.rf.wavelength_m);
    p.rf.bandwidth_hz = s.number("bandwidth_hz", p.rf.bandwidth_hz);
    p.rf.reference_distance_m = s.number("reference_distance_m", p.rf.reference_distance_m);
    p.rf.pathloss_exponent = s.number("path_loss_exponent", p.rf.pathloss_exponent);
    p.rf.noise_density_dbm_per_mhz = s.number("noise_dbm_per_mhz", p.rf.noise_density_dbm_per_mhz);
    p.rf.noise_figure_db = s.number("noise_figure_db", p.rf.noise_figure_db);
    p.access.distance_m = s.number_list("access_distance_m", k, p.access.distance_m);
    p.access.power_w = s.number_list("access_power_w", k, p.access.power_w);
    p.access.rate_bits = s.number_list("access_rate_bits", k, p.access.rate_bits);
    p.access.tx_gain_dbi = s.number("access_tx_gain_dbi", p.access.tx_gain_dbi);
    p.access.rx_gain_dbi = s.number("access_rx_gain_dbi", p.access.rx_gain_dbi);
    p.access.rice.omega = s.number("access_rice_omega", p.access.rice.omega);
    p.access.rice.psi = s.number("access_rice_psi", p.access.rice.psi);
    p.backhaul.power_w = s.number("backhaul_power_w", p.backhaul.power_w);
    p.backhaul.tx_gain_dbi = s.number("backhaul_tx_gain_dbi", p.backhaul.tx_gain_dbi);
    p.backhaul.rx_gain_dbi = s.number("backhaul_rx_gain_dbi", p.backhaul.rx_gain_dbi);
    p.backhaul.rice.omega = s.number("backhaul_rice_omega", p.backhaul.rice.omega);
    p.backhaul.rice.psi = s.number("backhaul_rice_psi", p.backhaul.rice.psi);
    s.finish();
  }

  if (root.contains("fso")) {
    Section s(root["fso"], "fso");
    p.fso.distance_m = s.number("distance_m", p.fso.distance_m);
    p.fso.power_w = s.number("power_w", p.fso.power_w);
    p.fso.wavelength_m = s.number("wavelength_m", p.fso.wavelength_m);
    p.fso.bandwidth_hz = s.number("bandwidth_hz", p.fso.bandwidth_hz);
    p.fso.responsivity = s.number("responsivity", p.fso.responsivity);
    p.fso.noise_variance_a2 = s.number("noise_variance_a2", p.fso.noise_variance_a2);
    p.fso.attenuation_db_per_m = s.number("attenuation_db_per_m", p.fso.attenuation_db_per_m);
    p.fso.cn2 = s.number("cn2", p.fso.cn2);
    p.fso.divergence_rad = s.number("divergence_rad", p.fso.divergence_rad);
    p.fso.aperture_radius_m = s.number("aperture_radius_m", p.fso.aperture_radius_m);
    s.finish();
  }
  // The two backhaul hops span the same relay-destination distance.
  p.backhaul.distance_m = p.fso.distance_m;

  if (root.contains("sim")) {
    Section s(root["sim"], "sim");
    p.sim.symbols_per_block =
        static_cast<int>(s.integer("symbols_per_block", p.sim.symbols_per_block));
    p.sim.blocks = s.integer("blocks", p.sim.blocks);
    p.sim.samples = s.integer("samples", p.sim.samples);
    p.sim.seed = s.uinteger("seed", p.sim.seed);
    p.sim.quad_order = static_cast<int>(s.integer("quad_order", p.sim.quad_order));
    p.sim.solver_tol = s.number("solver_tol", p.sim.solver_tol);
    p.sim.solver_max_iters =
        static_cast<int>(s.integer("solver_max_iters", p.sim.solver_max_iters));
    cfg.mode = parse_access_mode(s.text("access_mode", access_mode_name(cfg.mode)), "sim.access_mode");
    s.finish();
  }

  if (root.contains("sweep")) {
    Section s(root["sweep"], "sweep");
    if (const json* w = s.raw("weather")) cfg.weather = parse_weather(*w, "sweep.weather");
    if (const json* d = s.raw("distances_m")) cfg.distances_m = parse_distances(*d, "sweep.distances_m");
    if (const json* pr = s.raw("protocols")) cfg.protocols = parse_protocols(*pr, "sweep.protocols");
    cfg.output_path = s.text("output", cfg.output_path);
    if (cfg.output_path.empty()) fail("sweep.output must be non-empty");
    s.finish();
  }

  try {
    cfg.base.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail("cannot read config file: " + path);
  return parse_config(buf.str());
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  const channels::SystemParams& p = cfg.base;
  ordered_json root;
  root["topology"] = {{"users", p.topology.users},
                      {"relay_antennas", p.topology.relay_antennas},
                      {"dest_antennas", p.topology.dest_antennas}};
  root["rf"] = {{"wavelength_m", p.rf.wavelength_m},
                {"bandwidth_hz", p.rf.bandwidth_hz},
                {"reference_distance_m", p.rf.reference_distance_m},
                {"path_loss_exponent", p.rf.pathloss_exponent},
                {"noise_dbm_per_mhz", p.rf.noise_density_dbm_per_mhz},
                {"noise_figure_db", p.rf.noise_figure_db},
                {"access_distance_m", p.access.distance_m},
                {"access_power_w", p.access.power_w},
                {"access_rate_bits", p.access.rate_bits},
                {"access_tx_gain_dbi", p.access.tx_gain_dbi},
                {"access_rx_gain_dbi", p.access.rx_gain_dbi},
                {"access_rice_omega", p.access.rice.omega},
                {"access_rice_psi", p.access.rice.psi},
                {"backhaul_power_w", p.backhaul.power_w},
                {"backhaul_tx_gain_dbi", p.backhaul.tx_gain_dbi},
                {"backhaul_rx_gain_dbi", p.backhaul.rx_gain_dbi},
                {"backhaul_rice_omega", p.backhaul.rice.omega},
                {"backhaul_rice_psi", p.backhaul.rice.psi}};
  root["fso"] = {{"distance_m", p.fso.distance_m},
                 {"power_w", p.fso.power_w},
                 {"wavelength_m", p.fso.wavelength_m},
                 {"bandwidth_hz", p.fso.bandwidth_hz},
                 {"responsivity", p.fso.responsivity},
                 {"noise_variance_a2", p.fso.noise_variance_a2},
                 {"attenuation_db_per_m", p.fso.attenuation_db_per_m},
                 {"cn2", p.fso.cn2},
                 {"divergence_rad", p.fso.divergence_rad},
                 {"aperture_radius_m", p.fso.aperture_radius_m}};
  root["sim"] = {{"symbols_per_block", p.sim.symbols_per_block},
                 {"blocks", p.sim.blocks},
                 {"samples", p.sim.samples},
                 {"seed", p.sim.seed},
                 {"quad_order", p.sim.quad_order},
                 {"solver_tol", p.sim.solver_tol},
                 {"solver_max_iters", p.sim.solver_max_iters},
                 {"access_mode", access_mode_name(cfg.mode)}};

  ordered_json weather = ordered_json::array();
  for (const WeatherPoint& w : cfg.weather) {
    ordered_json e;
    if (!w.name.empty()) e["name"] = w.name;
    e["kappa_db_per_m"] = w.kappa_db_per_m;
    e["cn2"] = w.cn2;
    weather.push_back(std::move(e));
  }
  ordered_json protocols = ordered_json::array();
  for (sim::BenchmarkKind kind : cfg.protocols) protocols.push_back(protocol_name(kind));
  ordered_json sweep_section;
  sweep_section["weather"] = std::move(weather);
  sweep_section["distances_m"] = cfg.distances_m;
  sweep_section["protocols"] = std::move(protocols);
  sweep_section["output"] = cfg.output_path;
  root["sweep"] = std::move(sweep_section);
  return root.dump(2) + "\n";
}

}  // namespace rfso::sweep
