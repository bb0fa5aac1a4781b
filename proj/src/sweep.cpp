#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rfso/errors.hpp"
#include "rfso/numerics.hpp"
#include "rfso/sweep.hpp"

namespace rfso::sweep {

namespace {

// Shortest representation that parses back to the identical double.
std::string fmt(double v) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct PointJob {
  WeatherPoint weather;
  double distance_m = 0.0;
  std::size_t index = 0;
};

struct PointOutcome {
  channels::LinkBudget budget;
  double mean_c1 = 0.0;
  double mean_c2 = 0.0;
  double mean_cfso = 0.0;
  bool solved = false;
  allocation::UpperBoundResult policy;
  sim::BenchmarkSet sims;
};

// Policy estimation and benchmark simulation for one (weather, distance)
// point. Streams 4*index and 4*index+1 keep every point's draws disjoint
// regardless of worker scheduling.
PointOutcome run_point(const ExperimentConfig& cfg, const PointJob& job, bool want_proposed) {
  channels::SystemParams p = cfg.base;
  p.fso.attenuation_db_per_m = job.weather.kappa_db_per_m;
  p.fso.cn2 = job.weather.cn2;
  p.fso.distance_m = job.distance_m;
  p.backhaul.distance_m = job.distance_m;

  PointOutcome out;
  out.budget = channels::derive_link_budget(p);

  numerics::Rng rng_policy(p.sim.seed, 4 * static_cast<std::uint64_t>(job.index));
  std::vector<capacity::RateTriple> span(static_cast<std::size_t>(p.sim.samples));
  double s1 = 0.0;
  double s2 = 0.0;
  double sf = 0.0;
  for (capacity::RateTriple& r : span) {
    r = capacity::rates_for_block(channels::sample_block(p, out.budget, rng_policy), p, out.budget,
                                  cfg.mode);
    s1 += r.c1;
    s2 += r.c2;
    sf += r.c_fso;
  }
  const double n = static_cast<double>(span.size());
  out.mean_c1 = s1 / n;
  out.mean_c2 = s2 / n;
  out.mean_cfso = sf / n;

  if (want_proposed) {
    allocation::SolveOptions opt;
    opt.tol = p.sim.solver_tol;
    opt.max_iters = p.sim.solver_max_iters;
    out.policy = allocation::solve_lambda_over(span, out.budget.M, p.sim.symbols_per_block, opt);
    out.solved = true;
  }

  allocation::Policy pol;
  pol.lambda = out.solved ? out.policy.lambda_star : 1.0;
  pol.access_mode = cfg.mode;
  const double denom = out.mean_c1 + out.mean_c2;
  const double conv_rf_access_fraction = denom > 0.0 ? out.mean_c2 / denom : 0.0;
  numerics::Rng rng_sim(p.sim.seed, 4 * static_cast<std::uint64_t>(job.index) + 1);
  out.sims = sim::run_benchmarks_shared(pol, conv_rf_access_fraction, p, out.budget, cfg.mode,
                                        rng_sim, p.sim.blocks);
  return out;
}

void check_lists(const ExperimentConfig& cfg) {
  if (cfg.weather.empty()) throw config_error("sweep.weather must be non-empty");
  if (cfg.distances_m.empty()) throw config_error("sweep.distances_m must be non-empty");
  if (cfg.protocols.empty()) throw config_error("sweep.protocols must be non-empty");
  try {
    cfg.base.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  check_lists(cfg);
  const bool want_proposed = std::find(cfg.protocols.begin(), cfg.protocols.end(),
                                       sim::BenchmarkKind::Proposed) != cfg.protocols.end();

  std::vector<PointJob> jobs;
  jobs.reserve(cfg.weather.size() * cfg.distances_m.size());
  for (const WeatherPoint& w : cfg.weather) {
    for (double d : cfg.distances_m) {
      jobs.push_back({w, d, jobs.size()});
    }
  }

  std::vector<PointOutcome> outcomes(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        outcomes[i] = run_point(cfg, jobs[i], want_proposed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(jobs.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const convergence_error& e) {
      throw convergence_error("sweep point kappa=" + fmt(jobs[i].weather.kappa_db_per_m) +
                                  " dB/m, d=" + fmt(jobs[i].distance_m) + " m: " + e.what(),
                              e.residual());
    }
  }

  const double n_symbols = static_cast<double>(cfg.base.sim.symbols_per_block);
  const double w_rf = cfg.base.rf.bandwidth_hz;
  std::vector<SweepRow> rows;
  rows.reserve(jobs.size() * cfg.protocols.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const PointJob& job = jobs[i];
    const PointOutcome& oc = outcomes[i];
    const double m = static_cast<double>(oc.budget.M);
    for (sim::BenchmarkKind kind : cfg.protocols) {
      SweepRow row;
      row.kappa_db_per_m = job.weather.kappa_db_per_m;
      row.cn2 = job.weather.cn2;
      row.distance_m = job.distance_m;
      row.protocol = kind;
      switch (kind) {
        case sim::BenchmarkKind::Proposed:
          row.has_policy = true;
          row.lambda_star = oc.policy.lambda_star;
          row.balance_case = oc.policy.balance_case;
          row.c1_bar = oc.policy.averages.c1_bar;
          row.c2_bar = oc.policy.averages.c2_bar;
          row.c_fso_bar = oc.policy.averages.c_fso_bar;
          row.tau_upp_bits_per_block = oc.policy.tau_upp_per_block;
          row.tau_sim_bits_per_block = oc.sims.proposed.tau_per_block;
          break;
        case sim::BenchmarkKind::MixedRfFsoOnly:
          row.c1_bar = oc.mean_c1;
          row.c2_bar = 0.0;
          row.c_fso_bar = oc.mean_cfso;
          row.tau_upp_bits_per_block = n_symbols * std::min(oc.mean_c1, m * oc.mean_cfso);
          row.tau_sim_bits_per_block = oc.sims.mixed.tau_per_block;
          break;
        case sim::BenchmarkKind::ConventionalRf: {
          row.c1_bar = oc.mean_c1;
          row.c2_bar = oc.mean_c2;
          row.c_fso_bar = 0.0;
          const double denom = oc.mean_c1 + oc.mean_c2;
          row.tau_upp_bits_per_block =
              denom > 0.0 ? n_symbols * oc.mean_c1 * oc.mean_c2 / denom : 0.0;
          row.tau_sim_bits_per_block = oc.sims.conventional_rf.tau_per_block;
          break;
        }
      }
      row.tau_norm_bits_per_sec = row.tau_sim_bits_per_block / n_symbols * w_rf;
      rows.push_back(row);
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.kappa_db_per_m != b.kappa_db_per_m) return a.kappa_db_per_m < b.kappa_db_per_m;
    if (a.cn2 != b.cn2) return a.cn2 < b.cn2;
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return std::strcmp(protocol_name(a.protocol), protocol_name(b.protocol)) < 0;
  });
  return rows;
}

PolicySummary run_policy(const ExperimentConfig& cfg) {
  try {
    cfg.base.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  const channels::SystemParams& p = cfg.base;
  const channels::LinkBudget budget = channels::derive_link_budget(p);
  numerics::Rng rng(p.sim.seed, 0);
  PolicySummary out;
  out.result = allocation::solve_lambda(p, budget, cfg.mode, rng);
  out.tau_norm_bits_per_sec = out.result.tau_upp_per_block /
                              static_cast<double>(p.sim.symbols_per_block) * p.rf.bandwidth_hz;
  return out;
}

capacity::RateTriple capacity_probe(const ExperimentConfig& cfg) {
  try {
    cfg.base.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  const channels::SystemParams& p = cfg.base;
  const channels::LinkBudget budget = channels::derive_link_budget(p);
  numerics::Rng rng(p.sim.seed, 0);
  return capacity::rates_for_block(channels::sample_block(p, budget, rng), p, budget, cfg.mode);
}

std::string csv_string(const std::vector<SweepRow>& rows) {
  std::string out =
      "kappa,c_n2,d,protocol,lambda_star,case,c1_bar,c2_bar,c_fso_bar,"
      "tau_upp_bits_per_block,tau_sim_bits_per_block,tau_norm_bits_per_sec\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.kappa_db_per_m);
    out += ',';
    out += fmt(r.cn2);
    out += ',';
    out += fmt(r.distance_m);
    out += ',';
    out += protocol_name(r.protocol);
    out += ',';
    if (r.has_policy) out += fmt(r.lambda_star);
    out += ',';
    if (r.has_policy) out += balance_case_name(r.balance_case);
    out += ',';
    out += fmt(r.c1_bar);
    out += ',';
    out += fmt(r.c2_bar);
    out += ',';
    out += fmt(r.c_fso_bar);
    out += ',';
    out += fmt(r.tau_upp_bits_per_block);
    out += ',';
    out += fmt(r.tau_sim_bits_per_block);
    out += ',';
    out += fmt(r.tau_norm_bits_per_sec);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << csv_string(rows);
  out.flush();
  if (!out) throw io_error("cannot write " + path);
}

}  // namespace rfso::sweep
