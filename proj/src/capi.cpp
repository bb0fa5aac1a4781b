#include "rfso.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rfso/errors.hpp"
#include "rfso/sweep.hpp"

struct rfso_config {
  rfso::sweep::ExperimentConfig cfg;
};

struct rfso_sweep_result {
  std::vector<rfso::sweep::SweepRow> rows;
};

namespace {

thread_local std::string g_last_error = "";

rfso_status set_error(rfso_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
rfso_status guarded(F&& f) {
  try {
    return std::forward<F>(f)();
  } catch (const rfso::config_error& e) {
    return set_error(RFSO_ERR_CONFIG, e.what());
  } catch (const rfso::convergence_error& e) {
    return set_error(RFSO_ERR_NO_CONVERGENCE, e.what());
  } catch (const rfso::io_error& e) {
    return set_error(RFSO_ERR_IO, e.what());
  } catch (const std::domain_error& e) {
    return set_error(RFSO_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(RFSO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RFSO_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RFSO_ERROR, e.what());
  } catch (...) {
    return set_error(RFSO_ERROR, "unknown error");
  }
}

rfso_status null_argument(const char* name) {
  return set_error(RFSO_ERR_INVALID_ARGUMENT, std::string("null argument: ") + name);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rfso_last_error(void) { return g_last_error.c_str(); }

const char* rfso_version(void) { return "0.1.0"; }

void rfso_string_free(char* text) { std::free(text); }

rfso_status rfso_config_default(rfso_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rfso_config{rfso::sweep::default_config()};
    return RFSO_OK;
  });
}

rfso_status rfso_config_parse(const char* text, rfso_config** out) {
  if (text == nullptr) return null_argument("text");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rfso_config{rfso::sweep::parse_config(text)};
    return RFSO_OK;
  });
}

rfso_status rfso_config_parse_file(const char* path, rfso_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rfso_config{rfso::sweep::parse_config_file(path)};
    return RFSO_OK;
  });
}

void rfso_config_free(rfso_config* cfg) { delete cfg; }

rfso_status rfso_config_canonical_text(const rfso_config* cfg, char** out_text) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out_text == nullptr) return null_argument("out_text");
  return guarded([&] {
    *out_text = dup_string(rfso::sweep::canonical_config_text(cfg->cfg));
    return RFSO_OK;
  });
}

rfso_status rfso_config_set_seed(rfso_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return null_argument("cfg");
  cfg->cfg.base.sim.seed = seed;
  return RFSO_OK;
}

rfso_status rfso_config_set_blocks(rfso_config* cfg, int64_t blocks) {
  if (cfg == nullptr) return null_argument("cfg");
  if (blocks <= 0) return set_error(RFSO_ERR_INVALID_ARGUMENT, "blocks must be positive");
  cfg->cfg.base.sim.blocks = blocks;
  return RFSO_OK;
}

rfso_status rfso_config_set_samples(rfso_config* cfg, int64_t samples) {
  if (cfg == nullptr) return null_argument("cfg");
  if (samples <= 0) return set_error(RFSO_ERR_INVALID_ARGUMENT, "samples must be positive");
  cfg->cfg.base.sim.samples = samples;
  return RFSO_OK;
}

rfso_status rfso_config_set_output(rfso_config* cfg, const char* path) {
  if (cfg == nullptr) return null_argument("cfg");
  if (path == nullptr) return null_argument("path");
  if (path[0] == '\0') return set_error(RFSO_ERR_INVALID_ARGUMENT, "output path must be non-empty");
  cfg->cfg.output_path = path;
  return RFSO_OK;
}

rfso_status rfso_config_output(const rfso_config* cfg, char** out_path) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out_path == nullptr) return null_argument("out_path");
  return guarded([&] {
    *out_path = dup_string(cfg->cfg.output_path);
    return RFSO_OK;
  });
}

rfso_status rfso_sweep_run(const rfso_config* cfg, rfso_sweep_result** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new rfso_sweep_result{rfso::sweep::run_sweep(cfg->cfg)};
    return RFSO_OK;
  });
}

int64_t rfso_sweep_row_count(const rfso_sweep_result* result) {
  return result == nullptr ? 0 : static_cast<int64_t>(result->rows.size());
}

rfso_status rfso_sweep_get_row(const rfso_sweep_result* result, int64_t index, rfso_sweep_row* out) {
  if (result == nullptr) return null_argument("result");
  if (out == nullptr) return null_argument("out");
  if (index < 0 || index >= static_cast<int64_t>(result->rows.size())) {
    return set_error(RFSO_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const rfso::sweep::SweepRow& r = result->rows[static_cast<std::size_t>(index)];
  out->kappa_db_per_m = r.kappa_db_per_m;
  out->cn2 = r.cn2;
  out->distance_m = r.distance_m;
  out->protocol = rfso::sweep::protocol_name(r.protocol);
  out->has_policy = r.has_policy ? 1 : 0;
  out->lambda_star = r.lambda_star;
  out->balance_case = r.has_policy ? rfso::sweep::balance_case_name(r.balance_case) : "";
  out->c1_bar = r.c1_bar;
  out->c2_bar = r.c2_bar;
  out->c_fso_bar = r.c_fso_bar;
  out->tau_upp_bits_per_block = r.tau_upp_bits_per_block;
  out->tau_sim_bits_per_block = r.tau_sim_bits_per_block;
  out->tau_norm_bits_per_sec = r.tau_norm_bits_per_sec;
  return RFSO_OK;
}

rfso_status rfso_sweep_csv(const rfso_sweep_result* result, char** out_text) {
  if (result == nullptr) return null_argument("result");
  if (out_text == nullptr) return null_argument("out_text");
  return guarded([&] {
    *out_text = dup_string(rfso::sweep::csv_string(result->rows));
    return RFSO_OK;
  });
}

rfso_status rfso_sweep_write_csv(const rfso_sweep_result* result, const char* path) {
  if (result == nullptr) return null_argument("result");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    rfso::sweep::emit_csv(result->rows, path);
    return RFSO_OK;
  });
}

void rfso_sweep_result_free(rfso_sweep_result* result) { delete result; }

rfso_status rfso_policy_run(const rfso_config* cfg, rfso_policy_summary* out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const rfso::sweep::PolicySummary s = rfso::sweep::run_policy(cfg->cfg);
    out->lambda_star = s.result.lambda_star;
    out->balance_case = s.result.balance_case == rfso::allocation::BalanceCase::FsoSufficient ? 0 : 1;
    out->tau_upp_bits_per_block = s.result.tau_upp_per_block;
    out->tau_norm_bits_per_sec = s.tau_norm_bits_per_sec;
    out->c1_bar = s.result.averages.c1_bar;
    out->c2_bar = s.result.averages.c2_bar;
    out->c_fso_bar = s.result.averages.c_fso_bar;
    out->iterations = static_cast<int64_t>(s.result.iterations);
    out->residual = s.result.residual;
    return RFSO_OK;
  });
}

rfso_status rfso_capacity_probe(const rfso_config* cfg, rfso_rate_triple* out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const rfso::capacity::RateTriple r = rfso::sweep::capacity_probe(cfg->cfg);
    out->c1 = r.c1;
    out->c2 = r.c2;
    out->c_fso = r.c_fso;
    return RFSO_OK;
  });
}

}  // extern "C"
