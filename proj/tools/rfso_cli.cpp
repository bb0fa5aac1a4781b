#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rfso.h"

namespace {

int status_to_exit(rfso_status s) {
  switch (s) {
    case RFSO_OK:
      return 0;
    case RFSO_ERR_CONFIG:
      return 2;
    case RFSO_ERR_NO_CONVERGENCE:
      return 3;
    default:
      return 1;
  }
}

int report_failure(rfso_status s) {
  std::fprintf(stderr, "error: %s\n", rfso_last_error());
  return status_to_exit(s);
}

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> blocks;
  std::optional<std::int64_t> samples;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (JSON)");
  cmd->add_option("--seed", o.seed, "override sim.seed");
  cmd->add_option("--blocks", o.blocks, "override sim.blocks");
  cmd->add_option("--samples", o.samples, "override sim.samples");
  cmd->add_option("--out", o.out_path, "output path");
}

// Loads the config (defaults when no file given) and applies flag overrides.
// Returns 0 and sets *cfg on success, otherwise an exit code.
int load_config(const CommonOpts& o, rfso_config** cfg) {
  rfso_status st = o.config_path.empty() ? rfso_config_default(cfg)
                                         : rfso_config_parse_file(o.config_path.c_str(), cfg);
  if (st != RFSO_OK) return report_failure(st);
  if (o.seed && (st = rfso_config_set_seed(*cfg, *o.seed)) != RFSO_OK) return report_failure(st);
  if (o.blocks && (st = rfso_config_set_blocks(*cfg, *o.blocks)) != RFSO_OK) {
    return report_failure(st);
  }
  if (o.samples && (st = rfso_config_set_samples(*cfg, *o.samples)) != RFSO_OK) {
    return report_failure(st);
  }
  return 0;
}

// Prints to stdout and, when out_path is set, writes the same text there.
int deliver_text(const std::string& text, const std::string& out_path) {
  std::fputs(text.c_str(), stdout);
  if (out_path.empty()) return 0;
  std::ofstream f(out_path, std::ios::binary);
  f << text;
  f.flush();
  if (!f) {
    std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
    return 1;
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  rfso_config* cfg = nullptr;
  int rc = load_config(o, &cfg);
  if (rc != 0) {
    rfso_config_free(cfg);
    return rc;
  }
  rfso_status st;
  if (!o.out_path.empty() && (st = rfso_config_set_output(cfg, o.out_path.c_str())) != RFSO_OK) {
    rc = report_failure(st);
    rfso_config_free(cfg);
    return rc;
  }
  rfso_sweep_result* result = nullptr;
  if ((st = rfso_sweep_run(cfg, &result)) != RFSO_OK) {
    rc = report_failure(st);
    rfso_config_free(cfg);
    return rc;
  }
  char* out_path = nullptr;
  if ((st = rfso_config_output(cfg, &out_path)) == RFSO_OK) {
    st = rfso_sweep_write_csv(result, out_path);
  }
  if (st != RFSO_OK) {
    rc = report_failure(st);
  } else {
    std::printf("wrote %" PRId64 " rows to %s\n", rfso_sweep_row_count(result), out_path);
  }
  rfso_string_free(out_path);
  rfso_sweep_result_free(result);
  rfso_config_free(cfg);
  return rc;
}

int cmd_policy(const CommonOpts& o) {
  rfso_config* cfg = nullptr;
  int rc = load_config(o, &cfg);
  if (rc != 0) {
    rfso_config_free(cfg);
    return rc;
  }
  rfso_policy_summary s;
  const rfso_status st = rfso_policy_run(cfg, &s);
  rfso_config_free(cfg);
  if (st != RFSO_OK) return report_failure(st);

  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "lambda_star = %.17g\n"
                "case = %s\n"
                "c1_bar = %.17g\n"
                "c2_bar = %.17g\n"
                "c_fso_bar = %.17g\n"
                "tau_upp_bits_per_block = %.17g\n"
                "tau_norm_bits_per_sec = %.17g\n"
                "iterations = %" PRId64 "\n"
                "residual = %.17g\n",
                s.lambda_star, s.balance_case == 0 ? "fso_sufficient" : "balanced", s.c1_bar,
                s.c2_bar, s.c_fso_bar, s.tau_upp_bits_per_block, s.tau_norm_bits_per_sec,
                s.iterations, s.residual);
  return deliver_text(buf, o.out_path);
}

int cmd_capacity(const CommonOpts& o) {
  rfso_config* cfg = nullptr;
  int rc = load_config(o, &cfg);
  if (rc != 0) {
    rfso_config_free(cfg);
    return rc;
  }
  rfso_rate_triple t;
  const rfso_status st = rfso_capacity_probe(cfg, &t);
  rfso_config_free(cfg);
  if (st != RFSO_OK) return report_failure(st);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "c1 = %.17g\n"
                "c2 = %.17g\n"
                "c_fso = %.17g\n",
                t.c1, t.c2, t.c_fso);
  return deliver_text(buf, o.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid RF/FSO buffer-aided relay experiment runner"};
  app.require_subcommand(1);

  CommonOpts sweep_opts;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run the weather/distance sweep and write a CSV of results");
  add_common(sweep, sweep_opts);

  CommonOpts policy_opts;
  CLI::App* policy =
      app.add_subcommand("policy", "solve the relay activation policy at the base operating point");
  add_common(policy, policy_opts);

  CommonOpts capacity_opts;
  CLI::App* capacity =
      app.add_subcommand("capacity", "print the rate triple of one seeded channel draw");
  add_common(capacity, capacity_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (sweep->parsed()) return cmd_sweep(sweep_opts);
  if (policy->parsed()) return cmd_policy(policy_opts);
  return cmd_capacity(capacity_opts);
}
