/* C interface to the hybrid RF/FSO relay experiment library.
 *
 * All functions returning rfso_status set a thread-local error message
 * readable through rfso_last_error() on failure. Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * *_free function. Strings returned through char** are released with
 * rfso_string_free.
 */
#ifndef RFSO_H
#define RFSO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rfso_config rfso_config;
typedef struct rfso_sweep_result rfso_sweep_result;

typedef enum {
  RFSO_OK = 0,
  RFSO_ERROR = 1,
  RFSO_ERR_CONFIG = 2,
  RFSO_ERR_NO_CONVERGENCE = 3,
  RFSO_ERR_DOMAIN = 4,
  RFSO_ERR_IO = 5,
  RFSO_ERR_INVALID_ARGUMENT = 6
} rfso_status;

/* Message from the most recent failing call on this thread; never NULL. */
const char* rfso_last_error(void);
const char* rfso_version(void);
void rfso_string_free(char* text);

rfso_status rfso_config_default(rfso_config** out);
rfso_status rfso_config_parse(const char* text, rfso_config** out);
rfso_status rfso_config_parse_file(const char* path, rfso_config** out);
void rfso_config_free(rfso_config* cfg);
rfso_status rfso_config_canonical_text(const rfso_config* cfg, char** out_text);
rfso_status rfso_config_set_seed(rfso_config* cfg, uint64_t seed);
rfso_status rfso_config_set_blocks(rfso_config* cfg, int64_t blocks);
rfso_status rfso_config_set_samples(rfso_config* cfg, int64_t samples);
rfso_status rfso_config_set_output(rfso_config* cfg, const char* path);
rfso_status rfso_config_output(const rfso_config* cfg, char** out_path);

typedef struct {
  double kappa_db_per_m;
  double cn2;
  double distance_m;
  const char* protocol;     /* borrowed from the result object */
  int has_policy;           /* lambda_star / balance_case valid only when 1 */
  double lambda_star;
  const char* balance_case; /* "" when has_policy is 0 */
  double c1_bar;
  double c2_bar;
  double c_fso_bar;
  double tau_upp_bits_per_block;
  double tau_sim_bits_per_block;
  double tau_norm_bits_per_sec;
} rfso_sweep_row;

rfso_status rfso_sweep_run(const rfso_config* cfg, rfso_sweep_result** out);
int64_t rfso_sweep_row_count(const rfso_sweep_result* result);
rfso_status rfso_sweep_get_row(const rfso_sweep_result* result, int64_t index, rfso_sweep_row* out);
rfso_status rfso_sweep_csv(const rfso_sweep_result* result, char** out_text);
rfso_status rfso_sweep_write_csv(const rfso_sweep_result* result, const char* path);
void rfso_sweep_result_free(rfso_sweep_result* result);

typedef struct {
  double lambda_star;
  int balance_case; /* 0: FSO backhaul sufficient, 1: balanced (RF active) */
  double tau_upp_bits_per_block;
  double tau_norm_bits_per_sec;
  double c1_bar;
  double c2_bar;
  double c_fso_bar;
  int64_t iterations;
  double residual;
} rfso_policy_summary;

rfso_status rfso_policy_run(const rfso_config* cfg, rfso_policy_summary* out);

typedef struct {
  double c1;
  double c2;
  double c_fso;
} rfso_rate_triple;

/* Rate triple of a single seeded channel draw at the base operating point. */
rfso_status rfso_capacity_probe(const rfso_config* cfg, rfso_rate_triple* out);

#ifdef __cplusplus
}
#endif

#endif /* RFSO_H */
