/* C interface to the annealing simulation library. */
#ifndef IQA_IQA_H
#define IQA_IQA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IQA_API __declspec(dllexport)
#else
#define IQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum iqa_status {
  IQA_OK = 0,
  IQA_ERR_CONFIG = 1,
  IQA_ERR_DOMAIN = 2,
  IQA_ERR_CAPACITY = 3,
  IQA_ERR_UNSUPPORTED_PROFILE = 4,
  IQA_ERR_NUMERIC = 5,
  IQA_ERR_IO = 6,
  IQA_ERR_INVALID_ARGUMENT = 7,
  IQA_ERR_BUFFER_TOO_SMALL = 8,
  IQA_ERR_INTERNAL = 9
} iqa_status;

IQA_API const char* iqa_version(void);
IQA_API const char* iqa_status_name(iqa_status status);

/* Message and offending configuration key (may be empty) of the most recent
   failure on the calling thread. */
IQA_API const char* iqa_last_error_message(void);
IQA_API const char* iqa_last_error_key(void);

/* Functions that fill a caller buffer write a NUL-terminated string and store
   the required size (including the NUL) in *needed when needed is non-null.
   A null or short buffer yields IQA_ERR_BUFFER_TOO_SMALL. */

/* ---- run configuration ---- */

typedef struct iqa_config iqa_config;

/* command: meanfield, exact, spectrum, ensemble-fraction, ensemble-compare,
   saddle. */
IQA_API iqa_status iqa_config_create(const char* command, iqa_config** out);
IQA_API void iqa_config_destroy(iqa_config* config);
IQA_API iqa_status iqa_config_apply_preset(iqa_config* config, const char* preset);
IQA_API iqa_status iqa_config_load_file(iqa_config* config, const char* path);
IQA_API iqa_status iqa_config_load_string(iqa_config* config, const char* text);
/* key is "name" or "section.name". */
IQA_API iqa_status iqa_config_set(iqa_config* config, const char* key, const char* value);
IQA_API iqa_status iqa_config_get(const iqa_config* config, const char* key, char* buffer,
                                  size_t capacity, size_t* needed);
/* Checks cross-key consistency without running. */
IQA_API iqa_status iqa_config_validate(const iqa_config* config);
IQA_API iqa_status iqa_config_to_json(const iqa_config* config, char* buffer, size_t capacity,
                                      size_t* needed);

IQA_API size_t iqa_config_key_count(void);
IQA_API const char* iqa_config_key_section(size_t index);
IQA_API const char* iqa_config_key_name(size_t index);
IQA_API const char* iqa_config_key_help(size_t index);

IQA_API size_t iqa_preset_count(void);
IQA_API const char* iqa_preset_name(size_t index);
IQA_API const char* iqa_preset_command(size_t index);
IQA_API const char* iqa_preset_description(size_t index);

/* Runs the pipeline and writes its outputs. *exit_code receives 0, 2
   (configuration) or 3 (numeric or I/O failure); on failure error.json is
   written to the output directory. The directory is reported through
   buffer when buffer is non-null. */
IQA_API iqa_status iqa_config_run(const iqa_config* config, int* exit_code, char* buffer,
                                  size_t capacity, size_t* needed);

/* Writes error.json for a failure that happened before iqa_config_run. */
IQA_API void iqa_config_report_error(const iqa_config* config, int exit_code, const char* kind,
                                     const char* key, const char* message);

/* ---- direct evaluation ---- */

/* profile: ramp, quench or homogeneous. x is tau (s for homogeneous). */
IQA_API iqa_status iqa_gamma(const char* profile, int n_spins, int spin, double x, double* out);
IQA_API iqa_status iqa_field_off_tau(const char* profile, int n_spins, int spin, double* out);
/* beta may be INFINITY. Any output pointer may be null. */
IQA_API iqa_status iqa_saddle_solve(double s, double tau, int p, double beta, double* m,
                                    double* h, double* f, double* residual);

/* ---- two-local instances ---- */

typedef struct iqa_sk iqa_sk;

/* kind: fig4 (n = 4) or fig5 (n = 8). */
IQA_API iqa_status iqa_sk_create_deterministic(const char* kind, int n_spins, iqa_sk** out);
IQA_API iqa_status iqa_sk_sample(int n_spins, uint64_t seed, iqa_sk** out);
IQA_API iqa_status iqa_sk_from_json(const char* text, iqa_sk** out);
IQA_API iqa_status iqa_sk_to_json(const iqa_sk* sk, char* buffer, size_t capacity, size_t* needed);
IQA_API int iqa_sk_n_spins(const iqa_sk* sk);
/* Bit j-1 of config set means spin j is up. */
IQA_API iqa_status iqa_sk_energy(const iqa_sk* sk, uint64_t config, double* out);
IQA_API void iqa_sk_destroy(iqa_sk* sk);

#ifdef __cplusplus
}
#endif

#endif
