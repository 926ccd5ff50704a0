#ifndef PSHSYM_PSHSYM_H
#define PSHSYM_PSHSYM_H

/* C interface to the pshsym library: Lelong numbers, integrability indices
 * and Schwarz symmetrization of plurisubharmonic functions.
 *
 * Handles are opaque. Every call returning psh_status leaves a message in a
 * thread-local buffer on failure (psh_last_error). Strings returned through
 * char** out-parameters are owned by the caller and released with
 * psh_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PSH_API __declspec(dllexport)
#else
#  define PSH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psh_status {
  PSH_OK = 0,
  PSH_SCHEMA_ERROR = 1,
  PSH_SYMMETRY_VIOLATION = 2,
  PSH_NOT_PSH_PROFILE = 3,
  PSH_OUT_OF_DOMAIN = 4,
  PSH_TOLERANCE_NOT_MET = 5,
  PSH_GRID_TOO_COARSE = 6,
  PSH_CONVEXITY_VIOLATION = 7,
  PSH_SYMMETRY_REQUIRED = 8,
  PSH_SINGLE_POLE_REQUIRED = 9,
  PSH_NUMERICAL_GRADIENT_UNSTABLE = 10,
  PSH_INVALID_ARGUMENT = 11,
  PSH_UNKNOWN_NAME = 12,
  PSH_IO_ERROR = 13,
  PSH_INTERNAL_ERROR = 99
} psh_status;

typedef struct psh_config psh_config;
typedef struct psh_spec psh_spec;
typedef struct psh_analysis psh_analysis;

PSH_API const char* psh_status_name(psh_status status);
/* Message of the last failed call on this thread ("" if none). */
PSH_API const char* psh_last_error(void);
PSH_API void psh_string_free(char* s);
PSH_API const char* psh_version(void);

/* Run configuration, initialised to the defaults. */
PSH_API psh_status psh_config_new(psh_config** out);
PSH_API void psh_config_free(psh_config* config);
/* Overlays the keys of a JSON object ("seed", "t_min", "quad_rel_tol", ...). */
PSH_API psh_status psh_config_apply_json(psh_config* config, const char* json);
PSH_API psh_status psh_config_to_json(const psh_config* config, char** out);
PSH_API psh_status psh_config_set_seed(psh_config* config, uint64_t seed);
PSH_API psh_status psh_config_set_workers(psh_config* config, int workers);

/* JSON array of the built-in catalog names. */
PSH_API psh_status psh_catalog_names(char** out);
/* Loads a catalog entry; besides the listed names "log-norm-n<N>[-g<gamma>]"
 * and "demailly-<eps>" are accepted. */
PSH_API psh_status psh_spec_from_catalog(const char* name, const psh_config* config, psh_spec** out);
/* Parses and validates a function-spec JSON document. */
PSH_API psh_status psh_spec_from_json(const char* json, const psh_config* config, psh_spec** out);
PSH_API void psh_spec_free(psh_spec* spec);
PSH_API psh_status psh_spec_name(const psh_spec* spec, char** out);
PSH_API psh_status psh_spec_dimension(const psh_spec* spec, int* out);
/* u(z) for z given as 2n interleaved real/imaginary parts; -inf is a value. */
PSH_API psh_status psh_spec_evaluate(const psh_spec* spec, const double* z, size_t len, double* out);
/* Lebesgue measure of {u < t} for the function as written. */
PSH_API psh_status psh_sublevel_volume(const psh_spec* spec, double t, const psh_config* config, double* value,
                                       double* abs_error);

/* Full pipeline: symmetrization, invariants, theorem checks. */
PSH_API psh_status psh_analyze(const psh_spec* spec, const psh_config* config, psh_analysis** out);
PSH_API void psh_analysis_free(psh_analysis* analysis);
PSH_API psh_status psh_analysis_name(const psh_analysis* analysis, char** out);
/* kind: "report.json", "theorems.json", "volumes.csv", "profiles.csv",
 * "summary.md", "plots/profiles.svg", "plots/volume.svg". */
PSH_API psh_status psh_analysis_artifact(const psh_analysis* analysis, const char* kind, char** out);
/* unstable: any slope estimate flagged UNSTABLE; all_pass: no theorem check FAILed. */
PSH_API psh_status psh_analysis_flags(const psh_analysis* analysis, int* unstable, int* all_pass);

/* Markdown tables over several analyses. */
PSH_API psh_status psh_reproduce_markdown(const psh_analysis* const* items, size_t count, char** out);
PSH_API psh_status psh_verify_markdown(const psh_analysis* const* items, size_t count, char** out);

#ifdef __cplusplus
}
#endif

#endif
