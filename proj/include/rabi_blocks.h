#ifndef RABI_BLOCKS_H
#define RABI_BLOCKS_H

/* C interface to the rabi-blocks simulator. Handles are opaque; every
 * function that can fail returns an rb_status and leaves a message for
 * rb_last_error(). Strings handed out through char** must be released
 * with rb_string_free. */

#include <stddef.h>

#if defined(RB_BUILDING)
#define RB_API __attribute__((visibility("default")))
#else
#define RB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
  RB_OK = 0,
  RB_FAIL = 1,        /* ran, a tolerance check failed */
  RB_CONFIG = 2,      /* bad scenario or parameters */
  RB_UNSUPPORTED = 3, /* no closed form for this scenario */
  RB_IO = 4,
  RB_TRUNCATION = 5,
  RB_INVALID = 6, /* bad argument (null handle, index out of range, ...) */
  RB_INTERNAL = 7
} rb_status;

typedef struct rb_scenario rb_scenario;
typedef struct rb_operator rb_operator;

RB_API const char *rb_version(void);
/* Message of the last failing call on this thread ("" if none). */
RB_API const char *rb_last_error(void);
RB_API void rb_string_free(char *s);

/* Newline-separated preset names. */
RB_API rb_status rb_preset_names(char **out);
RB_API rb_status rb_scenario_from_preset(const char *name, rb_scenario **out);
RB_API rb_status rb_scenario_from_file(const char *path, rb_scenario **out);
RB_API rb_status rb_scenario_from_json(const char *text, rb_scenario **out);
RB_API void rb_scenario_free(rb_scenario *s);
RB_API rb_status rb_scenario_to_json(const rb_scenario *s, char **out);
RB_API const char *rb_scenario_name(const rb_scenario *s);

/* Commands. The JSON report is returned through `report` (may be NULL)
 * for RB_OK, RB_FAIL and RB_UNSUPPORTED. */
RB_API rb_status rb_verify(const rb_scenario *s, const char *out_dir, char **report);
RB_API rb_status rb_simulate(const rb_scenario *s, const char *out_dir, char **report);
RB_API rb_status rb_compare(const rb_scenario *s, const char *out_dir, char **report);

/* Hamiltonian of the simulated space (full, effective or JC). */
RB_API rb_status rb_scenario_hamiltonian(const rb_scenario *s, rb_operator **out);
RB_API size_t rb_operator_dim(const rb_operator *op);
RB_API rb_status rb_operator_entry(const rb_operator *op, size_t row, size_t col, double *re, double *im);
RB_API rb_status rb_commutator_norm(const rb_operator *a, const rb_operator *b, double *out);
RB_API void rb_operator_free(rb_operator *op);

#ifdef __cplusplus
}
#endif

#endif
