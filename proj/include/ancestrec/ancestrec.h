/* C interface to ancestrec. Handles are opaque; every call returns an
 * ar_status and leaves a message for ar_last_error() (per thread) on failure.
 * Strings returned through char** are freed with ar_string_free. */
#ifndef ANCESTREC_H
#define ANCESTREC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define AR_API __attribute__((visibility("default")))
#else
#define AR_API
#endif

typedef enum {
  AR_OK = 0,
  AR_VERIFY_FAILED = 1,
  AR_INVALID = 2,
  AR_NUMERIC = 3
} ar_status;

typedef struct ar_model ar_model;
typedef struct ar_table ar_table;

typedef void (*ar_log_fn)(const char* message, void* user);

AR_API const char* ar_version(void);
AR_API const char* ar_last_error(void);
/* Warnings (e.g. a corrupt cache entry). NULL restores the default, stderr. */
AR_API void ar_set_log(ar_log_fn fn, void* user);

/* A_n at t; t holds n complex numbers as re, im pairs. */
AR_API ar_status ar_model_create(int n, const double* t, ar_model** out);
AR_API void ar_model_free(ar_model* m);
AR_API int ar_model_n(const ar_model* m);
AR_API int ar_model_semisimple(const ar_model* m);
/* flat coordinates tau_1..tau_n as re, im pairs into out[2n] */
AR_API ar_status ar_model_flat_point(const ar_model* m, double* out);

/* Correlators with g <= gmax and 1 <= n <= nmax; K = 0 picks the R truncation.
 * cache_dir may be NULL. */
AR_API ar_status ar_table_build(const ar_model* m, int gmax, int nmax, int K, const char* cache_dir,
                                ar_table** out);
AR_API void ar_table_free(ar_table* t);
AR_API size_t ar_table_size(const ar_table* t);
/* <v_{a_1} psi^{m_1} ... >_g with 1-based a; zero outside the tame range. */
AR_API ar_status ar_table_value(const ar_table* t, int g, int n, const int* a, const int* m, double* re,
                                double* im);

/* Runs a JSON job (see the README) and returns the JSON report. *report is
 * set whenever a report exists, including for AR_VERIFY_FAILED. */
AR_API ar_status ar_run_job(const char* job_json, char** report);
AR_API void ar_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
