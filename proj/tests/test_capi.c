/* The C interface from C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ancestrec/ancestrec.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

int main(void) {
  ar_model* m = NULL;
  ar_table* t = NULL;
  double tv[2] = {0.3, -0.2};
  double re = 0, im = 0;
  char* rep = NULL;

  EXPECT(strlen(ar_version()) > 0);
  EXPECT(ar_model_create(0, tv, &m) == AR_INVALID && m == NULL);
  EXPECT(strlen(ar_last_error()) > 0);

  EXPECT(ar_model_create(1, tv, &m) == AR_OK);
  EXPECT(ar_model_n(m) == 1 && ar_model_semisimple(m) == 1);
  EXPECT(ar_table_build(m, 2, 2, 0, NULL, &t) == AR_OK);
  EXPECT(ar_table_size(t) > 0);
  {
    int a[1] = {1}, k[1] = {4};
    EXPECT(ar_table_value(t, 2, 1, a, k, &re, &im) == AR_OK);
    EXPECT(re > 1.0 / 1152 - 1e-14 && re < 1.0 / 1152 + 1e-14);
    a[0] = 2;
    EXPECT(ar_table_value(t, 2, 1, a, k, &re, &im) == AR_INVALID);
  }
  {
    /* tame range: <tau_5>_2 vanishes without being stored */
    int a[1] = {1}, k[1] = {5};
    EXPECT(ar_table_value(t, 2, 1, a, k, &re, &im) == AR_OK && re == 0.0);
  }
  ar_table_free(t);
  ar_model_free(m);

  {
    double c[4] = {0, 0, 0, 0};
    EXPECT(ar_model_create(2, c, &m) == AR_OK);
    EXPECT(ar_model_semisimple(m) == 0);
    EXPECT(ar_table_build(m, 1, 1, 0, NULL, &t) == AR_INVALID);
    ar_model_free(m);
  }

  EXPECT(ar_run_job("{\"command\":\"correlators\",\"model\":{\"type\":\"A1\"},\"gmax\":1}", &rep) == AR_OK);
  EXPECT(rep != NULL && strstr(rep, "\"schema\":1") != NULL);
  ar_string_free(rep);
  EXPECT(ar_run_job("not json", &rep) == AR_INVALID && rep == NULL);
  EXPECT(ar_run_job("{\"command\":\"correlators\",\"model\":{\"type\":\"A0\"}}", &rep) == AR_INVALID);
  EXPECT(ar_run_job(NULL, &rep) == AR_INVALID);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("ok\n");
  return failures ? 1 : 0;
}
