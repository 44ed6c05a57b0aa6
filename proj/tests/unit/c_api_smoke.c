/* Compiles the public header as C and exercises a few calls. */
#include <math.h>
#include <stdio.h>

#include "tailsplit/tailsplit.h"

#define EXPECT(cond)                                   \
  do {                                                 \
    if (!(cond)) {                                     \
      fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); \
      return 1;                                        \
    }                                                  \
  } while (0)

int main(void) {
  ts_tail_model* model = NULL;
  ts_mixing_law* mix = NULL;
  ts_regime* regime = NULL;
  double value = 0.0;

  EXPECT(ts_tail_model_pareto(2.0, 1.0, &model) == TS_OK);
  EXPECT(ts_mixing_law_parse("degenerate:1", &mix) == TS_OK);
  EXPECT(ts_regime_create("gt1-vanishing", 0, 0.5, 0.5, &regime) == TS_OK);
  EXPECT(ts_lt_limit(regime, model, mix, 1.0, 0.0, 0.0, TS_VARIANT_CONSISTENT, &value) == TS_OK);
  EXPECT(fabs(value - exp(-2.0)) < 1e-12);
  EXPECT(ts_tail_model_pareto(0.0, 1.0, NULL) == TS_ERR_INVALID_ARGUMENT);
  EXPECT(ts_last_error()[0] != '\0');

  ts_regime_free(regime);
  ts_mixing_law_free(mix);
  ts_tail_model_free(model);
  printf("c api smoke ok (%s)\n", ts_version());
  return 0;
}
