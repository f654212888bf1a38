/* C API for the nash-welfare solvers.
 *
 * Instances and allocations travel as JSON (the schema documented in the
 * project README) behind opaque handles. Fallible calls return nw_status;
 * nw_last_error() holds the most recent failure message on the calling
 * thread. Strings returned through char** out-parameters belong to the
 * caller and must be released with nw_string_free().
 */

#ifndef NASH_WELFARE_H
#define NASH_WELFARE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct nw_instance nw_instance;
typedef struct nw_allocation nw_allocation;

typedef enum nw_status {
  NW_OK = 0,
  NW_ERR_IO = 1,
  NW_ERR_PARSE = 2,
  NW_ERR_BUDGET = 3,
  NW_ERR_UNSUPPORTED = 4,
  NW_ERR_INVALID_ARGUMENT = 5,
  NW_ERR_INTERNAL = 6
} nw_status;

/* Library version; static storage, do not free. */
const char *nw_version(void);

/* Message of the most recent failure on this thread; valid until the next
 * failing call on the same thread, do not free. */
const char *nw_last_error(void);

void nw_string_free(char *s);

nw_status nw_instance_parse(const char *json, nw_instance **out);
nw_status nw_instance_to_json(const nw_instance *inst, char **out_json);
void nw_instance_free(nw_instance *inst);
size_t nw_instance_agents(const nw_instance *inst);
size_t nw_instance_goods(const nw_instance *inst);

nw_status nw_allocation_parse(const char *json, nw_allocation **out);
nw_status nw_allocation_to_json(const nw_allocation *alloc, char **out_json);
void nw_allocation_free(nw_allocation *alloc);

/* Solve an instance.
 *
 * method:  "auto", "ptas", "pmean", "kary", "two-valuable", "fptas" or
 *          "oracle".
 * epsilon: approximation parameter in (0,1); pass <= 0 for the default 0.5.
 * lambda:  rounding precision override (even integer >= 2); 0 derives it
 *          from epsilon.
 * p:       p-mean exponent ("1", "-1", "-inf"); NULL for Nash welfare.
 * repair:  nonzero applies the wwEF1 transfer repair to the result.
 * budget:  state/enumeration budget; 0 for the default (1e7).
 * zero_optimum: optional; receives 1 when the optimum welfare is zero.
 */
nw_status nw_solve(const nw_instance *inst, const char *method,
                   double epsilon, unsigned lambda, const char *p,
                   int repair, unsigned long long budget,
                   nw_allocation **out, int *zero_optimum);

/* Nash welfare of an allocation: is_zero receives the zero flag, log_value
 * the natural log of the welfare (meaningless when zero). Either
 * out-pointer may be NULL. */
nw_status nw_nash_welfare(const nw_instance *inst,
                          const nw_allocation *alloc, int *is_zero,
                          double *log_value);

/* wwEF1 violations: count always receives the number of violating ordered
 * (envier, envied) pairs; when pairs is non-NULL the first cap pairs are
 * written as 2*cap size_t entries. An empty count certifies wwEF1. */
nw_status nw_wwef1_violations(const nw_instance *inst,
                              const nw_allocation *alloc, size_t *pairs,
                              size_t cap, size_t *count);

#ifdef __cplusplus
}
#endif

#endif /* NASH_WELFARE_H */
