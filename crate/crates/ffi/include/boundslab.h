#ifndef BOUNDSLAB_H
#define BOUNDSLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_UTF8 = 2,
  BL_STATUS_PARSE = 3,
  BL_STATUS_INVALID_MODEL = 4,
  BL_STATUS_INVALID_ARGUMENT = 5,
  BL_STATUS_NO_REAL_SEMANTICS = 6,
  BL_STATUS_OVERFLOW = 7,
  BL_STATUS_BUDGET_EXCEEDED = 8,
  BL_STATUS_PANIC = 9,
} BlStatus;

/**
 * Values for the `notion` arguments; `Declared` uses the one posted with each constraint.
 */
typedef enum BlNotion {
  BL_NOTION_DECLARED = -1,
  BL_NOTION_DOMAIN = 0,
  BL_NOTION_BOUNDS_D = 1,
  BL_NOTION_BOUNDS_Z = 2,
  BL_NOTION_BOUNDS_R = 3,
} BlNotion;

/**
 * One finite integer set per model variable.
 */
typedef struct BlDomain BlDomain;

/**
 * A parsed, validated model.
 */
typedef struct BlModel BlModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bl_last_error(void);

/**
 * Parses and validates a model from NUL-terminated text.
 */
enum BlStatus bl_model_parse(const char *src, struct BlModel **model);

/**
 * Builds the 0/1 linear model deciding a subset-sum instance.
 */
enum BlStatus bl_reduce_subset_sum(const int64_t *items,
                                   size_t len,
                                   int64_t target,
                                   struct BlModel **model);

void bl_model_free(struct BlModel *model);

size_t bl_model_num_vars(const struct BlModel *model);

size_t bl_model_num_constraints(const struct BlModel *model);

/**
 * The declared domains of the model.
 */
enum BlStatus bl_domain_initial(const struct BlModel *model, struct BlDomain **domain);

void bl_domain_free(struct BlDomain *domain);

/**
 * Number of values left for variable `var`, plus its bounds when nonempty.
 */
enum BlStatus bl_domain_var(const struct BlDomain *domain,
                            size_t var,
                            size_t *size,
                            int64_t *lo,
                            int64_t *hi);

/**
 * Checks constraint `index` against `domain` (the model's declared
 * domains when NULL).
 */
enum BlStatus bl_check(const struct BlModel *model,
                       const struct BlDomain *domain,
                       size_t index,
                       int32_t notion,
                       bool *consistent);

/**
 * Propagates every constraint to a common fixpoint. On failure `*result`
 * is NULL and `*failed` is true.
 */
enum BlStatus bl_propagate(const struct BlModel *model,
                           const struct BlDomain *domain,
                           int32_t notion,
                           struct BlDomain **result,
                           bool *failed);

/**
 * Counts solutions from the declared domains. `max_nodes` of 0 means no
 * limit; `*truncated` reports whether the limit cut the search short.
 */
enum BlStatus bl_solve_count(const struct BlModel *model,
                             uint64_t max_nodes,
                             uint64_t *count,
                             bool *truncated);

/**
 * Renders the model in its text format, with `domain` in place of the
 * declared domains when non-NULL.
 */
enum BlStatus bl_model_to_string(const struct BlModel *model,
                                 const struct BlDomain *domain,
                                 char **text);

void bl_string_free(char *s);

/**
 * Index of the variable named `name`, or -1.
 */
int64_t bl_model_var_index(const struct BlModel *model, const char *name);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOUNDSLAB_H */
