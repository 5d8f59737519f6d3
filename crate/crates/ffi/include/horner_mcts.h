#ifndef HORNER_MCTS_H
#define HORNER_MCTS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HmStatus {
  HM_STATUS_OK = 0,
  HM_STATUS_NULL_POINTER = 1,
  HM_STATUS_INVALID_UTF8 = 2,
  HM_STATUS_PARSE_ERROR = 3,
  HM_STATUS_INVALID_SCHEME = 4,
  HM_STATUS_INVALID_PARAMETER = 5,
  HM_STATUS_TOO_MANY_VARIABLES = 6,
  HM_STATUS_INTERNAL = 7,
} HmStatus;

typedef enum HmCriterion {
  HM_CRITERION_UCT = 0,
  HM_CRITERION_SA_UCT = 1,
} HmCriterion;

typedef enum HmSchedule {
  HM_SCHEDULE_LINEAR = 0,
  /**
   * Halves every `half_life` iterations.
   */
  HM_SCHEDULE_EXPONENTIAL = 1,
  HM_SCHEDULE_CONSTANT = 2,
} HmSchedule;

typedef enum HmDirection {
  HM_DIRECTION_FORWARD = 0,
  HM_DIRECTION_BACKWARD = 1,
} HmDirection;

/**
 * A parsed polynomial.
 */
typedef struct HmExpr HmExpr;

/**
 * The outcome of a search.
 */
typedef struct HmSearchResult HmSearchResult;

typedef struct HmOpCount {
  uint64_t mul;
  uint64_t add;
} HmOpCount;

/**
 * Search settings; start from [`hm_search_params_default`].
 */
typedef struct HmSearchParams {
  double cp;
  uint64_t n_updates;
  uint64_t repeats;
  enum HmCriterion criterion;
  enum HmSchedule schedule;
  /**
   * Only read for [`HmSchedule::Exponential`].
   */
  double half_life;
  enum HmDirection direction;
  uint64_t seed;
} HmSearchParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the calling thread's most recent failure, or null. Valid
 * until the next failing call on the same thread.
 */
const char *hm_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hm_string_free(char *s);

/**
 * Parses expression text such as `"3*x^2*y - sin(x) + 7"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum HmStatus hm_expr_parse(const char *text, struct HmExpr **out);

/**
 * The resultant of generic polynomials of degrees `m` and `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HmStatus hm_expr_resultant(uint32_t m, uint32_t n, struct HmExpr **out);

/**
 * A seeded random polynomial over `x1..x{n_vars}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HmStatus hm_expr_random(uint32_t n_vars,
                             uint32_t n_terms,
                             uint32_t max_exponent,
                             uint32_t coeff_range,
                             uint64_t seed,
                             struct HmExpr **out);

/**
 * Releases an expression. Null is ignored.
 *
 * # Safety
 * `e` must come from this library and not have been freed.
 */
void hm_expr_free(struct HmExpr *e);

/**
 * Canonical text of an expression; free with [`hm_string_free`].
 *
 * # Safety
 * `e` must be a live expression and `out` writable.
 */
enum HmStatus hm_expr_to_string(const struct HmExpr *e, char **out);

/**
 * Number of distinct variables.
 *
 * # Safety
 * `e` must be a live expression and `out` writable.
 */
enum HmStatus hm_expr_num_variables(const struct HmExpr *e, size_t *out);

/**
 * Operation count of the expanded form.
 *
 * # Safety
 * `e` must be a live expression and `out` writable.
 */
enum HmStatus hm_expr_naive_count(const struct HmExpr *e, struct HmOpCount *out);

/**
 * Operation count after Horner and CSE for `scheme` (`"y,x;backward"`
 * style), or for the occurrence-order scheme when `scheme` is null.
 *
 * # Safety
 * `e` must be a live expression, `scheme` null or NUL-terminated, and `out`
 * writable.
 */
enum HmStatus hm_simplify(const struct HmExpr *e, const char *scheme, struct HmOpCount *out);

/**
 * Default search settings.
 */
struct HmSearchParams hm_search_params_default(void);

/**
 * Runs `repeats` searches and keeps the best result.
 *
 * # Safety
 * `e` must be a live expression, `params` readable and `out` writable.
 */
enum HmStatus hm_search(const struct HmExpr *e,
                        const struct HmSearchParams *params,
                        struct HmSearchResult **out);

/**
 * Releases a search result. Null is ignored.
 *
 * # Safety
 * `r` must come from [`hm_search`] and not have been freed.
 */
void hm_search_result_free(struct HmSearchResult *r);

/**
 * Best operation count found.
 *
 * # Safety
 * `r` must be a live result and `out` writable.
 */
enum HmStatus hm_search_result_ops(const struct HmSearchResult *r, struct HmOpCount *out);

/**
 * The best scheme as `"a,b,c;forward"`; free with [`hm_string_free`].
 *
 * # Safety
 * `r` must be a live result and `out` writable.
 */
enum HmStatus hm_search_result_scheme(const struct HmSearchResult *r, char **out);

/**
 * The full result as a JSON object; free with [`hm_string_free`].
 *
 * # Safety
 * `r` must be a live result and `out` writable.
 */
enum HmStatus hm_search_result_json(const struct HmSearchResult *r, char **out);

/**
 * Scores every variable ordering (at most 8 variables). `scheme_out` may be
 * null; otherwise it receives the first optimal scheme.
 *
 * # Safety
 * `e` must be a live expression, `out` writable and `scheme_out` null or
 * writable.
 */
enum HmStatus hm_bruteforce(const struct HmExpr *e,
                            enum HmDirection dir,
                            struct HmOpCount *out,
                            char **scheme_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HORNER_MCTS_H */
