#ifndef PB_CONTROL_H
#define PB_CONTROL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PbGoal {
  PB_GOAL_CONSTRUCTIVE = 0,
  PB_GOAL_DESTRUCTIVE = 1,
} PbGoal;

typedef enum PbOperation {
  PB_OPERATION_DELETE = 0,
  PB_OPERATION_ADD = 1,
} PbOperation;

typedef enum PbRule {
  PB_RULE_GREEDY_AV = 0,
  PB_RULE_GREEDY_COST = 1,
  PB_RULE_PHRAGMEN = 2,
  PB_RULE_EQUAL_SHARES = 3,
} PbRule;

typedef enum PbStatus {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_UTF8 = 2,
  PB_STATUS_PARSE_ERROR = 3,
  PB_STATUS_INVALID_ARGUMENT = 4,
  PB_STATUS_BUFFER_TOO_SMALL = 5,
  PB_STATUS_RULE_ERROR = 6,
  PB_STATUS_CONTROL_ERROR = 7,
  PB_STATUS_MEASURE_ERROR = 8,
  PB_STATUS_PANIC = 9,
} PbStatus;

/**
 * Parsed election with its input-order tie-breaking.
 */
typedef struct PbInstance PbInstance;

/**
 * Result of a control query; `weight` is 0 when infeasible.
 */
typedef struct PbControlResult {
  bool feasible;
  bool complete;
  uint64_t weight;
} PbControlResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *pb_last_error(void);

/**
 * Parses Pabulib text. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PbStatus pb_instance_parse(const char *text, struct PbInstance **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `instance` must come from [`pb_instance_parse`] and not be used afterwards.
 */
void pb_instance_free(struct PbInstance *instance);

/**
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum PbStatus pb_instance_num_projects(const struct PbInstance *instance, size_t *out);

/**
 * Index of the project with the given id.
 *
 * # Safety
 * `instance` must be a live handle, `id` NUL-terminated and `out` valid.
 */
enum PbStatus pb_instance_project_index(const struct PbInstance *instance,
                                        const char *id,
                                        size_t *out);

/**
 * Serializes the instance as Pabulib text into `*out`.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum PbStatus pb_instance_write(const struct PbInstance *instance, char **out);

/**
 * Runs a rule; `funded[i]` is set to 1 for funded projects and 0 otherwise.
 *
 * # Safety
 * `funded` must point to `len` writable bytes.
 */
enum PbStatus pb_evaluate(const struct PbInstance *instance,
                          enum PbRule rule,
                          uint8_t *funded,
                          size_t len);

/**
 * Solves a unit-weight control query with at most `bound` controlled
 * projects. For addition, `spoilers` lists `num_spoilers` project indices.
 * When `witness` is non-null it receives a 0/1 mask of length `len`.
 *
 * # Safety
 * `spoilers` must point to `num_spoilers` indices (or be null when zero),
 * `witness` to `len` writable bytes (or be null), `out` must be valid.
 */
enum PbStatus pb_control(const struct PbInstance *instance,
                         enum PbRule rule,
                         enum PbGoal goal,
                         enum PbOperation operation,
                         size_t project,
                         uint64_t bound,
                         const size_t *spoilers,
                         size_t num_spoilers,
                         uint8_t *witness,
                         size_t len,
                         struct PbControlResult *out);

/**
 * Exact probability that `project` wins after deleting `r` uniformly
 * random other projects, as a `num/den` string in `*out`.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum PbStatus pb_win_probability(const struct PbInstance *instance,
                                 enum PbRule rule,
                                 size_t project,
                                 size_t r,
                                 char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PB_CONTROL_H */
