#ifndef IFOL_H
#define IFOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum IfolStatus {
  IFOL_STATUS_OK = 0,
  IFOL_STATUS_NULL_ARGUMENT = 1,
  IFOL_STATUS_INVALID_UTF8 = 2,
  IFOL_STATUS_IO = 3,
  IFOL_STATUS_PARSE = 4,
  IFOL_STATUS_COMMAND = 5,
  IFOL_STATUS_ENGINE = 6,
  IFOL_STATUS_PANIC = 7,
} IfolStatus;

/*
 Three-valued answer to a query.
 */
typedef enum IfolAnswer {
  IFOL_ANSWER_YES = 0,
  IFOL_ANSWER_NO = 1,
  IFOL_ANSWER_UNKNOWN = 2,
} IfolAnswer;

/*
 Opaque session handle.
 */
typedef struct IfolSession IfolSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates an empty session. Returns null only if allocation panics.
 */
struct IfolSession *ifol_session_new(void);

/*
 Releases a session. Null is ignored.

 # Safety
 `session` must come from [`ifol_session_new`] and not be used afterwards.
 */
void ifol_session_free(struct IfolSession *session);

/*
 Loads a knowledge-base file into the session. Relative `corpus` and
 `templates` directives resolve against the file's directory.

 # Safety
 `session` must be a live handle and `path` a nul-terminated string.
 */
enum IfolStatus ifol_session_load_kb(struct IfolSession *session, const char *path);

/*
 Executes one command line. The output, possibly empty, is written to
 `*out` when `out` is not null.

 # Safety
 `session` must be a live handle, `line` a nul-terminated string and `out`
 either null or writable.
 */
enum IfolStatus ifol_session_execute(struct IfolSession *session, const char *line, char **out);

/*
 Evaluates a formula in the current world. A sentence yields `true` or
 `false`; an open formula yields its satisfying assignments.

 # Safety
 `session` must be a live handle, `formula` a nul-terminated string and
 `out` writable.
 */
enum IfolStatus ifol_session_eval(struct IfolSession *session, const char *formula, char **out);

/*
 Answers a query against memory and the world.

 # Safety
 `session` must be a live handle, `query` a nul-terminated string and
 `out` writable.
 */
enum IfolStatus ifol_session_answer(struct IfolSession *session,
                                    const char *query,
                                    enum IfolAnswer *out);

/*
 Runs forward chaining with the given introspection budget. The number
 of atoms added is written to `*added` when it is not null.

 # Safety
 `session` must be a live handle and `added` either null or writable.
 */
enum IfolStatus ifol_session_chain(struct IfolSession *session, uintptr_t budget, uintptr_t *added);

/*
 The message of the last failed call on this handle, or null. The
 pointer stays valid until the next call on the same handle.

 # Safety
 `session` must be null or a live handle.
 */
const char *ifol_session_last_error(const struct IfolSession *session);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void ifol_string_free(char *s);

/*
 Library version as a static nul-terminated string.
 */
const char *ifol_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IFOL_H */
