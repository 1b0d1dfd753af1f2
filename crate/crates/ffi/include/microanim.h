#ifndef MICROANIM_H
#define MICROANIM_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. The values 0 to 4 match the command-line exit codes.
 */
typedef enum {
  MA_STATUS_OK = 0,
  MA_STATUS_PARSE_ERROR = 1,
  MA_STATUS_INSPECT_ERROR = 2,
  MA_STATUS_OUT_OF_TIME = 3,
  MA_STATUS_RUNTIME_ERROR = 4,
  MA_STATUS_NULL_ARGUMENT = 5,
  MA_STATUS_INVALID_ARGUMENT = 6,
  MA_STATUS_PANIC = 7,
} MaStatus;

/*
 A running animation: the current state plus what is left to play.
 */
typedef struct MaPlayer MaPlayer;

/*
 A loaded scenario.
 */
typedef struct MaScenario MaScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next call into this library on the same thread.
 */
const char *ma_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *ma_version(void);

/*
 Parses a scenario from NUL-terminated JSON. On success `*out` receives
 a handle to free with [`ma_scenario_free`].

 # Safety
 `json` must be NULL or a valid NUL-terminated string; `out` must be
 NULL or writable.
 */
MaStatus ma_scenario_load(const char *json, MaScenario **out);

/*
 # Safety
 `scenario` must be NULL or a handle from [`ma_scenario_load`] not yet freed.
 */
void ma_scenario_free(MaScenario *scenario);

/*
 Exact duration in seconds.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
MaStatus ma_scenario_duration(const MaScenario *scenario, double *out);

/*
 Maximum duration in seconds over all conditional branches.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
MaStatus ma_scenario_max_duration(const MaScenario *scenario, double *out);

/*
 Runs the scenario at `fps` for at most `max_time` seconds and stores
 the JSON-lines frame trace in `*out_trace` (free with
 [`ma_string_free`]). Returns `MA_STATUS_OUT_OF_TIME` with a trace when
 the animation did not finish.

 # Safety
 `scenario` must be a live handle and `out_trace` writable.
 */
MaStatus ma_scenario_run_trace(const MaScenario *scenario,
                               double fps,
                               double max_time,
                               char **out_trace);

/*
 Starts playing a scenario from its initial state. Returns NULL if
 `scenario` is NULL. The player does not borrow the scenario.

 # Safety
 `scenario` must be NULL or a live handle.
 */
MaPlayer *ma_player_new(const MaScenario *scenario);

/*
 # Safety
 `player` must be NULL or a handle from [`ma_player_new`] not yet freed.
 */
void ma_player_free(MaPlayer *player);

/*
 Advances by `dt` seconds. `*out_done` (if not NULL) is set when the
 animation has finished. Stepping a finished player is a no-op.

 # Safety
 `player` must be a live handle; `out_done` NULL or writable.
 */
MaStatus ma_player_step(MaPlayer *player, double dt, bool *out_done);

/*
 Total time supplied to [`ma_player_step`] so far; NaN for NULL.

 # Safety
 `player` must be NULL or a live handle.
 */
double ma_player_elapsed(const MaPlayer *player);

/*
 Reads a number leaf of the current state.

 # Safety
 `player` must be a live handle, `path` a NUL-terminated string and
 `out` writable.
 */
MaStatus ma_player_get_number(const MaPlayer *player, const char *path, double *out);

/*
 Overwrites a number leaf of the current state, as the host application
 would between frames.

 # Safety
 `player` must be a live handle and `path` a NUL-terminated string.
 */
MaStatus ma_player_set_number(MaPlayer *player, const char *path, double value);

/*
 The current state as a JSON string (free with [`ma_string_free`]), or
 NULL if `player` is NULL.

 # Safety
 `player` must be NULL or a live handle.
 */
char *ma_player_state_json(const MaPlayer *player);

/*
 # Safety
 `s` must be NULL or a string returned by this library, not yet freed.
 */
void ma_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MICROANIM_H */
