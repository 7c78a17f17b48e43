#ifndef TTKIT_C_H
#define TTKIT_C_H

/* C interface to the ttkit train-track library.
 *
 * Every function returns 0 on success or a nonzero error code; on failure
 * the thread-local message from ttk_last_error_message() describes the
 * violated invariant. Out-parameters are written only on success. Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with ttk_string_free; handles with their matching *_free.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ttk_track ttk_track;
typedef struct ttk_measure ttk_measure;
typedef struct ttk_word ttk_word;
typedef struct ttk_cone ttk_cone;

/* Error codes mirror the library's internal enumeration. */
enum {
  TTK_OK = 0,
  TTK_ERR_MALFORMED_SLOTS = 1,
  TTK_ERR_UNKNOWN_BRANCH = 2,
  TTK_ERR_UNKNOWN_CURVE = 3,
  TTK_ERR_UNKNOWN_NAME = 4,
  TTK_ERR_NOT_LARGE_BRANCH = 5,
  TTK_ERR_NOT_MIXED_BRANCH = 6,
  TTK_ERR_NOT_COLLAPSIBLE = 7,
  TTK_ERR_TIE_COLLISION = 8,
  TTK_ERR_MEASURE_NOT_CARRIED = 9,
  TTK_ERR_AMBIGUOUS = 10,
  TTK_ERR_NEITHER_CARRIES = 11,
  TTK_ERR_NOT_CARRIED = 12,
  TTK_ERR_NOT_CARRIED_BY_SPLIT = 13,
  TTK_ERR_CARRIED_BY_SPLIT = 14,
  TTK_ERR_INCOMPATIBLE_LOCAL_PICTURE = 15,
  TTK_ERR_NOT_IN_CONE = 16,
  TTK_ERR_RADIUS_EXCEEDED = 17,
  TTK_ERR_EXCEPTIONAL_SURFACE = 18,
  TTK_ERR_SIGNATURE_MISMATCH = 19,
  TTK_ERR_INVALID_GLUING = 20,
  TTK_ERR_NON_TERMINATION = 21,
  TTK_ERR_PARSE = 22,
  TTK_ERR_BAD_MOVE_SEQUENCE = 23,
  TTK_ERR_INTERNAL = 24
};

const char* ttk_last_error_message(void);
void ttk_string_free(char* s);

/* tracks -------------------------------------------------------------- */
int ttk_track_load(const char* path, ttk_track** out);
int ttk_track_parse(const char* text, ttk_track** out);
int ttk_track_serialize(const ttk_track* t, char** out);
void ttk_track_free(ttk_track* t);
int ttk_catalog(const char* name, ttk_track** out);

/* report: one "key: value" line per validation flag plus any problems;
 * ok is 1 when all flags hold. Region and signature reports are text. */
int ttk_track_validate(const ttk_track* t, char** report, int* ok);
int ttk_track_regions(const ttk_track* t, char** report);
int ttk_track_recurrent(const ttk_track* t, int* recurrent, char** witness);
int ttk_track_counts(const ttk_track* t, int* switches, int* branches);
int ttk_track_signature(const ttk_track* t, int* genus, int* punctures);

/* measures and move words --------------------------------------------- */
int ttk_measure_load(const char* path, ttk_measure** out);
int ttk_measure_parse(const char* text, ttk_measure** out);
int ttk_measure_serialize(const ttk_measure* m, char** out);
void ttk_measure_free(ttk_measure* m);
int ttk_measure_check(const ttk_track* t, const ttk_measure* m, int* ok);

int ttk_word_load(const char* path, ttk_word** out);
int ttk_word_parse(const char* text, ttk_word** out);
int ttk_word_serialize(const ttk_word* w, char** out);
void ttk_word_free(ttk_word* w);
int ttk_word_length(const ttk_word* w, size_t* out);

int ttk_apply_word(const ttk_track* t, const ttk_word* w, ttk_track** out);

/* flat cones ----------------------------------------------------------- */
int ttk_cone_ball(const ttk_track* t, const ttk_measure* m, int radius,
                  ttk_cone** out);
int ttk_cone_to_json(const ttk_cone* c, char** out);
int ttk_cone_to_dot(const ttk_cone* c, char** out);
void ttk_cone_free(ttk_cone* c);

/* L1 distance between two Phi-coordinates of a serialized cone; the
 * coordinates are comma-separated integer lists like "1,0,2". Both points
 * must be vertices of the cone described by json. */
int ttk_cone_json_distance(const char* json, const char* phi_a,
                           const char* phi_b, int* out);

/* orbit invariant ------------------------------------------------------ */
int ttk_orbit_certificate(const ttk_track* t, char** hex_out);
int ttk_same_orbit(const ttk_track* a, const ttk_track* b, int* out);

/* carrying ------------------------------------------------------------- */
/* Runs the agreement procedure on a serialized carrying position with a
 * measure proxy; the report lists the base splitting word, the carried
 * word, the phase count and the final shift-equivalence certificate. */
int ttk_agree_file(const char* pos_path, const ttk_measure* m, char** report);

/* experiments ---------------------------------------------------------- */
int ttk_tt_ball(const ttk_track* t, int radius, int with_shifts, int directed,
                char** report);
int ttk_distortion(const ttk_track* t, const ttk_measure* m, int radius,
                   char** report);
int ttk_twist_growth(const ttk_track* t, int n, char** report);

#ifdef __cplusplus
}
#endif

#endif /* TTKIT_C_H */
