#ifndef RETRO_C_API_H
#define RETRO_C_API_H

/* C-compatible surface for driving a decode session from a host runtime.
 *
 * A handle wraps one per-sequence session. The host owns token selection:
 * it calls retro_process with its raw logits and the token it emitted last,
 * and receives the masked, bonus-adjusted logits for the next step.
 *
 * Every function returns RETRO_OK or an error code; the message of the most
 * recent failure on the calling thread is available from retro_last_error.
 * A handle must not be used from two threads at once; distinct handles are
 * independent. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int64_t retro_handle;

enum {
  RETRO_OK = 0,
  RETRO_INPUT_ERROR = 1,  /* bad argument, wrong length, token outside the mask */
  RETRO_STATE_ERROR = 2,  /* unknown or closed handle, finished session */
  RETRO_FORMAT_ERROR = 3, /* index files missing, corrupt or from another version */
  RETRO_INTERNAL_ERROR = 4
};

/* Opens a session over the index directory. config_json may be NULL or a
 * JSON object with decoder config keys. */
int retro_open(const char* index_dir, const char* query, const char* config_json, retro_handle* out);

/* Extended vocabulary size (corpus ids plus the six stage markers). */
int retro_vocab_size(retro_handle h, uint32_t* out);

/* JSON table {"corpus_vocab", "extended_vocab", "tokens": [...], "specials": {...}}.
 * Release with retro_free_string. */
int retro_vocab_json(retro_handle h, char** out);

/* Advances with last_token (pass -1 before the first token), then writes
 * the adjusted logits for the next step into out[0..n). raw and out must
 * both hold exactly the extended vocabulary size. Masked entries are
 * -FLT_MAX; when last_token finishes the session every entry is masked.
 * A rejected call leaves the session unchanged. */
int retro_process(retro_handle h, const float* raw, size_t n, int64_t last_token, float* out);

/* Current stage: "clue", "evidence", "answer" or "finished". The pointer is
 * static and must not be freed. */
int retro_stage(retro_handle h, const char** out);

/* Releases the handle and returns the structured output accumulated so far
 * as JSON (release with retro_free_string). Closing twice is a state error. */
int retro_close(retro_handle h, char** out_json);

void retro_free_string(char* s);

/* Message for the last failure on this thread; empty after success. */
const char* retro_last_error(void);

#ifdef __cplusplus
}
#endif

#endif
