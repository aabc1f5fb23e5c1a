#ifndef BIVOCAB_H
#define BIVOCAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BivocabStatus {
  BIVOCAB_STATUS_OK = 0,
  BIVOCAB_STATUS_NULL_ARGUMENT = 1,
  BIVOCAB_STATUS_INVALID_UTF8 = 2,
  BIVOCAB_STATUS_IO = 3,
  BIVOCAB_STATUS_INVALID_MODEL = 4,
  BIVOCAB_STATUS_INVALID_EMBEDDINGS = 5,
  BIVOCAB_STATUS_BUFFER_TOO_SMALL = 6,
  BIVOCAB_STATUS_ID_OUT_OF_RANGE = 7,
  BIVOCAB_STATUS_EMPTY_INPUT = 8,
  BIVOCAB_STATUS_PANIC = 9,
} BivocabStatus;

/*
 Loaded embedding matrix.
 */
typedef struct BivocabEmbeddings BivocabEmbeddings;

/*
 Loaded tokenizer.
 */
typedef struct BivocabModel BivocabModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *bivocab_version(void);

/*
 Message for the last failed call on this thread, or NULL. Valid until
 the next call on the same thread.
 */
const char *bivocab_last_error(void);

/*
 Loads a TFV1 model (and its metadata sidecar, if any) from `path`.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BivocabStatus bivocab_model_load(const char *path, struct BivocabModel **out);

/*
 Parses a TFV1 model held in memory.

 # Safety
 `data` must point to `len` readable bytes and `out` be valid.
 */
enum BivocabStatus bivocab_model_from_tfv1(const uint8_t *data,
                                           size_t len,
                                           struct BivocabModel **out);

/*
 # Safety
 `m` must come from a `bivocab_model_*` constructor, or be NULL.
 */
void bivocab_model_free(struct BivocabModel *m);

/*
 Number of entries, 0 for NULL.

 # Safety
 `m` must be a live handle or NULL.
 */
size_t bivocab_model_vocab_size(const struct BivocabModel *m);

/*
 Tokenizes `len` bytes of UTF-8 text into `ids` (capacity `cap`).

 # Safety
 Pointers must be valid for the given lengths.
 */
enum BivocabStatus bivocab_tokenize(const struct BivocabModel *m,
                                    const uint8_t *text,
                                    size_t len,
                                    uint32_t *ids,
                                    size_t cap,
                                    size_t *out_len);

/*
 Writes the UTF-8 text for `n` ids into `buf` (capacity `cap` bytes, no
 terminator).

 # Safety
 Pointers must be valid for the given lengths.
 */
enum BivocabStatus bivocab_detokenize(const struct BivocabModel *m,
                                      const uint32_t *ids,
                                      size_t n,
                                      uint8_t *buf,
                                      size_t cap,
                                      size_t *out_len);

/*
 Tokens per word over newline-separated documents.

 # Safety
 Pointers must be valid for the given lengths.
 */
enum BivocabStatus bivocab_fertility(const struct BivocabModel *m,
                                     const uint8_t *text,
                                     size_t len,
                                     double *out);

/*
 Loads an EMB1 matrix.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BivocabStatus bivocab_embeddings_load(const char *path, struct BivocabEmbeddings **out);

/*
 # Safety
 `e` must come from [`bivocab_embeddings_load`], or be NULL.
 */
void bivocab_embeddings_free(struct BivocabEmbeddings *e);

/*
 Writes rows and dims; either pointer may be NULL.

 # Safety
 `e` must be a live handle.
 */
enum BivocabStatus bivocab_embeddings_shape(const struct BivocabEmbeddings *e,
                                            size_t *rows,
                                            size_t *dims);

/*
 Copies row `row` into `buf` (capacity `cap` floats).

 # Safety
 Pointers must be valid for the given lengths.
 */
enum BivocabStatus bivocab_embeddings_row(const struct BivocabEmbeddings *e,
                                          size_t row,
                                          float *buf,
                                          size_t cap,
                                          size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIVOCAB_H */
