#ifndef SEMREL_H
#define SEMREL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes.
typedef enum SemrelStatus {
  SEMREL_STATUS_OK = 0,
  SEMREL_STATUS_NULL_ARGUMENT = 1,
  SEMREL_STATUS_INVALID_UTF8 = 2,
  SEMREL_STATUS_PARSE_ERROR = 3,
  SEMREL_STATUS_IO_ERROR = 4,
  SEMREL_STATUS_WORD_NOT_IN_NETWORK = 5,
  SEMREL_STATUS_EMPTY_INPUT = 6,
  SEMREL_STATUS_INVALID_ARGUMENT = 7,
  SEMREL_STATUS_MISSING_RESOURCE = 8,
  SEMREL_STATUS_PANIC = 9,
} SemrelStatus;

// Classification mode for [`semrel_classify`].
typedef enum SemrelMode {
  // Network relatedness only.
  SEMREL_MODE_RUN1 = 1,
  // Network relatedness, distributional similarity as fallback.
  SEMREL_MODE_RUN2 = 2,
  // Both features combined.
  SEMREL_MODE_RUN3 = 3,
} SemrelMode;

// Frequent-collocation sets for context classification.
typedef struct SemrelCollocations SemrelCollocations;

// Collocation counts from a corpus or count file.
typedef struct SemrelCounts SemrelCounts;

// A loaded semantic network.
typedef struct SemrelNetwork SemrelNetwork;

// Features and label for one phrase in context.
typedef struct SemrelContextResult {
  uint8_t fc;
  double srb;
  double sra;
  bool figurative;
} SemrelContextResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *semrel_last_error_message(void);

// Loads an edge file.
//
// # Safety
// `path` is a NUL-terminated string; `out` is writable.
enum SemrelStatus semrel_network_load(const char *path, struct SemrelNetwork **out);

// # Safety
// `net` is null or a handle from [`semrel_network_load`], not yet freed.
void semrel_network_free(struct SemrelNetwork *net);

// # Safety
// `net` is a live handle; out pointers are writable.
enum SemrelStatus semrel_network_counts(const struct SemrelNetwork *net,
                                        uintptr_t *out_nodes,
                                        uintptr_t *out_edges);

// Capped least-cost path between two words, default parameters.
//
// # Safety
// `net` is a live handle; strings are NUL-terminated; out pointers are
// writable.
enum SemrelStatus semrel_shortest_path(const struct SemrelNetwork *net,
                                       const char *source,
                                       const char *target,
                                       uint32_t *out_cost,
                                       bool *out_capped);

// Relatedness of a word to a whitespace-separated phrase.
//
// # Safety
// `net` is a live handle; strings are NUL-terminated; `out` is writable.
enum SemrelStatus semrel_relatedness(const struct SemrelNetwork *net,
                                     const char *word,
                                     const char *phrase,
                                     double *out);

// Counts collocations in a tokenized corpus. `window` 0 means the default.
//
// # Safety
// `path` is NUL-terminated; `out` is writable.
enum SemrelStatus semrel_counts_from_corpus(const char *path,
                                            uintptr_t window,
                                            struct SemrelCounts **out);

// Loads a `target<TAB>context<TAB>count` file.
//
// # Safety
// `path` is NUL-terminated; `out` is writable.
enum SemrelStatus semrel_counts_load(const char *path, struct SemrelCounts **out);

// # Safety
// `counts` is null or a live handle, not yet freed.
void semrel_counts_free(struct SemrelCounts *counts);

// Distributional similarity of a word to a phrase. `top_k` 0 means the
// default.
//
// # Safety
// `counts` is a live handle; strings are NUL-terminated; `out` is
// writable.
enum SemrelStatus semrel_dist_similarity(const struct SemrelCounts *counts,
                                         const char *word,
                                         const char *phrase,
                                         uintptr_t top_k,
                                         double *out);

// Labels a word-phrase pair. `counts` may be null for `Run1`. A word
// missing from the network leaves the network feature absent.
//
// # Safety
// `net` is a live handle; `counts` is null or a live handle; strings are
// NUL-terminated; `out_positive` is writable.
enum SemrelStatus semrel_classify(const struct SemrelNetwork *net,
                                  const struct SemrelCounts *counts,
                                  const char *word,
                                  const char *phrase,
                                  enum SemrelMode mode,
                                  uintptr_t top_k,
                                  bool *out_positive);

// Loads collocation sets written by the `context --save-collocations`
// command.
//
// # Safety
// `path` is NUL-terminated; `out` is writable.
enum SemrelStatus semrel_collocations_load(const char *path, struct SemrelCollocations **out);

// # Safety
// `sets` is null or a live handle, not yet freed.
void semrel_collocations_free(struct SemrelCollocations *sets);

// Literal or figurative use of the phrase at tokens `[start, end)` of a
// whitespace-tokenized sentence. `sets` may be null (no frequent
// collocations).
//
// # Safety
// `net` is a live handle; `sets` is null or a live handle; strings are
// NUL-terminated; `out` is writable.
enum SemrelStatus semrel_context_classify(const struct SemrelNetwork *net,
                                          const struct SemrelCollocations *sets,
                                          const char *phrase,
                                          const char *sentence,
                                          uintptr_t start,
                                          uintptr_t end,
                                          struct SemrelContextResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMREL_H */
