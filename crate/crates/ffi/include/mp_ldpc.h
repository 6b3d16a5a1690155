#ifndef MP_LDPC_H
#define MP_LDPC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum MplStatus {
  MPL_STATUS_OK = 0,
  MPL_STATUS_NULL_POINTER = 1,
  MPL_STATUS_INVALID_ARGUMENT = 2,
  MPL_STATUS_DIMENSION_MISMATCH = 3,
  MPL_STATUS_PARSE_ERROR = 4,
  MPL_STATUS_IO_ERROR = 5,
  MPL_STATUS_PANIC = 6,
} MplStatus;

typedef enum MplFlipMode {
  MPL_FLIP_MODE_MULTI = 0,
  MPL_FLIP_MODE_SINGLE = 1,
} MplFlipMode;

typedef enum MplDecoderKind {
  MPL_DECODER_KIND_MP_XOR_SAT = 0,
  MPL_DECODER_KIND_SPA = 1,
  MPL_DECODER_KIND_GDBF = 2,
} MplDecoderKind;

typedef enum MplTransmit {
  MPL_TRANSMIT_ALL_ZERO = 0,
  MPL_TRANSMIT_RANDOM_CODEWORD = 1,
} MplTransmit;

/**
 * Opaque parity-check code with its generator basis.
 */
typedef struct MplCode MplCode;

/**
 * MP-XOR-SAT settings. `tau <= 0` selects the number of checks.
 */
typedef struct MplMpParams {
  double tau;
  double theta;
  double eta;
  uint32_t i_max;
  double q_min;
  enum MplFlipMode flip_mode;
  bool clamp_q;
  bool reset_q_on_flip;
  bool normalize;
  bool llr_input;
} MplMpParams;

typedef struct MplSpaParams {
  uint32_t i_max;
  double llr_clip;
} MplSpaParams;

typedef struct MplGdbfParams {
  uint32_t i_max;
  double theta;
  enum MplFlipMode flip_mode;
} MplGdbfParams;

/**
 * Decoder selection for simulations; only the member named by `kind` is read.
 */
typedef struct MplDecoderConfig {
  enum MplDecoderKind kind;
  struct MplMpParams mp;
  struct MplSpaParams spa;
  struct MplGdbfParams gdbf;
} MplDecoderConfig;

typedef struct MplDecodeInfo {
  uint32_t iterations;
  bool converged;
} MplDecodeInfo;

typedef struct MplSimOptions {
  double snr_db;
  uint64_t frame_errors;
  uint64_t max_frames;
  uint64_t seed;
  enum MplTransmit transmit;
  uint32_t workers;
} MplSimOptions;

typedef struct MplSimRecord {
  double snr_db;
  uint64_t frames;
  uint64_t bit_errors;
  uint64_t frame_errors;
  double ber;
  double fer;
  double mean_iterations;
  uint64_t match_count;
  uint64_t valid_mismatch_count;
  uint64_t invalid_count;
} MplSimRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into this library from the same thread.
 */
const char *mpl_last_error_message(void);

/**
 * Builtin code by name: "majority", "hamming74" or "reg32".
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` writable.
 */
enum MplStatus mpl_code_builtin(const char *name, struct MplCode **out);

/**
 * Parses alist text.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum MplStatus mpl_code_parse_alist(const char *text, struct MplCode **out);

/**
 * Reads an alist file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
enum MplStatus mpl_code_read_alist(const char *path, struct MplCode **out);

/**
 * Random column-regular code; identical seeds give identical matrices.
 *
 * # Safety
 * `out` must be writable.
 */
enum MplStatus mpl_code_random_regular(size_t m,
                                       size_t n,
                                       size_t col_degree,
                                       uint64_t seed,
                                       struct MplCode **out);

/**
 * # Safety
 * `code` must come from this library and not be used afterwards. NULL is ignored.
 */
void mpl_code_free(struct MplCode *code);

/**
 * Block length N, check count M and dimension k = N - rank.
 *
 * # Safety
 * `code` must be a live handle; output pointers may be NULL.
 */
enum MplStatus mpl_code_dims(const struct MplCode *code, size_t *n, size_t *m, size_t *k);

/**
 * Serializes to alist text; release with `mpl_string_free`.
 *
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum MplStatus mpl_code_to_alist(const struct MplCode *code, char **out);

/**
 * # Safety
 * `s` must come from this library. NULL is ignored.
 */
void mpl_string_free(char *s);

/**
 * Syndrome of a 0/1 word of length N into `syndrome` of length M.
 *
 * # Safety
 * `bits` must hold `n` bytes and `syndrome` `m` bytes.
 */
enum MplStatus mpl_code_syndrome(const struct MplCode *code,
                                 const uint8_t *bits,
                                 size_t n,
                                 uint8_t *syndrome,
                                 size_t m);

struct MplMpParams mpl_mp_params_default(void);

struct MplSpaParams mpl_spa_params_default(void);

struct MplGdbfParams mpl_gdbf_params_default(void);

/**
 * Defaults for every decoder with `kind` selected.
 */
struct MplDecoderConfig mpl_decoder_config_default(enum MplDecoderKind kind);

/**
 * Decodes channel output `r` (length N) into 0/1 `bits` (length N).
 * `sigma` is only read when `params->llr_input` is set. `info` may be NULL.
 *
 * # Safety
 * `r` and `bits` must hold `n` elements; other pointers must be valid.
 */
enum MplStatus mpl_decode_mpxorsat(const struct MplCode *code,
                                   const struct MplMpParams *params,
                                   const double *r,
                                   size_t n,
                                   double sigma,
                                   uint8_t *bits,
                                   struct MplDecodeInfo *info);

/**
 * Sum-product decoding with channel LLRs `2 r / sigma^2`.
 *
 * # Safety
 * As for `mpl_decode_mpxorsat`.
 */
enum MplStatus mpl_decode_spa(const struct MplCode *code,
                              const struct MplSpaParams *params,
                              const double *r,
                              size_t n,
                              double sigma,
                              uint8_t *bits,
                              struct MplDecodeInfo *info);

/**
 * Gradient-descent bit flipping.
 *
 * # Safety
 * As for `mpl_decode_mpxorsat`.
 */
enum MplStatus mpl_decode_gdbf(const struct MplCode *code,
                               const struct MplGdbfParams *params,
                               const double *r,
                               size_t n,
                               uint8_t *bits,
                               struct MplDecodeInfo *info);

/**
 * Margin-propagation offset of `y` with margin `tau`, and optionally the
 * probability scores (`scores` may be NULL, otherwise `len` entries).
 *
 * # Safety
 * `y` must hold `len` values and `zeta` be writable.
 */
enum MplStatus mpl_margin_propagation(const double *y,
                                      size_t len,
                                      double tau,
                                      double *zeta,
                                      double *scores);

/**
 * Runs one Monte-Carlo point. Results depend only on the code, decoder,
 * SNR, stop rule, seed and transmit mode.
 *
 * # Safety
 * All pointers must be valid.
 */
enum MplStatus mpl_simulate_point(const struct MplCode *code,
                                  const struct MplDecoderConfig *decoder,
                                  const struct MplSimOptions *options,
                                  struct MplSimRecord *record);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MP_LDPC_H */
