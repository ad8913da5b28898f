/* Public C API for the bansa library: attention-uncertainty scoring and
 * noise-seed selection on the built-in deterministic diffusion simulator.
 *
 * All functions return a bansa_status; outputs are written through pointer
 * arguments. Strings returned through char** are heap-allocated and must be
 * released with bansa_string_free(). On failure, bansa_last_error() gives a
 * thread-local description of what went wrong.
 */
#ifndef BANSA_H
#define BANSA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bansa_status {
    BANSA_OK = 0,
    /* validation (CLI exit code 1) */
    BANSA_ERR_INVALID_INPUT = 1,
    BANSA_ERR_SHAPE = 2,
    BANSA_ERR_DEGENERATE_CORRELATION = 3,
    BANSA_ERR_INSUFFICIENT_POOL = 4,
    BANSA_ERR_CONFIG = 5,
    /* file and format problems (CLI exit code 2) */
    BANSA_ERR_BAD_MAGIC = 6,
    BANSA_ERR_BAD_VERSION = 7,
    BANSA_ERR_TRUNCATED_PAYLOAD = 8,
    BANSA_ERR_DIM_OVERFLOW = 9,
    BANSA_ERR_IO = 10,
    /* broken invariants (CLI exit code 3) */
    BANSA_ERR_INTERNAL = 11
} bansa_status;

const char* bansa_version(void);

/* Message for the most recent failure on this thread. */
const char* bansa_last_error(void);

/* Process exit code category for a status: 0, 1, 2 or 3. */
int bansa_exit_code(bansa_status status);

void bansa_string_free(char* text);

/* ---- tensor container ------------------------------------------------- */

typedef struct bansa_tensor bansa_tensor;

bansa_status bansa_tensor_create(uint16_t rank, const uint64_t* dims, const double* data,
                                 bansa_tensor** out);
bansa_status bansa_tensor_read(const char* path, bansa_tensor** out);
bansa_status bansa_tensor_write(const bansa_tensor* tensor, const char* path);
uint16_t bansa_tensor_rank(const bansa_tensor* tensor);
uint64_t bansa_tensor_dim(const bansa_tensor* tensor, uint16_t axis);
uint64_t bansa_tensor_element_count(const bansa_tensor* tensor);
const double* bansa_tensor_data(const bansa_tensor* tensor);
void bansa_tensor_free(bansa_tensor* tensor);

/* ---- scoring ----------------------------------------------------------- */

/* Stochastic attention-uncertainty score of one row-stochastic map (rank-2
 * tensor): k Bernoulli-masked samples with the given drop probability,
 * entropy of the mean sample minus mean per-sample entropy. */
bansa_status bansa_score_map(const bansa_tensor* map, uint32_t k, double drop_prob,
                             uint64_t stream_seed, double* score_out);

/* Same computation, returned as the canonical JSON score record. */
bansa_status bansa_score_record(const bansa_tensor* map, uint32_t k, double drop_prob,
                                uint64_t stream_seed, char** json_out);

/* ---- pipeline entry points ---------------------------------------------
 * Configs are JSON files; see the project README for the schema. Identical
 * inputs produce byte-identical report payloads. */

/* Scores the configured seed pool, selects the extremum, rolls it out and
 * writes report.json plus output tensors into out_dir. */
bansa_status bansa_select(const char* config_path, const char* out_dir,
                          char** report_path_out);

/* Offline depth calibration: per-layer scores, correlation curve and the
 * chosen truncation depth. Writes report and a (depth, correlation) TSV. */
bansa_status bansa_probe_layers(const char* config_path, const char* out_dir,
                                char** report_path_out, char** curve_path_out);

/* Group metrics over tensor files (rank-2 attention maps or rank-3
 * trajectories): intra/cross distances, filtered trajectory variation,
 * intra-frame variance. group_b may be NULL/empty. */
bansa_status bansa_analyze_files(const char* const* group_a, size_t count_a,
                                 const char* const* group_b, size_t count_b,
                                 double cutoff, char** json_out);

/* Replays the run embedded in a selection report and compares its extreme
 * seeds: masked-attention dispersion and latent trajectory metrics. */
bansa_status bansa_analyze_report(const char* report_path, char** json_out);

/* Brute-force verification suite; one line per check. Returns BANSA_OK even
 * when checks fail; *failures_out carries the count. */
bansa_status bansa_oracle(char** text_out, int* failures_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BANSA_H */
