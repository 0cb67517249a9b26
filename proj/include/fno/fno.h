/* fno.h - C interface to the operator-learning toolkit.
 *
 * The core is a C++ library compiled into this shared object; everything is
 * exposed here through opaque handles and integer status codes so that CLIs
 * and foreign-language bindings need only a C ABI.
 *
 * Conventions:
 *   - every function returns fno_status (0 = ok); fno_last_error() describes
 *     the most recent failure on the calling thread
 *   - objects returned through out-parameters are owned by the caller and
 *     released with the matching *_destroy function
 *   - array data is double precision, row major
 */
#ifndef FNO_H
#define FNO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fno_status {
    FNO_OK = 0,
    FNO_ERR_USAGE = 1,   /* bad arguments, unknown keys, misconfiguration */
    FNO_ERR_DATA = 2,    /* malformed files, shape mismatches */
    FNO_ERR_NUMERIC = 3  /* solver blow-up, divergence, non-finite values */
} fno_status;

typedef struct fno_config fno_config;  /* run configuration (key=value) */
typedef struct fno_field fno_field;    /* dense real array + shape */
typedef struct fno_model fno_model;    /* loaded model checkpoint */

/* Message for the last error raised on this thread (empty string if none). */
const char* fno_last_error(void);

const char* fno_version(void);

/* --- configuration ----------------------------------------------------- */

fno_status fno_config_create(fno_config** out);
void fno_config_destroy(fno_config* cfg);
fno_status fno_config_load_file(fno_config* cfg, const char* path);
/* Presets for a problem kind: "burgers", "darcy" or "ns". */
fno_status fno_config_apply_kind(fno_config* cfg, const char* kind);
/* Overrides from FNO_<SECTION>_<KEY> environment variables. */
fno_status fno_config_apply_env(fno_config* cfg);
fno_status fno_config_set(fno_config* cfg, const char* key, const char* value);
fno_status fno_config_get(const fno_config* cfg, const char* key, char* buf, size_t buf_len);

/* --- fields -------------------------------------------------------------- */

fno_status fno_field_create(const int64_t* shape, int32_t rank, const double* data,
                            fno_field** out);
void fno_field_destroy(fno_field* f);
int32_t fno_field_rank(const fno_field* f);
int64_t fno_field_size(const fno_field* f);
fno_status fno_field_shape(const fno_field* f, int64_t* shape, int32_t capacity);
const double* fno_field_data(const fno_field* f);

/* --- core numerics ------------------------------------------------------ */

/* Draw from the configured Gaussian random field ([grf] section) at the given
 * resolution; the stream is (seed, index)-addressed so samples are
 * reproducible and schedule independent. */
fno_status fno_sample_grf(const fno_config* cfg, const int64_t* resolution, int32_t rank,
                          uint64_t seed, uint64_t index, fno_field** out);

/* Reference solvers ([burgers]/[darcy]/[ns] sections provide coefficients). */
fno_status fno_solve_burgers(const fno_config* cfg, const fno_field* u0, fno_field** out);
fno_status fno_solve_darcy(const fno_config* cfg, const fno_field* a, const fno_field* f,
                           fno_field** out);
/* Returns the recorded trajectory [s, s, n_frames]. */
fno_status fno_solve_ns(const fno_config* cfg, const fno_field* w0, fno_field** trajectory);

/* Binned energy spectrum (|k| = |k1|+|k2| convention); bins[i] receives the
 * energy of wavenumber i. Returns the bin count through n_bins. */
fno_status fno_energy_spectrum(const fno_field* w, double* bins, int64_t capacity,
                               int64_t* n_bins);
fno_status fno_truncation_error(const fno_field* w, int64_t kmax, double* out);

/* --- models --------------------------------------------------------------- */

fno_status fno_model_load(const char* checkpoint_path, fno_model** out);
void fno_model_destroy(fno_model* m);
int64_t fno_model_param_count(const fno_model* m);
/* Evaluation-mode forward pass; input layout [spatial..., channels]. */
fno_status fno_model_forward(const fno_model* m, const fno_field* input, fno_field** out);
/* Autoregressive rollout for the RNN variant: seed [s, s, window] ->
 * prediction [s, s, horizon]. */
fno_status fno_model_rollout(const fno_model* m, const fno_field* seed, int64_t horizon,
                             fno_field** out);

/* --- workflow runners (what the CLI subcommands call) --------------------- */

typedef struct fno_gen_report {
    int64_t n_train, n_test;
    double wall_seconds;
    int32_t n_stems;
    char stems[16][512];
} fno_gen_report;

fno_status fno_run_gen(const fno_config* cfg, const char* out_dir, fno_gen_report* report);

typedef struct fno_train_report {
    double final_train_rel_l2;
    double final_test_rel_l2;
    int64_t epochs_run;
    int64_t param_count;
    double wall_seconds;
    char checkpoint_path[512];
    char metrics_path[512];
} fno_train_report;

fno_status fno_run_train(const fno_config* cfg, const char* train_stem, const char* test_stem,
                         const char* out_dir, const char* name, const char* resume_checkpoint,
                         fno_train_report* report);

typedef struct fno_eval_report {
    int32_t n_rows;
    int64_t resolution[16];
    int64_t count[16];
    double rel_l2[16];
} fno_eval_report;

/* resolution_override 0 keeps each dataset's native resolution. */
fno_status fno_run_eval(const fno_config* cfg, const char* checkpoint, const char* const* stems,
                        int32_t n_stems, int64_t resolution_override, const char* out_csv,
                        fno_eval_report* report);

/* frame <= 0 means the last recorded frame; kmax_hi <= 0 sweeps to Nyquist. */
fno_status fno_run_analyze_spectrum(const fno_config* cfg, const char* targets_file,
                                    int64_t frame, const char* out_csv);
fno_status fno_run_analyze_truncation(const fno_config* cfg, const char* targets_file,
                                      int64_t frame, int64_t kmax_hi, const char* out_csv);

typedef struct fno_bench_report {
    double fno_median_seconds;
    double solver_median_seconds;
    double ratio;
    int64_t runs;
} fno_bench_report;

fno_status fno_run_bench(const fno_config* cfg, const char* checkpoint, const char* out_csv,
                         fno_bench_report* report);

typedef struct fno_obs_report {
    double sigma_noise;
    char obs_path[512];
} fno_obs_report;

fno_status fno_run_make_observations(const fno_config* cfg, const char* out_path,
                                     fno_obs_report* report);

typedef struct fno_invert_report {
    double acceptance_rate;
    int64_t forward_calls;
    double posterior_misfit;
    double prior_misfit;
    char mean_path[512];
    char chain_csv[512];
} fno_invert_report;

fno_status fno_run_invert(const fno_config* cfg, const char* obs_file, const char* out_dir,
                          const char* tag, fno_invert_report* report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FNO_H */
