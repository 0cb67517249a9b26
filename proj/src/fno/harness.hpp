#pragma once

#include "fno/dataset.hpp"
#include "fno/mcmc.hpp"
#include "fno/run_config.hpp"
#include "fno/training.hpp"

namespace fno {

// dataset generation -----------------------------------------------------

struct GenReport {
    std::vector<std::string> stems; // one per split x resolution
    int64_t n_train = 0, n_test = 0;
    double wall_seconds = 0.0;
};

/// Generate the configured problem's train/test datasets at the native
/// resolution plus any companion resolutions (strided downsampling), with
/// provenance sidecars. Parallel across samples; per-sample RNG streams make
/// the result schedule independent.
GenReport run_gen(const RunConfig& cfg, const std::string& out_dir);

// training / evaluation ----------------------------------------------------

struct TrainReport {
    std::string checkpoint_path;
    std::string metrics_path;
    double final_train_rel_l2 = 0.0;
    double final_test_rel_l2 = 0.0;
    int64_t epochs_run = 0;
    int64_t param_count = 0;
    double wall_seconds = 0.0;
};

TrainReport run_train(const RunConfig& cfg, const std::string& train_stem,
                      const std::string& test_stem, const std::string& out_dir,
                      const std::string& name, const std::string& resume_path = "");

struct EvalRow {
    std::string stem;
    Shape resolution;
    int64_t count = 0;
    double rel_l2 = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

/// Evaluate a checkpoint on one or more dataset stems; an optional resolution
/// override downsamples each dataset to the requested extent first (the
/// super-resolution path needs no override: stems at finer resolutions are
/// evaluated directly with the same parameters).
EvalReport run_eval(const RunConfig& cfg, const std::string& checkpoint,
                    const std::vector<std::string>& stems, int64_t resolution_override = 0,
                    const std::string& out_csv = "");

// analysis -------------------------------------------------------------

/// Mean energy spectrum of a trajectory frame over all samples, with the
/// k^{-5/3} reference column anchored at the first inertial bin. frame <= 0
/// means the last recorded frame.
void run_analyze_spectrum(const RunConfig& cfg, const std::string& targets_file, int64_t frame,
                          const std::string& out_csv);

/// Mean truncation-error sweep kmax = 0..kmax_hi over samples of a trajectory
/// frame.
void run_analyze_truncation(const RunConfig& cfg, const std::string& targets_file, int64_t frame,
                            int64_t kmax_hi, const std::string& out_csv);

// benchmarking / inversion ----------------------------------------------

struct BenchReport {
    double fno_median_seconds = 0.0;
    double solver_median_seconds = 0.0;
    double ratio = 0.0;
    int64_t runs = 0;
};

BenchReport run_bench(const RunConfig& cfg, const std::string& checkpoint,
                      const std::string& out_csv = "");

struct ObsReport {
    std::string obs_path;
    double sigma_noise = 0.0;
};

ObsReport run_make_observations(const RunConfig& cfg, const std::string& out_path);

struct InvertReport {
    double acceptance_rate = 0.0;
    int64_t forward_calls = 0;
    double posterior_misfit = 0.0; // rms data misfit of the pushed posterior mean
    double prior_misfit = 0.0;     // rms data misfit of the prior mean (zero field)
    std::string mean_path;
    std::string chain_csv;
};

InvertReport run_invert(const RunConfig& cfg, const std::string& obs_path,
                        const std::string& out_dir, const std::string& tag);

// checkpoints ------------------------------------------------------------

void save_checkpoint(const std::string& path, const FnoModel& model, const AdamState& adam,
                     int64_t epoch_completed, uint64_t config_hash);

struct Checkpoint {
    FnoModel model;
    AdamState adam;
    int64_t epoch_completed = -1;
    uint64_t config_hash = 0;
};

Checkpoint load_checkpoint(const std::string& path);

/// Model hyperparameters from the [model] config section.
FnoConfig model_config_from(const RunConfig& cfg);
GrfSpec grf_spec_from(const RunConfig& cfg);

} // namespace fno
