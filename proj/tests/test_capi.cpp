// Exercises the shared-library surface the way an external client would:
// only fno.h, opaque handles and status codes.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "fno/fno.h"

namespace fs = std::filesystem;

static int failures = 0;

#define EXPECT(cond)                                                     \
    do {                                                                 \
        if (!(cond)) {                                                   \
            std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);  \
            ++failures;                                                  \
        }                                                                \
    } while (0)

int main() {
    EXPECT(std::strlen(fno_version()) > 0);

    // configuration lifecycle + error reporting
    fno_config* cfg = nullptr;
    EXPECT(fno_config_create(&cfg) == FNO_OK);
    EXPECT(fno_config_apply_kind(cfg, "burgers") == FNO_OK);
    EXPECT(fno_config_set(cfg, "train.epochs", "2") == FNO_OK);
    EXPECT(fno_config_set(cfg, "nonsense.key", "1") == FNO_ERR_USAGE);
    EXPECT(std::strlen(fno_last_error()) > 0);
    char buf[64];
    EXPECT(fno_config_get(cfg, "train.epochs", buf, sizeof buf) == FNO_OK);
    EXPECT(std::strcmp(buf, "2") == 0);

    // fields and the GRF sampler
    int64_t res[1] = {64};
    fno_field* u0 = nullptr;
    EXPECT(fno_sample_grf(cfg, res, 1, 7, 0, &u0) == FNO_OK);
    EXPECT(fno_field_rank(u0) == 1);
    EXPECT(fno_field_size(u0) == 64);
    fno_field* u0_again = nullptr;
    EXPECT(fno_sample_grf(cfg, res, 1, 7, 0, &u0_again) == FNO_OK);
    EXPECT(std::memcmp(fno_field_data(u0), fno_field_data(u0_again), 64 * sizeof(double)) == 0);

    // a solver call through the C surface; mean conservation as the sanity check
    EXPECT(fno_config_set(cfg, "burgers.dt_max", "1e-3") == FNO_OK);
    EXPECT(fno_config_set(cfg, "burgers.t_final", "0.1") == FNO_OK);
    fno_field* u1 = nullptr;
    EXPECT(fno_solve_burgers(cfg, u0, &u1) == FNO_OK);
    double mean0 = 0, mean1 = 0;
    for (int i = 0; i < 64; ++i) {
        mean0 += fno_field_data(u0)[i];
        mean1 += fno_field_data(u1)[i];
    }
    EXPECT(std::abs(mean0 - mean1) / 64.0 < 1e-10);

    // spectral helpers
    {
        int64_t shape[2] = {16, 16};
        double data[256];
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) data[i * 16 + j] = std::sin(2.0 * M_PI * i / 16.0);
        fno_field* w = nullptr;
        EXPECT(fno_field_create(shape, 2, data, &w) == FNO_OK);
        double bins[32] = {0};
        int64_t n_bins = 0;
        EXPECT(fno_energy_spectrum(w, bins, 32, &n_bins) == FNO_OK);
        EXPECT(n_bins >= 2);
        EXPECT(std::abs(bins[1] - 0.5) < 1e-12);
        double err = 0.0;
        EXPECT(fno_truncation_error(w, 0, &err) == FNO_OK);
        EXPECT(err > 0.99);
        fno_field_destroy(w);
    }

    // a miniature end-to-end workflow: gen -> train -> load -> forward
    fs::path tmp = "capi_test_tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    EXPECT(fno_config_set(cfg, "data.n_train", "4") == FNO_OK);
    EXPECT(fno_config_set(cfg, "data.n_test", "2") == FNO_OK);
    EXPECT(fno_config_set(cfg, "data.resolution", "64") == FNO_OK);
    EXPECT(fno_config_set(cfg, "model.width", "6") == FNO_OK);
    EXPECT(fno_config_set(cfg, "model.kmax", "4") == FNO_OK);
    EXPECT(fno_config_set(cfg, "model.layers", "2") == FNO_OK);
    EXPECT(fno_config_set(cfg, "model.q_hidden", "8") == FNO_OK);
    EXPECT(fno_config_set(cfg, "train.batch", "2") == FNO_OK);
    EXPECT(fno_config_set(cfg, "run.threads", "2") == FNO_OK);

    fno_gen_report gen_report;
    EXPECT(fno_run_gen(cfg, tmp.string().c_str(), &gen_report) == FNO_OK);
    EXPECT(gen_report.n_train == 4);
    EXPECT(gen_report.n_stems == 2);

    std::string train_stem = (tmp / "burgers_train_s64").string();
    std::string test_stem = (tmp / "burgers_test_s64").string();
    fno_train_report train_report;
    EXPECT(fno_run_train(cfg, train_stem.c_str(), test_stem.c_str(), tmp.string().c_str(),
                         "tiny", nullptr, &train_report) == FNO_OK);
    EXPECT(train_report.epochs_run == 2);
    EXPECT(train_report.param_count > 0);

    fno_model* model = nullptr;
    EXPECT(fno_model_load(train_report.checkpoint_path, &model) == FNO_OK);
    EXPECT(fno_model_param_count(model) == train_report.param_count);

    int64_t in_shape[2] = {64, 1};
    fno_field* input = nullptr;
    EXPECT(fno_field_create(in_shape, 2, fno_field_data(u0), &input) == FNO_OK);
    fno_field* output = nullptr;
    EXPECT(fno_model_forward(model, input, &output) == FNO_OK);
    int64_t out_shape[2] = {0, 0};
    EXPECT(fno_field_shape(output, out_shape, 2) == FNO_OK);
    EXPECT(out_shape[0] == 64);
    EXPECT(out_shape[1] == 1);

    // evaluation through the runner
    const char* stems[1] = {test_stem.c_str()};
    fno_eval_report eval_report;
    EXPECT(fno_run_eval(cfg, train_report.checkpoint_path, stems, 1, 0, nullptr, &eval_report) ==
           FNO_OK);
    EXPECT(eval_report.n_rows == 1);
    EXPECT(eval_report.rel_l2[0] > 0.0);

    // data errors surface as FNO_ERR_DATA with a message
    fno_model* broken = nullptr;
    EXPECT(fno_model_load((tmp / "missing.ckpt").string().c_str(), &broken) == FNO_ERR_DATA);
    EXPECT(std::strlen(fno_last_error()) > 0);

    fno_field_destroy(input);
    fno_field_destroy(output);
    fno_field_destroy(u0);
    fno_field_destroy(u0_again);
    fno_field_destroy(u1);
    fno_model_destroy(model);
    fno_config_destroy(cfg);
    fs::remove_all(tmp);

    if (failures == 0) std::printf("all C API checks passed\n");
    return failures == 0 ? 0 : 1;
}
