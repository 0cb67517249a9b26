#include "fno/fno.h"

#include <cstring>

#include "fno/burgers.hpp"
#include "fno/darcy.hpp"
#include "fno/harness.hpp"
#include "fno/navier_stokes.hpp"
#include "fno/spectra.hpp"

using namespace fno;

struct fno_config {
    RunConfig cfg;
};

struct fno_field {
    Field field;
};

struct fno_model {
    Checkpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;

fno_status fail(const Error& e) {
    g_last_error = e.what();
    return static_cast<fno_status>(static_cast<int>(e.kind()));
}

fno_status fail_generic(const std::exception& e) {
    g_last_error = e.what();
    return FNO_ERR_NUMERIC;
}

template <typename Fn>
fno_status wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FNO_OK;
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        return fail_generic(e);
    }
}

fno_status require(bool cond, const char* message) {
    if (cond) return FNO_OK;
    g_last_error = message;
    return FNO_ERR_USAGE;
}

void copy_path(char* dst, size_t cap, const std::string& src) {
    std::snprintf(dst, cap, "%s", src.c_str());
}

} // namespace

extern "C" {

const char* fno_last_error(void) { return g_last_error.c_str(); }

const char* fno_version(void) { return "1.0.0"; }

fno_status fno_config_create(fno_config** out) {
    if (require(out != nullptr, "null out") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { *out = new fno_config{}; });
}

void fno_config_destroy(fno_config* cfg) { delete cfg; }

fno_status fno_config_load_file(fno_config* cfg, const char* path) {
    if (require(cfg && path, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { cfg->cfg.load_file(path); });
}

fno_status fno_config_apply_kind(fno_config* cfg, const char* kind) {
    if (require(cfg && kind, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { cfg->cfg.apply_kind_preset(kind); });
}

fno_status fno_config_apply_env(fno_config* cfg) {
    if (require(cfg != nullptr, "null config") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { cfg->cfg.apply_env(); });
}

fno_status fno_config_set(fno_config* cfg, const char* key, const char* value) {
    if (require(cfg && key && value, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { cfg->cfg.set(key, value); });
}

fno_status fno_config_get(const fno_config* cfg, const char* key, char* buf, size_t buf_len) {
    if (require(cfg && key && buf && buf_len > 0, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        const std::string& v = cfg->cfg.get(key);
        FNO_REQUIRE(v.size() + 1 <= buf_len, UsageError, "buffer too small for key '", key, "'");
        std::memcpy(buf, v.c_str(), v.size() + 1);
    });
}

fno_status fno_field_create(const int64_t* shape, int32_t rank, const double* data,
                            fno_field** out) {
    if (require(shape && data && out && rank >= 1, "bad field arguments") != FNO_OK)
        return FNO_ERR_USAGE;
    return wrap([&] {
        Shape s(shape, shape + rank);
        std::vector<double> values(data, data + shape_size(s));
        *out = new fno_field{Field(std::move(s), std::move(values))};
    });
}

void fno_field_destroy(fno_field* f) { delete f; }

int32_t fno_field_rank(const fno_field* f) { return f ? f->field.rank() : 0; }

int64_t fno_field_size(const fno_field* f) { return f ? f->field.size() : 0; }

fno_status fno_field_shape(const fno_field* f, int64_t* shape, int32_t capacity) {
    if (require(f && shape, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    if (require(capacity >= f->field.rank(), "shape buffer too small") != FNO_OK)
        return FNO_ERR_USAGE;
    for (int a = 0; a < f->field.rank(); ++a) shape[a] = f->field.extent(a);
    return FNO_OK;
}

const double* fno_field_data(const fno_field* f) { return f ? f->field.data() : nullptr; }

fno_status fno_sample_grf(const fno_config* cfg, const int64_t* resolution, int32_t rank,
                          uint64_t seed, uint64_t index, fno_field** out) {
    if (require(cfg && resolution && out && rank >= 1, "bad arguments") != FNO_OK)
        return FNO_ERR_USAGE;
    return wrap([&] {
        GrfSpec spec = grf_spec_from(cfg->cfg);
        spec.dim = rank;
        Shape res(resolution, resolution + rank);
        *out = new fno_field{sample_grf(spec, res, RngStream(seed).derive(index))};
    });
}

fno_status fno_solve_burgers(const fno_config* cfg, const fno_field* u0, fno_field** out) {
    if (require(cfg && u0 && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        BurgersProblem p;
        p.u0 = u0->field;
        p.nu = cfg->cfg.get_f64("burgers.nu");
        p.t_final = cfg->cfg.get_f64("burgers.t_final");
        p.dt_max = cfg->cfg.get_f64("burgers.dt_max");
        p.cfl = cfg->cfg.get_f64("burgers.cfl");
        *out = new fno_field{solve_burgers(p)};
    });
}

fno_status fno_solve_darcy(const fno_config* cfg, const fno_field* a, const fno_field* f,
                           fno_field** out) {
    if (require(cfg && a && f && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        DarcyProblem p;
        p.a = a->field;
        p.f = f->field;
        p.harmonic_faces = cfg->cfg.get_bool("darcy.harmonic_faces");
        p.cg_tol = cfg->cfg.get_f64("darcy.cg_tol");
        p.cg_max_iter = cfg->cfg.get_i64("darcy.cg_max_iter");
        *out = new fno_field{solve_darcy(p)};
    });
}

fno_status fno_solve_ns(const fno_config* cfg, const fno_field* w0, fno_field** trajectory) {
    if (require(cfg && w0 && trajectory, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        NsProblem p;
        p.w0 = w0->field;
        p.nu = cfg->cfg.get_f64("ns.nu");
        p.t_final = cfg->cfg.get_f64("ns.t_final");
        p.dt = cfg->cfg.get_f64("ns.dt");
        p.record_interval = cfg->cfg.get_f64("ns.record_interval");
        p.cfl_limit = cfg->cfg.get_f64("ns.cfl_limit");
        if (cfg->cfg.get("ns.forcing") == "standard")
            p.forcing = ns_standard_forcing(w0->field.extent(0));
        *trajectory = new fno_field{solve_ns(p).snapshots};
    });
}

fno_status fno_energy_spectrum(const fno_field* w, double* bins, int64_t capacity,
                               int64_t* n_bins) {
    if (require(w && bins && n_bins, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        auto spectrum = energy_spectrum(w->field);
        FNO_REQUIRE(static_cast<int64_t>(spectrum.size()) <= capacity, UsageError,
                    "bin buffer too small: need ", spectrum.size());
        for (const auto& b : spectrum) bins[b.wavenumber] = b.energy;
        *n_bins = static_cast<int64_t>(spectrum.size());
    });
}

fno_status fno_truncation_error(const fno_field* w, int64_t kmax, double* out) {
    if (require(w && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { *out = truncation_error(w->field, kmax); });
}

fno_status fno_model_load(const char* checkpoint_path, fno_model** out) {
    if (require(checkpoint_path && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { *out = new fno_model{load_checkpoint(checkpoint_path)}; });
}

void fno_model_destroy(fno_model* m) { delete m; }

int64_t fno_model_param_count(const fno_model* m) {
    return m ? m->checkpoint.model.params.size() : 0;
}

fno_status fno_model_forward(const fno_model* m, const fno_field* input, fno_field** out) {
    if (require(m && input && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { *out = new fno_field{forward(m->checkpoint.model, input->field)}; });
}

fno_status fno_model_rollout(const fno_model* m, const fno_field* seed, int64_t horizon,
                             fno_field** out) {
    if (require(m && seed && out, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { *out = new fno_field{rollout(m->checkpoint.model, seed->field, horizon)}; });
}

fno_status fno_run_gen(const fno_config* cfg, const char* out_dir, fno_gen_report* report) {
    if (require(cfg && out_dir, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        GenReport r = run_gen(cfg->cfg, out_dir);
        if (report) {
            report->n_train = r.n_train;
            report->n_test = r.n_test;
            report->wall_seconds = r.wall_seconds;
            report->n_stems = static_cast<int32_t>(std::min<size_t>(r.stems.size(), 16));
            for (int32_t i = 0; i < report->n_stems; ++i)
                copy_path(report->stems[i], sizeof report->stems[i], r.stems[static_cast<size_t>(i)]);
        }
    });
}

fno_status fno_run_train(const fno_config* cfg, const char* train_stem, const char* test_stem,
                         const char* out_dir, const char* name, const char* resume_checkpoint,
                         fno_train_report* report) {
    if (require(cfg && train_stem && test_stem && out_dir && name, "null argument") != FNO_OK)
        return FNO_ERR_USAGE;
    return wrap([&] {
        TrainReport r = run_train(cfg->cfg, train_stem, test_stem, out_dir, name,
                                  resume_checkpoint ? resume_checkpoint : "");
        if (report) {
            report->final_train_rel_l2 = r.final_train_rel_l2;
            report->final_test_rel_l2 = r.final_test_rel_l2;
            report->epochs_run = r.epochs_run;
            report->param_count = r.param_count;
            report->wall_seconds = r.wall_seconds;
            copy_path(report->checkpoint_path, sizeof report->checkpoint_path, r.checkpoint_path);
            copy_path(report->metrics_path, sizeof report->metrics_path, r.metrics_path);
        }
    });
}

fno_status fno_run_eval(const fno_config* cfg, const char* checkpoint, const char* const* stems,
                        int32_t n_stems, int64_t resolution_override, const char* out_csv,
                        fno_eval_report* report) {
    if (require(cfg && checkpoint && stems && n_stems >= 1 && n_stems <= 16, "bad arguments") !=
        FNO_OK)
        return FNO_ERR_USAGE;
    return wrap([&] {
        std::vector<std::string> stem_list(stems, stems + n_stems);
        EvalReport r = run_eval(cfg->cfg, checkpoint, stem_list, resolution_override,
                                out_csv ? out_csv : "");
        if (report) {
            report->n_rows = static_cast<int32_t>(r.rows.size());
            for (size_t i = 0; i < r.rows.size(); ++i) {
                report->resolution[i] = r.rows[i].resolution.empty() ? 0 : r.rows[i].resolution[0];
                report->count[i] = r.rows[i].count;
                report->rel_l2[i] = r.rows[i].rel_l2;
            }
        }
    });
}

fno_status fno_run_analyze_spectrum(const fno_config* cfg, const char* targets_file,
                                    int64_t frame, const char* out_csv) {
    if (require(cfg && targets_file && out_csv, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { run_analyze_spectrum(cfg->cfg, targets_file, frame, out_csv); });
}

fno_status fno_run_analyze_truncation(const fno_config* cfg, const char* targets_file,
                                      int64_t frame, int64_t kmax_hi, const char* out_csv) {
    if (require(cfg && targets_file && out_csv, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] { run_analyze_truncation(cfg->cfg, targets_file, frame, kmax_hi, out_csv); });
}

fno_status fno_run_bench(const fno_config* cfg, const char* checkpoint, const char* out_csv,
                         fno_bench_report* report) {
    if (require(cfg && checkpoint, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        BenchReport r = run_bench(cfg->cfg, checkpoint, out_csv ? out_csv : "");
        if (report) {
            report->fno_median_seconds = r.fno_median_seconds;
            report->solver_median_seconds = r.solver_median_seconds;
            report->ratio = r.ratio;
            report->runs = r.runs;
        }
    });
}

fno_status fno_run_make_observations(const fno_config* cfg, const char* out_path,
                                     fno_obs_report* report) {
    if (require(cfg && out_path, "null argument") != FNO_OK) return FNO_ERR_USAGE;
    return wrap([&] {
        ObsReport r = run_make_observations(cfg->cfg, out_path);
        if (report) {
            report->sigma_noise = r.sigma_noise;
            copy_path(report->obs_path, sizeof report->obs_path, r.obs_path);
        }
    });
}

fno_status fno_run_invert(const fno_config* cfg, const char* obs_file, const char* out_dir,
                          const char* tag, fno_invert_report* report) {
    if (require(cfg && obs_file && out_dir && tag, "null argument") != FNO_OK)
        return FNO_ERR_USAGE;
    return wrap([&] {
        InvertReport r = run_invert(cfg->cfg, obs_file, out_dir, tag);
        if (report) {
            report->acceptance_rate = r.acceptance_rate;
            report->forward_calls = r.forward_calls;
            report->posterior_misfit = r.posterior_misfit;
            report->prior_misfit = r.prior_misfit;
            copy_path(report->mean_path, sizeof report->mean_path, r.mean_path);
            copy_path(report->chain_csv, sizeof report->chain_csv, r.chain_csv);
        }
    });
}

} // extern "C"
