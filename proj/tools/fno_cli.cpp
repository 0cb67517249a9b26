// Command-line front end. Links the shared library through the C interface
// only; all numerics live behind fno.h.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "fno/fno.h"

namespace {

struct ConfigDeleter {
    void operator()(fno_config* c) const { fno_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<fno_config, ConfigDeleter>;

struct GlobalOptions {
    std::string config_path;
    std::string kind;
    std::vector<std::string> sets;
    int64_t seed = -1;
    int64_t threads = -1;
    std::string out_dir = ".";
};

void add_globals(CLI::App* cmd, GlobalOptions& g) {
    cmd->add_option("--config", g.config_path, "configuration file (key=value with [sections])");
    cmd->add_option("--kind", g.kind, "apply a problem preset: burgers|darcy|ns");
    cmd->add_option("--set", g.sets, "override a config key, e.g. --set train.epochs=100")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", g.seed, "random seed (run.seed)");
    cmd->add_option("--threads", g.threads, "worker threads (run.threads)");
    cmd->add_option("--out", g.out_dir, "output directory (run.out)");
}

[[noreturn]] void die(fno_status status) {
    std::fprintf(stderr, "error: %s\n", fno_last_error());
    std::exit(static_cast<int>(status));
}

void check(fno_status status) {
    if (status != FNO_OK) die(status);
}

ConfigPtr build_config(const GlobalOptions& g) {
    fno_config* raw = nullptr;
    check(fno_config_create(&raw));
    ConfigPtr cfg(raw);
    if (!g.kind.empty()) check(fno_config_apply_kind(cfg.get(), g.kind.c_str()));
    if (!g.config_path.empty()) check(fno_config_load_file(cfg.get(), g.config_path.c_str()));
    check(fno_config_apply_env(cfg.get()));
    for (const std::string& kv : g.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects KEY=VALUE, got '%s'\n", kv.c_str());
            std::exit(1);
        }
        check(fno_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (g.seed >= 0) check(fno_config_set(cfg.get(), "run.seed", std::to_string(g.seed).c_str()));
    if (g.threads >= 0)
        check(fno_config_set(cfg.get(), "run.threads", std::to_string(g.threads).c_str()));
    check(fno_config_set(cfg.get(), "run.out", g.out_dir.c_str()));
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fno: Fourier neural operator toolkit (datasets, training, analysis, inversion)"};
    app.require_subcommand(1);

    // gen -----------------------------------------------------------------
    GlobalOptions gen_g;
    std::string gen_kind;
    auto* gen = app.add_subcommand("gen", "generate a PDE dataset (inputs/targets + sidecar)");
    gen->add_option("problem", gen_kind, "burgers|darcy|ns")->required();
    add_globals(gen, gen_g);

    // train-model -----------------------------------------------------------
    GlobalOptions train_g;
    std::string train_data, train_test, train_name = "model", train_resume;
    auto* tr = app.add_subcommand("train-model", "train a model on a generated dataset");
    tr->add_option("--data", train_data, "training dataset stem")->required();
    tr->add_option("--test", train_test, "test dataset stem")->required();
    tr->add_option("--name", train_name, "checkpoint / metrics base name");
    tr->add_option("--resume", train_resume, "checkpoint to resume from");
    add_globals(tr, train_g);

    // eval-model ------------------------------------------------------------
    GlobalOptions eval_g;
    std::vector<std::string> eval_stems;
    std::string eval_ckpt, eval_csv;
    int64_t eval_resolution = 0;
    auto* ev = app.add_subcommand("eval-model", "evaluate a checkpoint on datasets");
    ev->add_option("--checkpoint", eval_ckpt, "checkpoint path")->required();
    ev->add_option("--data", eval_stems, "dataset stem (repeatable)")->required();
    ev->add_option("--resolution", eval_resolution, "downsample datasets to this extent first");
    ev->add_option("--csv", eval_csv, "write a per-resolution report CSV");
    add_globals(ev, eval_g);

    // analyze ---------------------------------------------------------------
    GlobalOptions an_g;
    std::string an_what, an_file, an_csv;
    int64_t an_frame = 0, an_kmax = 0;
    auto* an = app.add_subcommand("analyze", "spectral analysis of trajectory data");
    an->add_option("what", an_what, "spectrum|truncation")->required();
    an->add_option("--data", an_file, "targets container (.targets.fnot)")->required();
    an->add_option("--frame", an_frame, "recorded frame (default: last)");
    an->add_option("--kmax", an_kmax, "truncation sweep upper cutoff (default: Nyquist)");
    an->add_option("--csv", an_csv, "output CSV path")->required();
    add_globals(an, an_g);

    // bench-inference ---------------------------------------------------------
    GlobalOptions bench_g;
    std::string bench_ckpt, bench_csv;
    auto* be = app.add_subcommand("bench-inference",
                                  "compare model forward time against the solver");
    be->add_option("--checkpoint", bench_ckpt, "surrogate checkpoint")->required();
    be->add_option("--csv", bench_csv, "output CSV path");
    add_globals(be, bench_g);

    // invert ------------------------------------------------------------------
    GlobalOptions inv_g;
    std::string inv_obs, inv_tag = "invert", inv_make;
    auto* in = app.add_subcommand("invert", "Bayesian recovery of the initial vorticity");
    in->add_option("--obs", inv_obs, "observation file produced by --make-obs");
    in->add_option("--make-obs", inv_make, "generate synthetic observations to this path, then exit");
    in->add_option("--tag", inv_tag, "output file prefix");
    add_globals(in, inv_g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1; --help exits 0
    }

    if (gen->parsed()) {
        gen_g.kind = gen_kind; // positional problem implies the preset
        ConfigPtr cfg = build_config(gen_g);
        fno_gen_report report{};
        check(fno_run_gen(cfg.get(), gen_g.out_dir.c_str(), &report));
        std::printf("generated %lld train + %lld test samples in %.1fs\n",
                    static_cast<long long>(report.n_train), static_cast<long long>(report.n_test),
                    report.wall_seconds);
        for (int i = 0; i < report.n_stems; ++i) std::printf("  %s\n", report.stems[i]);
        return 0;
    }
    if (tr->parsed()) {
        ConfigPtr cfg = build_config(train_g);
        fno_train_report report{};
        check(fno_run_train(cfg.get(), train_data.c_str(), train_test.c_str(),
                            train_g.out_dir.c_str(), train_name.c_str(),
                            train_resume.empty() ? nullptr : train_resume.c_str(), &report));
        std::printf("trained %lld epochs (%lld parameters) in %.1fs\n",
                    static_cast<long long>(report.epochs_run),
                    static_cast<long long>(report.param_count), report.wall_seconds);
        std::printf("final train rel-L2 %.6f, test rel-L2 %.6f\n", report.final_train_rel_l2,
                    report.final_test_rel_l2);
        std::printf("checkpoint: %s\nmetrics: %s\n", report.checkpoint_path, report.metrics_path);
        return 0;
    }
    if (ev->parsed()) {
        ConfigPtr cfg = build_config(eval_g);
        std::vector<const char*> stems;
        for (const auto& s : eval_stems) stems.push_back(s.c_str());
        fno_eval_report report{};
        check(fno_run_eval(cfg.get(), eval_ckpt.c_str(), stems.data(),
                           static_cast<int32_t>(stems.size()), eval_resolution,
                           eval_csv.empty() ? nullptr : eval_csv.c_str(), &report));
        std::printf("%-12s %-8s %s\n", "resolution", "count", "rel_l2");
        for (int i = 0; i < report.n_rows; ++i)
            std::printf("%-12lld %-8lld %.6f\n", static_cast<long long>(report.resolution[i]),
                        static_cast<long long>(report.count[i]), report.rel_l2[i]);
        return 0;
    }
    if (an->parsed()) {
        ConfigPtr cfg = build_config(an_g);
        if (an_what == "spectrum") {
            check(fno_run_analyze_spectrum(cfg.get(), an_file.c_str(), an_frame, an_csv.c_str()));
        } else if (an_what == "truncation") {
            check(fno_run_analyze_truncation(cfg.get(), an_file.c_str(), an_frame, an_kmax,
                                             an_csv.c_str()));
        } else {
            std::fprintf(stderr, "error: analyze expects spectrum|truncation, got '%s'\n",
                         an_what.c_str());
            return 1;
        }
        std::printf("wrote %s\n", an_csv.c_str());
        return 0;
    }
    if (be->parsed()) {
        ConfigPtr cfg = build_config(bench_g);
        fno_bench_report report{};
        check(fno_run_bench(cfg.get(), bench_ckpt.c_str(),
                            bench_csv.empty() ? nullptr : bench_csv.c_str(), &report));
        std::printf("fno forward median: %.6fs\nsolver trajectory median: %.6fs\nratio: %.1fx "
                    "(median of %lld runs)\n",
                    report.fno_median_seconds, report.solver_median_seconds, report.ratio,
                    static_cast<long long>(report.runs));
        return 0;
    }
    if (in->parsed()) {
        ConfigPtr cfg = build_config(inv_g);
        if (!inv_make.empty()) {
            fno_obs_report report{};
            check(fno_run_make_observations(cfg.get(), inv_make.c_str(), &report));
            std::printf("observations written to %s (sigma_noise %.6f)\n", report.obs_path,
                        report.sigma_noise);
            return 0;
        }
        if (inv_obs.empty()) {
            std::fprintf(stderr, "error: invert needs --obs FILE or --make-obs FILE\n");
            return 1;
        }
        fno_invert_report report{};
        check(fno_run_invert(cfg.get(), inv_obs.c_str(), inv_g.out_dir.c_str(), inv_tag.c_str(),
                             &report));
        std::printf("acceptance rate: %.3f over %lld forward calls\n", report.acceptance_rate,
                    static_cast<long long>(report.forward_calls));
        std::printf("posterior-mean misfit: %.6f (prior-mean misfit %.6f)\n",
                    report.posterior_misfit, report.prior_misfit);
        std::printf("mean: %s\nchain: %s\n", report.mean_path, report.chain_csv);
        return 0;
    }
    return 1;
}
