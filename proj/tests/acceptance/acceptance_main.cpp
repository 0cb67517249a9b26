// Acceptance suite: one subcommand per criterion, each printing a single
// PASS/FAIL line (plus indented measurements). Heavy artifacts (datasets,
// checkpoints, chains) are cached in the work directory and keyed by config
// hash + seed, so re-runs only re-verify the metrics.
//
// Usage: fno_acceptance [c1 ... c10 | all]
// Environment: FNO_ACCEPT_DIR (work directory), FNO_ACCEPT_THREADS.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "fno/burgers.hpp"
#include "fno/darcy.hpp"
#include "fno/fft.hpp"
#include "fno/harness.hpp"
#include "fno/modes.hpp"
#include "fno/navier_stokes.hpp"
#include "fno/parallel.hpp"
#include "fno/spectra.hpp"
#include "fno/tensor_io.hpp"

using namespace fno;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    std::string work;
    int threads = 2;
};

struct CheckList {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

void note(const std::string& msg) { std::printf("    %s\n", msg.c_str()); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Field random_field(Shape shape, uint64_t seed) {
    Field f(std::move(shape));
    RngStream rng(seed);
    for (int64_t i = 0; i < f.size(); ++i) f[i] = rng.next_gauss();
    return f;
}

double rel_l2_fields(const Field& got, const Field& want) {
    double num = 0, den = 0;
    for (int64_t i = 0; i < got.size(); ++i) {
        double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

// --- artifact staging -------------------------------------------------------

bool sidecar_matches(const std::string& json_path, uint64_t config_hash, int64_t seed) {
    std::ifstream f(json_path);
    if (!f.good()) return false;
    try {
        json j = json::parse(f);
        char want[17];
        std::snprintf(want, sizeof want, "%016llx", static_cast<unsigned long long>(config_hash));
        return j.value("config_hash", "") == want && j.value("seed", int64_t{-1}) == seed;
    } catch (...) {
        return false;
    }
}

void ensure_dataset(const Context& ctx, const RunConfig& cfg,
                    const std::vector<std::string>& stems) {
    bool fresh = true;
    for (const std::string& stem : stems)
        fresh = fresh && sidecar_matches(stem + ".json", cfg.hash(), cfg.get_i64("run.seed")) &&
                fs::exists(stem + ".inputs.fnot") && fs::exists(stem + ".targets.fnot");
    if (fresh) {
        note("dataset cache hit: " + stems.front() + " ...");
        return;
    }
    note("generating " + cfg.get("data.kind") + " dataset (this can take a while)");
    GenReport r = run_gen(cfg, ctx.work);
    note("generated in " + fmt(r.wall_seconds) + "s");
}

int64_t metrics_rows(const std::string& metrics_path) {
    std::ifstream f(metrics_path);
    if (!f.good()) return 0;
    std::string line;
    std::getline(f, line); // header
    int64_t rows = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    return rows;
}

std::string ensure_checkpoint(const Context& ctx, const RunConfig& cfg, const std::string& name,
                              const std::string& train_stem, const std::string& test_stem) {
    std::string ckpt = ctx.work + "/" + name + ".ckpt.fnot";
    std::string sidecar = ctx.work + "/" + name + ".json";
    std::string metrics = ctx.work + "/" + name + ".metrics.csv";
    int64_t target_epochs = cfg.get_i64("train.epochs");

    bool match = sidecar_matches(sidecar, cfg.hash(), cfg.get_i64("run.seed"));
    int64_t done = match ? metrics_rows(metrics) : 0;
    if (match && done >= target_epochs && fs::exists(ckpt)) {
        note("checkpoint cache hit: " + name + " (" + std::to_string(done) + " epochs)");
        return ckpt;
    }
    if (match && done > 0 && fs::exists(ckpt)) {
        note("resuming " + name + " from epoch " + std::to_string(done));
        TrainReport r = run_train(cfg, train_stem, test_stem, ctx.work, name, ckpt);
        note("trained to epoch " + std::to_string(r.epochs_run) + " in " + fmt(r.wall_seconds) +
             "s (test rel-L2 " + fmt(r.final_test_rel_l2) + ")");
        return ckpt;
    }
    fs::remove(ckpt);
    fs::remove(sidecar);
    fs::remove(metrics);
    note("training " + name + " for " + std::to_string(target_epochs) + " epochs");
    TrainReport r = run_train(cfg, train_stem, test_stem, ctx.work, name);
    note("trained in " + fmt(r.wall_seconds) + "s (test rel-L2 " + fmt(r.final_test_rel_l2) + ")");
    return ckpt;
}

// --- shared configurations ----------------------------------------------

RunConfig burgers_cfg(const Context& ctx) {
    RunConfig cfg;
    cfg.apply_kind_preset("burgers");
    cfg.set("data.n_train", "1000");
    cfg.set("data.n_test", "200");
    cfg.set("data.resolution", "1024"); // desk-scale generation grid
    cfg.set("data.companions", "512,256");
    cfg.set("run.seed", "1004");
    cfg.set("run.threads", std::to_string(ctx.threads));
    return cfg;
}

RunConfig darcy_cfg(const Context& ctx) {
    RunConfig cfg;
    cfg.apply_kind_preset("darcy");
    cfg.set("data.n_train", "1000");
    cfg.set("data.n_test", "200");
    cfg.set("data.resolution", "129");
    cfg.set("data.companions", "65");
    cfg.set("train.epochs", "100");
    cfg.set("run.seed", "1005");
    cfg.set("run.threads", std::to_string(ctx.threads));
    return cfg;
}

RunConfig ns_cfg(const Context& ctx) {
    RunConfig cfg;
    cfg.apply_kind_preset("ns");
    cfg.set("data.n_train", "200");
    cfg.set("data.n_test", "40");
    cfg.set("data.resolution", "64");
    cfg.set("data.companions", "32");
    cfg.set("ns.nu", "1e-3");
    cfg.set("ns.t_final", "20.0");
    cfg.set("ns.dt", "1e-3");
    cfg.set("run.seed", "1006");
    cfg.set("run.threads", std::to_string(ctx.threads));
    return cfg;
}

std::vector<std::string> stems_for(const Context& ctx, const std::string& kind,
                                   const std::vector<int64_t>& resolutions) {
    std::vector<std::string> out;
    for (const std::string& split : {"train", "test"})
        for (int64_t r : resolutions)
            out.push_back(ctx.work + "/" + kind + "_" + split + "_s" + std::to_string(r));
    return out;
}

// --------------------------------------------------------------------------
// criterion 1: FFT/numerics suite
// --------------------------------------------------------------------------

bool criterion1(const Context&) {
    CheckList c;
    // round-trip and linearity
    for (Shape shape : {Shape{64}, Shape{12, 10}, Shape{6, 5, 7}}) {
        Field f = random_field(shape, 11);
        Field back = fft::idft(fft::dft(f, static_cast<int>(shape.size())));
        c.expect(rel_l2_fields(back, f) < 1e-12, "round-trip " + shape_str(shape));
    }
    {
        Field f = random_field({32}, 12), g = random_field({32}, 13);
        Field combo(Shape{32});
        for (int64_t i = 0; i < 32; ++i) combo[i] = 2.5 * f[i] - 1.25 * g[i];
        SpectralField sf = fft::dft(f, 1), sg = fft::dft(g, 1), sc = fft::dft(combo, 1);
        double worst = 0;
        for (int64_t i = 0; i < sc.size(); ++i)
            worst = std::max(worst, std::abs(sc[i] - (2.5 * sf[i] - 1.25 * sg[i])));
        c.expect(worst < 1e-12 * 32, "linearity");
    }
    // Parseval over the full symmetric spectrum
    for (Shape shape : {Shape{32}, Shape{16, 12}}) {
        Field f = random_field(shape, 17);
        SpectralField spec = fft::dft(f, static_cast<int>(shape.size()));
        int64_t half = spec.extent(spec.spatial_rank() - 1);
        int64_t lead = spec.stored_spatial_size() / half;
        double spectral = 0.0;
        for (int64_t l = 0; l < lead; ++l)
            for (int64_t p = 0; p < half; ++p) {
                double w = fft::on_self_conjugate_plane(p, spec.last_logical_extent()) ? 1.0 : 2.0;
                spectral += w * std::norm(spec[l * half + p]);
            }
        double grid = 0.0;
        for (int64_t i = 0; i < f.size(); ++i) grid += f[i] * f[i];
        c.expect(std::abs(spectral / static_cast<double>(f.size()) - grid) < 1e-10 * grid,
                 "parseval " + shape_str(shape));
    }
    // mode-set enumeration vs brute force for every s <= 32 at several cutoffs
    for (int64_t s = 2; s <= 32; ++s) {
        for (int64_t k : {0L, 1L, 2L, 5L, 16L}) {
            ModeSet ms = mode_set({s}, {k}, nullptr);
            std::set<std::vector<int64_t>> got;
            for (auto& idx : ms.logical_indices()) got.insert(idx);
            std::set<std::vector<int64_t>> want;
            for (int64_t i = 0; i < s; ++i)
                if (i <= k || s - i <= k) want.insert({i});
            c.expect(got == want, "mode set s=" + std::to_string(s) + " k=" + std::to_string(k));
        }
    }
    {
        ModeSet ms = mode_set({16, 16}, {2, 2});
        c.expect(ms.total() == 15, "2-d corner count");
    }
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 2: gradient correctness
// --------------------------------------------------------------------------

double gradcheck_worst(const FnoConfig& cfg, const Shape& in_shape, const Shape& target_shape,
                       uint64_t seed) {
    std::vector<Field> inputs, targets;
    for (int i = 0; i < 2; ++i) {
        inputs.push_back(random_field(in_shape, seed + static_cast<uint64_t>(i)));
        targets.push_back(random_field(target_shape, seed + 100 + static_cast<uint64_t>(i)));
    }
    FnoModel model = make_model(cfg, seed);
    BatchCache cache;
    forward_batch(model, inputs, true, cache, 1);
    ParamStore grads = ParamStore::layout_for(cfg);
    grads.fill(0.0);
    backward_batch(model, cache, targets, grads, 1);

    auto fd_at = [&](int64_t idx, double h) {
        FnoModel probe = model;
        probe.params.data()[idx] += h;
        double up = batch_loss(probe, inputs, targets, true, 1);
        probe.norm = model.norm;
        probe.params.data()[idx] = model.params.data()[idx] - h;
        double down = batch_loss(probe, inputs, targets, true, 1);
        return (up - down) / (2 * h);
    };
    auto rel = [](double fd, double an) {
        return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4});
    };
    // primary step h = 1e-5; entries where the stencil straddles a ReLU kink
    // are re-checked at h = 1e-6 (the loss is piecewise smooth, so a genuine
    // gradient error would not shrink with h)
    double worst = 0.0;
    for (const auto& seg : model.params.segments()) {
        for (int64_t i = 0; i < seg.count; ++i) {
            int64_t idx = seg.offset + i;
            double an = grads.data()[idx];
            double err = rel(fd_at(idx, 1e-5), an);
            if (err > 1e-5) err = rel(fd_at(idx, 1e-6), an);
            worst = std::max(worst, err);
        }
    }
    return worst;
}

bool criterion2(const Context&) {
    CheckList c;
    {
        FnoConfig m;
        m.variant = FnoVariant::fno1d;
        m.width = 4;
        m.kmax = {3};
        m.n_layers = 2;
        m.batch_norm = true;
        m.q_hidden = 6;
        double w = gradcheck_worst(m, {16, 1}, {16, 1}, 21);
        note("fno1d worst rel err " + fmt(w));
        c.expect(w <= 1e-5, "fno1d gradients");
    }
    {
        FnoConfig m;
        m.variant = FnoVariant::fno2d;
        m.width = 3;
        m.kmax = {2, 2};
        m.n_layers = 2;
        m.batch_norm = true;
        m.q_hidden = 5;
        double w = gradcheck_worst(m, {8, 7, 1}, {8, 7, 1}, 22);
        note("fno2d worst rel err " + fmt(w));
        c.expect(w <= 1e-5, "fno2d gradients");
    }
    {
        FnoConfig m;
        m.variant = FnoVariant::fno2d_rnn;
        m.in_channels = 3;
        m.rnn_window = 3;
        m.width = 3;
        m.kmax = {2, 2};
        m.n_layers = 2;
        m.batch_norm = false;
        m.q_hidden = 5;
        double w = gradcheck_worst(m, {8, 8, 3}, {8, 8, 1}, 23);
        note("fno2d-rnn worst rel err " + fmt(w));
        c.expect(w <= 1e-5, "fno2d-rnn gradients");
    }
    {
        FnoConfig m;
        m.variant = FnoVariant::fno3d;
        m.in_channels = 2;
        m.rnn_window = 2;
        m.horizon = 5;
        m.width = 3;
        m.kmax = {2, 2, 1};
        m.n_layers = 2;
        m.batch_norm = true;
        m.q_hidden = 5;
        double w = gradcheck_worst(m, {8, 8, 2}, {8, 8, 5, 1}, 24);
        note("fno3d worst rel err " + fmt(w));
        c.expect(w <= 1e-5, "fno3d gradients");
    }
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 3: solver oracles
// --------------------------------------------------------------------------

bool criterion3(const Context&) {
    CheckList c;
    // Darcy manufactured-solution convergence order
    auto darcy_err = [](int64_t s) {
        DarcyProblem p;
        p.a = Field(Shape{s, s}, 1.0);
        p.f = Field(Shape{s, s});
        for (int64_t i = 0; i < s; ++i)
            for (int64_t j = 0; j < s; ++j) {
                double x = static_cast<double>(i) / (s - 1), y = static_cast<double>(j) / (s - 1);
                p.f.at({i, j}) = 2 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y);
            }
        p.cg_tol = 1e-10;
        Field u = solve_darcy(p);
        double err = 0;
        for (int64_t i = 0; i < s; ++i)
            for (int64_t j = 0; j < s; ++j) {
                double x = static_cast<double>(i) / (s - 1), y = static_cast<double>(j) / (s - 1);
                err = std::max(err, std::abs(u.at({i, j}) - std::sin(M_PI * x) * std::sin(M_PI * y)));
            }
        return err;
    };
    double e33 = darcy_err(33), e65 = darcy_err(65), e129 = darcy_err(129);
    double order1 = std::log2(e33 / e65), order2 = std::log2(e65 / e129);
    note("darcy orders " + fmt(order1) + ", " + fmt(order2));
    c.expect(order1 >= 1.8 && order1 <= 2.2 && order2 >= 1.8 && order2 <= 2.2,
             "darcy convergence order in [1.8, 2.2]");

    // Burgers mean conservation and self-convergence
    {
        GrfSpec g;
        g.scale = 625;
        g.tau = 25;
        g.alpha = 2;
        g.dim = 1;
        BurgersProblem p;
        p.u0 = sample_grf(g, {512}, RngStream(3).derive(0));
        p.dt_max = 5e-4;
        double mean0 = p.u0.mean();
        Field u = solve_burgers(p);
        double drift = std::abs(u.mean() - mean0);
        note("burgers mean drift " + fmt(drift));
        c.expect(drift <= 1e-10, "burgers mean conservation <= 1e-10");

        Field u0(Shape{1024});
        for (int64_t j = 0; j < 1024; ++j) u0[j] = std::sin(2 * M_PI * j / 1024.0);
        auto run = [&](double dt) {
            BurgersProblem q;
            q.u0 = u0;
            q.dt_max = dt;
            q.t_final = 0.5;
            return solve_burgers(q);
        };
        Field ref = run(2.5e-5);
        double err1 = rel_l2_fields(run(2e-4), ref);
        double err2 = rel_l2_fields(run(1e-4), ref);
        double order = std::log2(err1 / err2);
        note("burgers self-convergence order " + fmt(order));
        c.expect(order >= 0.9, "burgers self-convergence order >= 0.9");
    }

    // Taylor-Green decay at the pinned setting
    {
        const int64_t s = 64;
        const double nu = 1e-3;
        Field w0(Shape{s, s});
        for (int64_t i = 0; i < s; ++i)
            for (int64_t j = 0; j < s; ++j)
                w0.at({i, j}) = -4 * M_PI * std::cos(2 * M_PI * i / double(s)) *
                                std::cos(2 * M_PI * j / double(s));
        NsProblem p;
        p.w0 = w0;
        p.nu = nu;
        p.dt = 1e-3;
        p.t_final = 1.0;
        NsTrajectory traj = solve_ns(p);
        Field w1 = traj.frame(0);
        double decay = std::exp(-8 * M_PI * M_PI * nu);
        Field want(w0.shape());
        for (int64_t i = 0; i < w0.size(); ++i) want[i] = w0[i] * decay;
        double err = rel_l2_fields(w1, want);
        note("taylor-green relative error " + fmt(err));
        c.expect(err <= 1e-3, "taylor-green decay error <= 1e-3");
    }
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 4: Burgers benchmark
// --------------------------------------------------------------------------

bool criterion4(const Context& ctx) {
    CheckList c;
    RunConfig cfg = burgers_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "burgers", {1024, 512, 256}));

    RunConfig tcfg = cfg;
    tcfg.set("train.epochs", "500"); // pinned by the baseline protocol
    std::string ckpt = ensure_checkpoint(ctx, tcfg, "burgers_fno1d",
                                         ctx.work + "/burgers_train_s256",
                                         ctx.work + "/burgers_test_s256");

    EvalReport er = run_eval(tcfg, ckpt,
                             {ctx.work + "/burgers_test_s256", ctx.work + "/burgers_test_s512",
                              ctx.work + "/burgers_test_s1024"},
                             0, ctx.work + "/burgers_eval.csv");
    double e256 = er.rows[0].rel_l2, e512 = er.rows[1].rel_l2, e1024 = er.rows[2].rel_l2;
    note("test rel-L2: s=256 " + fmt(e256) + ", s=512 " + fmt(e512) + ", s=1024 " + fmt(e1024));
    c.expect(e256 <= 0.03, "s=256 error " + fmt(e256) + " <= 0.03");
    c.expect(e512 <= 1.5 * e256, "s=512 within 1.5x of s=256");
    c.expect(e1024 <= 1.5 * e256, "s=1024 within 1.5x of s=256");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 5: Darcy benchmark
// --------------------------------------------------------------------------

bool criterion5(const Context& ctx) {
    CheckList c;
    RunConfig cfg = darcy_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "darcy", {129, 65}));
    std::string ckpt = ensure_checkpoint(ctx, cfg, "darcy_fno2d", ctx.work + "/darcy_train_s65",
                                         ctx.work + "/darcy_test_s65");

    EvalReport er = run_eval(cfg, ckpt,
                             {ctx.work + "/darcy_test_s65", ctx.work + "/darcy_test_s129"}, 0,
                             ctx.work + "/darcy_eval.csv");
    double e65 = er.rows[0].rel_l2, e129 = er.rows[1].rel_l2;
    note("test rel-L2: s=65 " + fmt(e65) + ", s=129 " + fmt(e129));
    c.expect(e65 <= 0.05, "s=65 error " + fmt(e65) + " <= 0.05");
    c.expect(e129 <= 1.5 * e65, "s=129 within 1.5x of s=65");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 6: Navier-Stokes desk benchmark (both time variants)
// --------------------------------------------------------------------------

RunConfig ns_rnn_train_cfg(const Context& ctx) {
    RunConfig cfg = ns_cfg(ctx);
    cfg.set("model.variant", "fno2d-rnn");
    cfg.set("model.width", "32");
    cfg.set("model.kmax", "12,12");
    cfg.set("model.rnn_window", "10");
    cfg.set("train.epochs", "60");
    cfg.set("train.window_stride", "2");
    return cfg;
}

RunConfig ns_3d_train_cfg(const Context& ctx) {
    RunConfig cfg = ns_cfg(ctx);
    cfg.set("model.variant", "fno3d");
    cfg.set("model.width", "20");
    cfg.set("model.kmax", "8,8,4");
    cfg.set("model.rnn_window", "10");
    cfg.set("model.horizon", "10");
    cfg.set("train.epochs", "50");
    cfg.set("train.batch", "4");
    return cfg;
}

bool criterion6(const Context& ctx) {
    CheckList c;
    RunConfig cfg = ns_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "ns", {64, 32}));

    RunConfig rnn = ns_rnn_train_cfg(ctx);
    std::string rnn_ckpt = ensure_checkpoint(ctx, rnn, "ns_fno2d_rnn", ctx.work + "/ns_train_s64",
                                             ctx.work + "/ns_test_s64");
    EvalReport rnn_eval = run_eval(rnn, rnn_ckpt, {ctx.work + "/ns_test_s64"});
    note("fno2d-rnn rollout rel-L2 " + fmt(rnn_eval.rows[0].rel_l2));
    c.expect(rnn_eval.rows[0].rel_l2 <= 0.15,
             "fno2d-rnn rollout " + fmt(rnn_eval.rows[0].rel_l2) + " <= 0.15");

    RunConfig f3d = ns_3d_train_cfg(ctx);
    std::string f3d_ckpt = ensure_checkpoint(ctx, f3d, "ns_fno3d", ctx.work + "/ns_train_s64",
                                             ctx.work + "/ns_test_s64");
    EvalReport f3d_eval = run_eval(f3d, f3d_ckpt, {ctx.work + "/ns_test_s64"});
    note("fno3d block rel-L2 " + fmt(f3d_eval.rows[0].rel_l2));
    c.expect(f3d_eval.rows[0].rel_l2 <= 0.15,
             "fno3d error " + fmt(f3d_eval.rows[0].rel_l2) + " <= 0.15");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 7: zero-shot super-resolution
// --------------------------------------------------------------------------

bool criterion7(const Context& ctx) {
    CheckList c;
    RunConfig cfg = ns_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "ns", {64, 32}));

    RunConfig rnn32 = ns_rnn_train_cfg(ctx);
    rnn32.set("train.epochs", "40");
    std::string ckpt = ensure_checkpoint(ctx, rnn32, "ns_fno2d_rnn_s32",
                                         ctx.work + "/ns_train_s32", ctx.work + "/ns_test_s32");

    EvalReport e32 = run_eval(rnn32, ckpt, {ctx.work + "/ns_test_s32"});
    EvalReport e64 = run_eval(rnn32, ckpt, {ctx.work + "/ns_test_s64"});
    note("rollout rel-L2: s=32 " + fmt(e32.rows[0].rel_l2) + ", zero-shot s=64 " +
         fmt(e64.rows[0].rel_l2));
    c.expect(e64.rows[0].rel_l2 <= 2.0 * e32.rows[0].rel_l2,
             "zero-shot s=64 error within 2x of the s=32 test error");

    // fno3d temporal-axis shape/consistency checks (structural)
    FnoConfig m;
    m.variant = FnoVariant::fno3d;
    m.in_channels = 10;
    m.rnn_window = 10;
    m.horizon = 10;
    m.width = 6;
    m.kmax = {3, 3, 2};
    m.n_layers = 2;
    m.q_hidden = 8;
    FnoModel model = make_model(m, 7);
    Field out32 = forward(model, random_field({32, 32, 10}, 9));
    c.expect(out32.shape() == Shape{32, 32, 10, 1}, "fno3d output shape at s=32");
    Field out64 = forward(model, random_field({64, 64, 10}, 9));
    c.expect(out64.shape() == Shape{64, 64, 10, 1}, "fno3d output shape at s=64");
    c.expect(out32.all_finite() && out64.all_finite(), "fno3d outputs finite");
    FnoConfig longer = m;
    longer.horizon = 15; // the same weights emit a longer temporal block
    FnoModel stretched;
    stretched.config = longer;
    stretched.params = model.params;
    stretched.norm = model.norm;
    Field out_long = forward(stretched, random_field({32, 32, 10}, 9));
    c.expect(out_long.shape() == Shape{32, 32, 15, 1}, "fno3d horizon retargeting");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 8: spectral claims
// --------------------------------------------------------------------------

bool criterion8(const Context& ctx) {
    CheckList c;
    // The spectral claims presume data generated at the native 256^2 grid and
    // downsampled to 64 (a 64-native run is band-limited to |k| <= 21 by the
    // 2/3 rule, so truncation at 20 would be structurally zero).
    RunConfig cfg = ns_cfg(ctx);
    cfg.set("data.n_train", "0");
    cfg.set("data.n_test", "8");
    cfg.set("data.resolution", "256");
    cfg.set("data.companions", "64");
    cfg.set("ns.record_interval", "5.0");
    cfg.set("run.seed", "1008");
    // the 256-native data lives in its own subdirectory so the s=64 companion
    // does not collide with the desk dataset of criteria 6/7/9
    std::string hires = ctx.work + "/hires";
    fs::create_directories(hires);
    {
        // ensure_dataset with explicit out dir
        bool fresh = sidecar_matches(hires + "/ns_test_s64.json", cfg.hash(), cfg.get_i64("run.seed")) &&
                     fs::exists(hires + "/ns_test_s64.inputs.fnot");
        if (!fresh) {
            note("generating the 256-native spectral-analysis dataset");
            GenReport r = run_gen(cfg, hires);
            note("generated in " + fmt(r.wall_seconds) + "s");
        } else {
            note("dataset cache hit: " + hires + "/ns_test_s64");
        }
    }

    StoredDataset test = load_dataset(hires + "/ns_test_s64");
    NsFrames frames = ns_frames_from(test);

    // truncation at 20 modes on the late-time fields (t = 20 is frame 4)
    double trunc_acc = 0.0;
    for (int64_t i = 0; i < frames.count(); ++i)
        trunc_acc += truncation_error(frames.frame(i, frames.recorded()), 20);
    double trunc = trunc_acc / static_cast<double>(frames.count());
    note("mean truncation error at kmax=20 (nu=1e-3, t=20): " + fmt(trunc));
    c.expect(trunc >= 0.01 && trunc <= 0.05, "truncation error " + fmt(trunc) + " in [0.01, 0.05]");

    // inertial-range slope at t = 10 and t = 20 (recorded frames 2 and 4)
    for (int64_t frame : {2L, 4L}) {
        std::vector<double> acc;
        for (int64_t i = 0; i < frames.count(); ++i) {
            auto bins = energy_spectrum(frames.frame(i, frame));
            if (bins.size() > acc.size()) acc.resize(bins.size(), 0.0);
            for (const auto& b : bins) acc[static_cast<size_t>(b.wavenumber)] += b.energy;
        }
        std::vector<SpectrumBin> mean_bins;
        for (size_t b = 0; b < acc.size(); ++b)
            mean_bins.push_back({static_cast<int64_t>(b), acc[b] / frames.count()});
        double slope = spectrum_slope(mean_bins, 4, 20);
        int64_t t = frame * 5;
        note("spectrum slope at t=" + std::to_string(t) + ": " + fmt(slope));
        c.expect(slope >= -2.2 && slope <= -1.3,
                 "slope at t=" + std::to_string(t) + " (" + fmt(slope) + ") in [-2.2, -1.3]");
    }

    if (!c.ok) {
        // Supplementary instrument check: the same pipeline in the regime the
        // source attributes high-frequency content to (nu = 1e-4). Reported
        // for diagnosis only; the criterion above is pinned to nu = 1e-3.
        GrfSpec g;
        g.scale = std::pow(7.0, 1.5);
        g.tau = 49.0;
        g.alpha = 2.5;
        g.dim = 2;
        NsProblem p;
        p.w0 = sample_grf(g, {256, 256}, RngStream(1008).derive(77));
        p.nu = 1e-4;
        p.t_final = 16.0;
        p.dt = 5e-4;
        p.record_interval = 8.0;
        p.forcing = ns_standard_forcing(256);
        NsTrajectory traj = solve_ns(p);
        Field w = downsample(traj.frame(1), {4, 4});
        auto bins = energy_spectrum(w);
        note("supplementary nu=1e-4, t=16: trunc20 " + fmt(truncation_error(w, 20)) +
             ", slope[4,20] " + fmt(spectrum_slope(bins, 4, 20)));
    }

    // the analyze interface emits the same quantities as CSV
    run_analyze_spectrum(cfg, hires + "/ns_test_s64.targets.fnot", 0,
                         ctx.work + "/ns_spectrum.csv");
    run_analyze_truncation(cfg, hires + "/ns_test_s64.targets.fnot", 0, 32,
                           ctx.work + "/ns_truncation.csv");
    c.expect(fs::exists(ctx.work + "/ns_spectrum.csv") &&
                 fs::exists(ctx.work + "/ns_truncation.csv"),
             "analysis CSVs written");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 9: Bayesian inversion
// --------------------------------------------------------------------------

RunConfig surrogate_cfg(const Context& ctx) {
    RunConfig cfg = ns_cfg(ctx);
    cfg.set("model.variant", "fno2d"); // direct w0 -> w(T_obs) surrogate
    cfg.set("model.width", "32");
    cfg.set("model.kmax", "12,12");
    cfg.set("train.epochs", "120");
    cfg.set("mcmc.t_obs", "20.0");
    return cfg;
}

RunConfig invert_cfg(const Context& ctx) {
    RunConfig cfg = ns_cfg(ctx);
    cfg.set("mcmc.t_obs", "20.0");
    cfg.set("mcmc.dt", "2e-2");
    cfg.set("mcmc.obs_grid", "7");
    cfg.set("mcmc.beta", "0.05");
    cfg.set("mcmc.samples", "2000");
    cfg.set("mcmc.burn_in", "500");
    cfg.set("mcmc.thin", "20");
    cfg.set("run.seed", "1009");
    return cfg;
}

bool conjugate_toy(CheckList& c) {
    const int64_t s = 8;
    GrfSpec prior;
    prior.scale = 1.0;
    prior.tau = 4.0;
    prior.alpha = 1.5;
    prior.dim = 1;
    ObservationOperator op;
    op.resolution = s;
    op.sigma_noise = 0.3;
    op.indices = {1, 4, 6};
    op.offsets.assign(6, 0.0);
    Field truth = sample_grf(prior, {s}, RngStream(7).derive(0));
    RngStream noise(12345);
    std::vector<double> obs = op.observe(truth);
    for (auto& y : obs) y += op.sigma_noise * noise.next_gauss();

    auto cov = [&](int64_t p, int64_t q) {
        double acc = 0;
        for (int64_t i = 0; i < s; ++i) {
            int64_t k = signed_frequency(i, s);
            double sg = grf_mode_std(prior, {k});
            acc += sg * sg * std::cos(2 * M_PI * k * static_cast<double>(p - q) / s);
        }
        return acc;
    };
    // 3x3 conjugate solve
    double A[9], b3[3], z[3];
    for (int i = 0; i < 3; ++i) {
        b3[i] = obs[static_cast<size_t>(i)];
        for (int j = 0; j < 3; ++j)
            A[i * 3 + j] = cov(op.indices[static_cast<size_t>(i)], op.indices[static_cast<size_t>(j)]) +
                           (i == j ? op.sigma_noise * op.sigma_noise : 0.0);
    }
    for (int col = 0; col < 3; ++col) {
        for (int r = col + 1; r < 3; ++r) {
            double f = A[r * 3 + col] / A[col * 3 + col];
            for (int cc = col; cc < 3; ++cc) A[r * 3 + cc] -= f * A[col * 3 + cc];
            b3[r] -= f * b3[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double acc = b3[r];
        for (int cc = r + 1; cc < 3; ++cc) acc -= A[r * 3 + cc] * z[cc];
        z[r] = acc / A[r * 3 + r];
    }
    std::vector<double> want(static_cast<size_t>(s), 0.0);
    for (int64_t p = 0; p < s; ++p)
        for (int i = 0; i < 3; ++i)
            want[static_cast<size_t>(p)] += cov(p, op.indices[static_cast<size_t>(i)]) * z[i];

    McmcConfig mc;
    mc.beta = 0.5;
    mc.prior = prior;
    mc.resolution = {s};
    mc.n_samples = 600000;
    mc.burn_in = 5000;
    mc.thin = 200;
    mc.seed = 41;
    Chain chain = run_mcmc(mc, obs, op, [](const Field& w) { return w; });
    double num = 0, den = 0;
    for (int64_t p = 0; p < s; ++p) {
        num += (chain.mean[p] - want[static_cast<size_t>(p)]) *
               (chain.mean[p] - want[static_cast<size_t>(p)]);
        den += want[static_cast<size_t>(p)] * want[static_cast<size_t>(p)];
    }
    double err = std::sqrt(num / den);
    note("conjugate toy posterior-mean error " + fmt(err));
    c.expect(err < 0.05, "conjugate toy within 5%");
    return c.ok;
}

bool criterion9(const Context& ctx) {
    CheckList c;
    conjugate_toy(c);

    RunConfig cfg = ns_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "ns", {64, 32}));

    RunConfig sur = surrogate_cfg(ctx);
    std::string sur_ckpt = ensure_checkpoint(ctx, sur, "ns_surrogate", ctx.work + "/ns_train_s64",
                                             ctx.work + "/ns_test_s64");
    EvalReport sur_eval = run_eval(sur, sur_ckpt, {ctx.work + "/ns_test_s64"});
    note("surrogate w0 -> w(T) test rel-L2 " + fmt(sur_eval.rows[0].rel_l2));

    RunConfig inv = invert_cfg(ctx);
    std::string obs_path = ctx.work + "/ns_obs.fnot";
    if (!fs::exists(obs_path)) run_make_observations(inv, obs_path);

    auto chain_cached = [&](const std::string& tag) {
        return sidecar_matches(ctx.work + "/" + tag + ".json", inv.hash(), inv.get_i64("run.seed")) &&
               fs::exists(ctx.work + "/" + tag + ".mean.fnot");
    };
    auto chain_stats = [&](const std::string& tag, const std::string& forward) {
        RunConfig r = inv;
        r.set("mcmc.forward", forward);
        if (forward == "surrogate") r.set("mcmc.surrogate_checkpoint", sur_ckpt);
        if (!chain_cached(tag)) {
            note("running " + forward + " chain (" + tag + ")");
            InvertReport rep = run_invert(r, obs_path, ctx.work, tag);
            note(forward + " chain acceptance " + fmt(rep.acceptance_rate) + ", misfit " +
                 fmt(rep.posterior_misfit) + " vs prior " + fmt(rep.prior_misfit));
            return rep;
        }
        note("chain cache hit: " + tag);
        std::ifstream f(ctx.work + "/" + tag + ".json");
        json j = json::parse(f);
        InvertReport rep;
        rep.acceptance_rate = j["acceptance_rate"];
        rep.forward_calls = j["forward_calls"];
        rep.posterior_misfit = j["posterior_misfit"];
        rep.prior_misfit = j["prior_misfit"];
        rep.mean_path = ctx.work + "/" + tag + ".mean.fnot";
        return rep;
    };

    InvertReport solver_rep = chain_stats("invert_solver", "solver");
    InvertReport sur_rep = chain_stats("invert_surrogate", "surrogate");

    c.expect(solver_rep.acceptance_rate >= 0.1 && solver_rep.acceptance_rate <= 0.6,
             "solver-chain acceptance " + fmt(solver_rep.acceptance_rate) + " in [0.1, 0.6]");
    c.expect(solver_rep.posterior_misfit <= 0.5 * solver_rep.prior_misfit,
             "posterior-mean misfit " + fmt(solver_rep.posterior_misfit) + " <= 0.5x prior " +
                 fmt(solver_rep.prior_misfit));

    Field mean_solver =
        TensorContainer::read(ctx.work + "/invert_solver.mean.fnot").field("posterior_mean");
    Field mean_sur =
        TensorContainer::read(ctx.work + "/invert_surrogate.mean.fnot").field("posterior_mean");
    double ms = 0, msur = 0;
    for (int64_t i = 0; i < mean_solver.size(); ++i) {
        ms += mean_solver[i];
        msur += mean_sur[i];
    }
    ms /= mean_solver.size();
    msur /= mean_sur.size();
    double cov_acc = 0, var_a = 0, var_b = 0;
    for (int64_t i = 0; i < mean_solver.size(); ++i) {
        double a = mean_solver[i] - ms, b = mean_sur[i] - msur;
        cov_acc += a * b;
        var_a += a * a;
        var_b += b * b;
    }
    double corr = cov_acc / std::sqrt(var_a * var_b);
    note("solver-vs-surrogate posterior-mean correlation " + fmt(corr));
    c.expect(corr >= 0.9, "posterior-mean correlation " + fmt(corr) + " >= 0.9");
    return c.ok;
}

// --------------------------------------------------------------------------
// criterion 10: speed property
// --------------------------------------------------------------------------

bool criterion10(const Context& ctx) {
    CheckList c;
    RunConfig cfg = ns_cfg(ctx);
    ensure_dataset(ctx, cfg, stems_for(ctx, "ns", {64, 32}));
    RunConfig sur = surrogate_cfg(ctx);
    std::string sur_ckpt = ensure_checkpoint(ctx, sur, "ns_surrogate", ctx.work + "/ns_train_s64",
                                             ctx.work + "/ns_test_s64");
    RunConfig bench = invert_cfg(ctx);
    BenchReport r1 = run_bench(bench, sur_ckpt, ctx.work + "/bench.csv");
    note("fno forward median " + fmt(r1.fno_median_seconds) + "s, solver median " +
         fmt(r1.solver_median_seconds) + "s, ratio " + fmt(r1.ratio) + "x");
    c.expect(r1.ratio >= 10.0, "speedup " + fmt(r1.ratio) + " >= 10x");

    BenchReport r2 = run_bench(bench, sur_ckpt);
    double drift = std::abs(r2.fno_median_seconds - r1.fno_median_seconds) /
                   std::max(r1.fno_median_seconds, 1e-12);
    double drift_solver = std::abs(r2.solver_median_seconds - r1.solver_median_seconds) /
                          std::max(r1.solver_median_seconds, 1e-12);
    note("median-to-median drift: fno " + fmt(drift) + ", solver " + fmt(drift_solver));
    c.expect(drift < 0.2 && drift_solver < 0.2, "repeated medians vary < 20%");
    return c.ok;
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    const char* dir = std::getenv("FNO_ACCEPT_DIR");
    ctx.work = dir && *dir ? dir : "acceptance_work";
    const char* threads = std::getenv("FNO_ACCEPT_THREADS");
    ctx.threads = threads && *threads ? std::atoi(threads) : hardware_threads();
    fs::create_directories(ctx.work);

    struct Criterion {
        const char* name;
        const char* title;
        std::function<bool(const Context&)> run;
    };
    const Criterion criteria[] = {
        {"c1", "FFT/numerics suite", criterion1},
        {"c2", "gradient correctness (finite differences)", criterion2},
        {"c3", "solver oracles", criterion3},
        {"c4", "Burgers benchmark", criterion4},
        {"c5", "Darcy benchmark", criterion5},
        {"c6", "Navier-Stokes desk benchmark", criterion6},
        {"c7", "zero-shot super-resolution", criterion7},
        {"c8", "spectral claims", criterion8},
        {"c9", "Bayesian inversion", criterion9},
        {"c10", "speed property", criterion10},
    };

    std::set<std::string> want;
    for (int i = 1; i < argc; ++i) want.insert(argv[i]);
    bool all = want.empty() || want.count("all");

    int failures = 0;
    for (const auto& cr : criteria) {
        if (!all && !want.count(cr.name)) continue;
        std::printf("criterion %s: %s\n", cr.name + 1, cr.title);
        bool ok = false;
        std::string error;
        try {
            ok = cr.run(ctx);
        } catch (const std::exception& e) {
            error = e.what();
        }
        if (ok) {
            std::printf("PASS criterion %s: %s\n", cr.name + 1, cr.title);
        } else {
            std::printf("FAIL criterion %s: %s%s%s\n", cr.name + 1, cr.title,
                        error.empty() ? "" : " - ", error.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
