#include "fno/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fno/burgers.hpp"
#include "fno/darcy.hpp"
#include "fno/navier_stokes.hpp"
#include "fno/parallel.hpp"
#include "fno/spectra.hpp"
#include "fno/tensor_io.hpp"

namespace fno {

namespace {

using nlohmann::json;

constexpr uint64_t kTrainSplit = 0x747261696eULL;
constexpr uint64_t kTestSplit = 0x74657374ULL;
constexpr uint64_t kModelInit = 0x6d6f64656cULL;
constexpr uint64_t kObsSalt = 0x6f627365ULL;

void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        FNO_REQUIRE(f.good(), DataError, "cannot write '", tmp, "'");
        f << text;
        FNO_REQUIRE(f.good(), DataError, "write failed for '", tmp, "'");
    }
    FNO_REQUIRE(std::rename(tmp.c_str(), path.c_str()) == 0, DataError, "atomic rename to '", path,
                "' failed");
}

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int64_t downsample_factor(int64_t native, int64_t target) {
    FNO_REQUIRE(target >= 2 && target <= native, DataError, "companion resolution ", target,
                " not below native ", native);
    if (native % target == 0) return native / target;
    if ((native - 1) % (target - 1) == 0) return (native - 1) / (target - 1);
    throw DataError(concat("companion resolution ", target, " incompatible with native ", native));
}

struct SplitPlan {
    std::string name;
    int64_t count;
    uint64_t salt;
};

} // namespace

GrfSpec grf_spec_from(const RunConfig& cfg) {
    GrfSpec g;
    g.scale = cfg.get_f64("grf.scale");
    g.tau = cfg.get_f64("grf.tau");
    g.alpha = cfg.get_f64("grf.alpha");
    const std::string& b = cfg.get("grf.boundary");
    if (b == "periodic")
        g.boundary = GrfBoundary::periodic;
    else if (b == "neumann")
        g.boundary = GrfBoundary::zero_neumann;
    else
        throw UsageError(concat("grf.boundary '", b, "' must be periodic|neumann"));
    const std::string& p = cfg.get("grf.pushforward");
    if (p == "none")
        g.push = GrfPushforward::none;
    else if (p == "threshold")
        g.push = GrfPushforward::threshold;
    else
        throw UsageError(concat("grf.pushforward '", p, "' must be none|threshold"));
    g.push_threshold = cfg.get_f64("grf.push_threshold");
    g.push_above = cfg.get_f64("grf.push_above");
    g.push_below = cfg.get_f64("grf.push_below");
    return g;
}

FnoConfig model_config_from(const RunConfig& cfg) {
    FnoConfig m;
    m.variant = variant_from_name(cfg.get("model.variant"));
    m.width = static_cast<int>(cfg.get_i64("model.width"));
    m.kmax = cfg.get_i64_list("model.kmax");
    m.n_layers = static_cast<int>(cfg.get_i64("model.layers"));
    m.batch_norm = cfg.get_bool("model.batch_norm");
    m.q_hidden = static_cast<int>(cfg.get_i64("model.q_hidden"));
    m.rnn_window = static_cast<int>(cfg.get_i64("model.rnn_window"));
    m.horizon = static_cast<int>(cfg.get_i64("model.horizon"));
    m.grid = cfg.get("model.grid") == "box" ? GridKind::box : GridKind::torus;
    switch (m.variant) {
        case FnoVariant::fno1d:
        case FnoVariant::fno2d: m.in_channels = 1; break;
        case FnoVariant::fno2d_rnn: m.in_channels = m.rnn_window; break;
        case FnoVariant::fno3d: m.in_channels = m.rnn_window; break;
    }
    if (m.kmax.size() == 1 && m.spatial_rank() > 1)
        m.kmax.assign(static_cast<size_t>(m.spatial_rank()), m.kmax[0]);
    m.validate();
    return m;
}

// --------------------------------------------------------------------------
// gen
// --------------------------------------------------------------------------

namespace {

json base_meta(const RunConfig& cfg, const std::string& kind, const std::string& split,
               int64_t count, int64_t resolution) {
    json meta;
    meta["kind"] = kind;
    meta["split"] = split;
    meta["n"] = count;
    meta["resolution"] = resolution;
    meta["seed"] = cfg.get_i64("run.seed");
    meta["config_hash"] = hash_hex(cfg.hash());
    return meta;
}

void write_with_companions(const RunConfig& cfg, const std::string& out_dir,
                           const std::string& kind, const std::string& split, const Field& inputs,
                           const Field& targets, int spatial_rank, json meta, double wall,
                           GenReport& report) {
    int64_t native = inputs.extent(1);
    std::vector<int64_t> resolutions{native};
    for (int64_t r : cfg.get_i64_list("data.companions")) resolutions.push_back(r);
    for (int64_t res : resolutions) {
        Field in = inputs, tg = targets;
        if (res != native) {
            int64_t f = downsample_factor(native, res);
            in = downsample_stack(inputs, spatial_rank, f);
            tg = downsample_stack(targets, spatial_rank, f);
        }
        meta["resolution"] = res;
        // the containers embed only deterministic provenance; timing lives in
        // the sidecar so fixed-seed reruns stay byte-identical
        json sidecar = meta;
        sidecar["wall_seconds"] = wall;
        std::string stem = concat(out_dir, "/", kind, "_", split, "_s", res);
        write_dataset(stem, in, tg, meta.dump(2), sidecar.dump(2));
        report.stems.push_back(stem);
    }
}

} // namespace

GenReport run_gen(const RunConfig& cfg, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string kind = cfg.get("data.kind");
    const int64_t s = cfg.get_i64("data.resolution");
    const uint64_t seed = static_cast<uint64_t>(cfg.get_i64("run.seed"));
    const int threads = static_cast<int>(cfg.get_i64("run.threads"));
    GrfSpec grf = grf_spec_from(cfg);
    GenReport report;
    report.n_train = cfg.get_i64("data.n_train");
    report.n_test = cfg.get_i64("data.n_test");

    SplitPlan plans[2] = {{"train", report.n_train, kTrainSplit},
                          {"test", report.n_test, kTestSplit}};

    for (const SplitPlan& plan : plans) {
        if (plan.count == 0) continue;
        double split_t0 = wall_since(t0);
        if (kind == "burgers") {
            grf.dim = 1;
            Field inputs(Shape{plan.count, s});
            Field targets(Shape{plan.count, s});
            BurgersProblem base;
            base.nu = cfg.get_f64("burgers.nu");
            base.t_final = cfg.get_f64("burgers.t_final");
            base.dt_max = cfg.get_f64("burgers.dt_max");
            base.cfl = cfg.get_f64("burgers.cfl");
            parallel_for(plan.count, threads, [&](int64_t i) {
                RngStream stream = RngStream(seed).derive(plan.salt).derive(static_cast<uint64_t>(i));
                Field u0 = sample_grf(grf, {s}, stream);
                BurgersProblem p = base;
                p.u0 = u0;
                Field u1;
                try {
                    u1 = solve_burgers(p);
                } catch (const NumericError& e) {
                    throw NumericError(concat(plan.name, " sample ", i, ": ", e.what()));
                }
                std::copy(u0.data(), u0.data() + s, inputs.data() + i * s);
                std::copy(u1.data(), u1.data() + s, targets.data() + i * s);
            });
            json meta = base_meta(cfg, kind, plan.name, plan.count, s);
            meta["solver"] = {{"nu", base.nu}, {"t_final", base.t_final},
                              {"dt_max", base.dt_max}, {"cfl", base.cfl}};
            write_with_companions(cfg, out_dir, kind, plan.name, inputs, targets, 1, meta,
                                  wall_since(t0) - split_t0, report);
        } else if (kind == "darcy") {
            grf.dim = 2;
            Field inputs(Shape{plan.count, s, s});
            Field targets(Shape{plan.count, s, s});
            DarcyProblem base;
            base.harmonic_faces = cfg.get_bool("darcy.harmonic_faces");
            base.cg_tol = cfg.get_f64("darcy.cg_tol");
            base.cg_max_iter = cfg.get_i64("darcy.cg_max_iter");
            double forcing = cfg.get_f64("darcy.forcing");
            parallel_for(plan.count, threads, [&](int64_t i) {
                RngStream stream = RngStream(seed).derive(plan.salt).derive(static_cast<uint64_t>(i));
                DarcyProblem p = base;
                p.a = sample_grf(grf, {s, s}, stream);
                p.f = Field(Shape{s, s}, forcing);
                Field u;
                try {
                    u = solve_darcy(p);
                } catch (const NumericError& e) {
                    throw NumericError(concat(plan.name, " sample ", i, ": ", e.what()));
                }
                std::copy(p.a.data(), p.a.data() + s * s, inputs.data() + i * s * s);
                std::copy(u.data(), u.data() + s * s, targets.data() + i * s * s);
            });
            json meta = base_meta(cfg, kind, plan.name, plan.count, s);
            meta["solver"] = {{"forcing", forcing}, {"harmonic_faces", base.harmonic_faces},
                              {"cg_tol", base.cg_tol}};
            write_with_companions(cfg, out_dir, kind, plan.name, inputs, targets, 2, meta,
                                  wall_since(t0) - split_t0, report);
        } else if (kind == "ns") {
            grf.dim = 2;
            NsProblem base;
            base.nu = cfg.get_f64("ns.nu");
            base.t_final = cfg.get_f64("ns.t_final");
            base.dt = cfg.get_f64("ns.dt");
            base.record_interval = cfg.get_f64("ns.record_interval");
            base.cfl_limit = cfg.get_f64("ns.cfl_limit");
            bool standard_forcing = cfg.get("ns.forcing") == "standard";
            int64_t n_rec = static_cast<int64_t>(std::llround(base.t_final / base.record_interval));
            Field inputs(Shape{plan.count, s, s});
            Field targets(Shape{plan.count, s, s, n_rec});
            Field forcing = standard_forcing ? ns_standard_forcing(s) : Field{};
            parallel_for(plan.count, threads, [&](int64_t i) {
                RngStream stream = RngStream(seed).derive(plan.salt).derive(static_cast<uint64_t>(i));
                NsProblem p = base;
                p.w0 = sample_grf(grf, {s, s}, stream);
                p.forcing = forcing;
                NsTrajectory traj;
                try {
                    traj = solve_ns(p);
                } catch (const NumericError& e) {
                    throw NumericError(concat(plan.name, " sample ", i, ": ", e.what()));
                }
                std::copy(p.w0.data(), p.w0.data() + s * s, inputs.data() + i * s * s);
                std::copy(traj.snapshots.data(), traj.snapshots.data() + s * s * n_rec,
                          targets.data() + i * s * s * n_rec);
            });
            json meta = base_meta(cfg, kind, plan.name, plan.count, s);
            meta["solver"] = {{"nu", base.nu}, {"t_final", base.t_final}, {"dt", base.dt},
                              {"record_interval", base.record_interval},
                              {"forcing", cfg.get("ns.forcing")}};
            write_with_companions(cfg, out_dir, kind, plan.name, inputs, targets, 2, meta,
                                  wall_since(t0) - split_t0, report);
        } else {
            throw UsageError(concat("data.kind '", kind, "' must be burgers|darcy|ns"));
        }
    }
    report.wall_seconds = wall_since(t0);
    return report;
}

// --------------------------------------------------------------------------
// checkpoints
// --------------------------------------------------------------------------

void save_checkpoint(const std::string& path, const FnoModel& model, const AdamState& adam,
                     int64_t epoch_completed, uint64_t config_hash) {
    TensorContainer c;
    c.add_text("__config__", model.config.to_text());
    c.add_text("__config_hash__", hash_hex(config_hash));
    for (const auto& seg : model.params.segments()) {
        std::vector<double> data(model.params.data() + seg.offset,
                                 model.params.data() + seg.offset + seg.count);
        c.add("param/" + seg.name, seg.dims, std::move(data));
    }
    for (int t = 0; t < model.config.n_layers; ++t) {
        c.add(concat("norm/mean/", t), {model.config.width},
              model.norm.running_mean[static_cast<size_t>(t)]);
        c.add(concat("norm/var/", t), {model.config.width},
              model.norm.running_var[static_cast<size_t>(t)]);
    }
    c.add("adam/m", {static_cast<int64_t>(adam.m.size())}, adam.m);
    c.add("adam/v", {static_cast<int64_t>(adam.v.size())}, adam.v);
    c.add("io_norm", {4}, {model.io.in_mean, model.io.in_std, model.io.out_mean, model.io.out_std});
    c.add("__meta__", {2}, {static_cast<double>(epoch_completed), static_cast<double>(adam.t)});
    c.write(path);
}

Checkpoint load_checkpoint(const std::string& path) {
    TensorContainer c = TensorContainer::read(path);
    Checkpoint ck;
    ck.model.config = FnoConfig::from_text(c.text("__config__"));
    ck.model.params = ParamStore::layout_for(ck.model.config);
    for (const auto& seg : ck.model.params.segments()) {
        Field data = c.field("param/" + seg.name);
        FNO_REQUIRE(data.size() == seg.count, DataError, "checkpoint '", path, "': segment '",
                    seg.name, "' has wrong size");
        std::copy(data.data(), data.data() + seg.count, ck.model.params.data() + seg.offset);
    }
    ck.model.norm = NormState::fresh(ck.model.config);
    for (int t = 0; t < ck.model.config.n_layers; ++t) {
        ck.model.norm.running_mean[static_cast<size_t>(t)] = c.field(concat("norm/mean/", t)).values();
        ck.model.norm.running_var[static_cast<size_t>(t)] = c.field(concat("norm/var/", t)).values();
    }
    ck.adam.m = c.field("adam/m").values();
    ck.adam.v = c.field("adam/v").values();
    if (c.has("io_norm")) {
        Field io = c.field("io_norm");
        ck.model.io = {io[0], io[1], io[2], io[3]};
    }
    Field meta = c.field("__meta__");
    ck.epoch_completed = static_cast<int64_t>(meta[0]);
    ck.adam.t = static_cast<int64_t>(meta[1]);
    ck.config_hash = std::stoull(c.text("__config_hash__"), nullptr, 16);
    FNO_REQUIRE(ck.model.params.all_finite(), DataError, "checkpoint '", path,
                "' contains non-finite parameters");
    return ck;
}

// --------------------------------------------------------------------------
// train / eval
// --------------------------------------------------------------------------

namespace {

struct BuiltSources {
    std::unique_ptr<SampleSource> train;
    std::unique_ptr<SampleSource> test;
    std::shared_ptr<const NsFrames> test_frames; // kept for rollout evaluation
    std::string kind;
};

std::string dataset_kind(const StoredDataset& ds) {
    return json::parse(ds.meta_json).at("kind").get<std::string>();
}

std::unique_ptr<SampleSource> source_for(const RunConfig& cfg, const FnoConfig& model_cfg,
                                         const StoredDataset& ds,
                                         std::shared_ptr<const NsFrames>* frames_out = nullptr) {
    std::string kind = dataset_kind(ds);
    if (kind == "burgers" || kind == "darcy") {
        FNO_REQUIRE(model_cfg.variant == (kind == "burgers" ? FnoVariant::fno1d : FnoVariant::fno2d),
                    UsageError, "model variant does not match the ", kind, " dataset layout");
        return std::make_unique<SlicePairSource>(ds.inputs, ds.targets);
    }
    FNO_REQUIRE(kind == "ns", DataError, "unknown dataset kind '", kind, "'");
    auto frames = std::make_shared<NsFrames>(ns_frames_from(ds));
    if (frames_out) *frames_out = frames;
    switch (model_cfg.variant) {
        case FnoVariant::fno2d_rnn:
            return std::make_unique<RnnWindowSource>(frames, model_cfg.rnn_window,
                                                     cfg.get_i64("train.window_stride"));
        case FnoVariant::fno3d:
            return std::make_unique<SpaceTimeBlockSource>(frames, model_cfg.rnn_window,
                                                          model_cfg.horizon);
        case FnoVariant::fno2d: {
            int64_t frame = static_cast<int64_t>(
                std::llround(cfg.get_f64("mcmc.t_obs") / cfg.get_f64("ns.record_interval")));
            return std::make_unique<NsPairSource>(frames, frame);
        }
        default:
            throw UsageError("ns datasets pair with fno2d, fno2d-rnn or fno3d variants");
    }
}

/// Evaluation metric for a checkpointed model on a dataset: direct pairs for
/// pair-style sources, autoregressive rollout for the RNN variant.
double evaluate_on(const RunConfig& cfg, const FnoModel& model, const StoredDataset& ds,
                   int threads) {
    if (dataset_kind(ds) == "ns" && model.config.variant == FnoVariant::fno2d_rnn) {
        auto frames = ns_frames_from(ds);
        int64_t horizon = frames.recorded() - model.config.rnn_window;
        FNO_REQUIRE(horizon >= 1, DataError, "trajectory too short for a rollout evaluation");
        RolloutSet rs = make_rollout_set(frames, model.config.rnn_window, horizon);
        return evaluate_rollout(model, rs.seeds, rs.truths, threads);
    }
    std::shared_ptr<const NsFrames> keep;
    auto source = source_for(cfg, model.config, ds, &keep);
    return evaluate(model, *source, threads);
}

} // namespace

TrainReport run_train(const RunConfig& cfg, const std::string& train_stem,
                      const std::string& test_stem, const std::string& out_dir,
                      const std::string& name, const std::string& resume_path) {
    auto t0 = std::chrono::steady_clock::now();
    FnoConfig model_cfg = model_config_from(cfg);
    StoredDataset train_ds = load_dataset(train_stem);
    StoredDataset test_ds = load_dataset(test_stem);

    uint64_t seed = static_cast<uint64_t>(cfg.get_i64("run.seed"));
    FnoModel model;
    AdamState adam;
    int start_epoch = 0;
    if (!resume_path.empty()) {
        Checkpoint ck = load_checkpoint(resume_path);
        FNO_REQUIRE(ck.model.config.to_text() == model_cfg.to_text(), UsageError,
                    "resume checkpoint architecture differs from the configured model");
        model = std::move(ck.model);
        adam = std::move(ck.adam);
        start_epoch = static_cast<int>(ck.epoch_completed) + 1;
    } else {
        model = make_model(model_cfg, RngStream(seed).derive(kModelInit).state());
        adam = AdamState::fresh(model.params);
        // bake training-set statistics into the operator's IO affines
        auto stats_src = source_for(cfg, model_cfg, train_ds);
        double s_in = 0, s2_in = 0, s_out = 0, s2_out = 0;
        int64_t n_in = 0, n_out = 0;
        Field in, tg;
        for (int64_t i = 0; i < stats_src->size(); ++i) {
            stats_src->load(i, in, tg);
            for (int64_t j = 0; j < in.size(); ++j) {
                s_in += in[j];
                s2_in += in[j] * in[j];
            }
            for (int64_t j = 0; j < tg.size(); ++j) {
                s_out += tg[j];
                s2_out += tg[j] * tg[j];
            }
            n_in += in.size();
            n_out += tg.size();
        }
        IoNorm io;
        io.in_mean = s_in / static_cast<double>(n_in);
        io.in_std = std::sqrt(std::max(s2_in / n_in - io.in_mean * io.in_mean, 1e-24));
        io.out_mean = s_out / static_cast<double>(n_out);
        io.out_std = std::sqrt(std::max(s2_out / n_out - io.out_mean * io.out_mean, 1e-24));
        model.io = io;
    }

    auto train_src = source_for(cfg, model_cfg, train_ds);
    std::shared_ptr<const NsFrames> test_frames;
    auto test_src = source_for(cfg, model_cfg, test_ds, &test_frames);

    TrainConfig tc;
    tc.epochs = static_cast<int>(cfg.get_i64("train.epochs"));
    tc.batch = static_cast<int>(cfg.get_i64("train.batch"));
    tc.lr0 = cfg.get_f64("train.lr");
    tc.halve_every = static_cast<int>(cfg.get_i64("train.halve_every"));
    tc.seed = seed;
    tc.threads = static_cast<int>(cfg.get_i64("run.threads"));
    tc.divergence_limit = cfg.get_f64("train.divergence_limit");
    tc.start_epoch = start_epoch;

    TrainReport report;
    report.param_count = model.params.size();
    report.checkpoint_path = concat(out_dir, "/", name, ".ckpt.fnot");
    report.metrics_path = concat(out_dir, "/", name, ".metrics.csv");

    if (resume_path.empty()) {
        write_text_atomic(report.metrics_path, "epoch,lr,train_rel_l2,test_rel_l2,wall_seconds\n");
        json sidecar;
        sidecar["name"] = name;
        sidecar["config_hash"] = hash_hex(cfg.hash());
        sidecar["seed"] = cfg.get_i64("run.seed");
        sidecar["train_data"] = train_stem;
        sidecar["test_data"] = test_stem;
        sidecar["param_count"] = report.param_count;
        write_text_atomic(concat(out_dir, "/", name, ".json"), sidecar.dump(2));
    }

    uint64_t cfg_hash = cfg.hash();
    EpochCallback cb = [&](const EpochRecord& rec, const FnoModel& m, const AdamState& a) {
        save_checkpoint(report.checkpoint_path, m, a, rec.epoch, cfg_hash);
        std::ostringstream row;
        row << rec.epoch << "," << rec.lr << "," << rec.train_rel_l2 << "," << rec.test_rel_l2
            << "," << rec.wall_seconds << "\n";
        std::ofstream f(report.metrics_path, std::ios::app);
        f << row.str();
        report.final_train_rel_l2 = rec.train_rel_l2;
        report.final_test_rel_l2 = rec.test_rel_l2;
        report.epochs_run = rec.epoch + 1;
    };

    train(model, *train_src, *test_src, tc, adam, cb);
    report.wall_seconds = wall_since(t0);
    return report;
}

EvalReport run_eval(const RunConfig& cfg, const std::string& checkpoint,
                    const std::vector<std::string>& stems, int64_t resolution_override,
                    const std::string& out_csv) {
    Checkpoint ck = load_checkpoint(checkpoint);
    int threads = static_cast<int>(cfg.get_i64("run.threads"));
    EvalReport report;
    for (const std::string& stem : stems) {
        StoredDataset ds = load_dataset(stem);
        if (resolution_override > 0 && ds.inputs.extent(1) != resolution_override) {
            int spatial_rank = dataset_kind(ds) == "burgers" ? 1 : 2;
            int64_t f = downsample_factor(ds.inputs.extent(1), resolution_override);
            ds.inputs = downsample_stack(ds.inputs, spatial_rank, f);
            ds.targets = downsample_stack(ds.targets, spatial_rank, f);
        }
        EvalRow row;
        row.stem = stem;
        row.count = ds.count();
        row.resolution = Shape(ds.inputs.shape().begin() + 1, ds.inputs.shape().end());
        row.rel_l2 = evaluate_on(cfg, ck.model, ds, threads);
        report.rows.push_back(std::move(row));
    }
    if (!out_csv.empty()) {
        std::ostringstream os;
        os << "stem,resolution,count,rel_l2\n";
        for (const auto& r : report.rows)
            os << r.stem << "," << shape_str(r.resolution) << "," << r.count << "," << r.rel_l2
               << "\n";
        write_text_atomic(out_csv, os.str());
    }
    return report;
}

// --------------------------------------------------------------------------
// analysis
// --------------------------------------------------------------------------

namespace {

std::vector<Field> trajectory_frames(const std::string& targets_file, int64_t frame) {
    TensorContainer c = TensorContainer::read(targets_file);
    Field data = c.field("data");
    FNO_REQUIRE(data.rank() == 4, DataError, "'", targets_file,
                "' is not an ns trajectory container ([N,s,s,T] expected)");
    int64_t n = data.extent(0), s = data.extent(1), nt = data.extent(3);
    if (frame <= 0 || frame > nt) frame = nt;
    std::vector<Field> out;
    for (int64_t i = 0; i < n; ++i) {
        Field w(Shape{s, s});
        const double* src = data.data() + i * s * s * nt;
        for (int64_t p = 0; p < s * s; ++p) w[p] = src[p * nt + (frame - 1)];
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace

void run_analyze_spectrum(const RunConfig& cfg, const std::string& targets_file, int64_t frame,
                          const std::string& out_csv) {
    (void)cfg;
    std::vector<Field> frames = trajectory_frames(targets_file, frame);
    std::vector<double> acc;
    for (const Field& w : frames) {
        auto bins = energy_spectrum(w);
        if (bins.size() > acc.size()) acc.resize(bins.size(), 0.0);
        for (const auto& b : bins) acc[static_cast<size_t>(b.wavenumber)] += b.energy;
    }
    for (double& v : acc) v /= static_cast<double>(frames.size());

    // k^{-5/3} reference anchored at the first inertial bin
    const int64_t k0 = 4;
    double anchor = acc.size() > static_cast<size_t>(k0) ? acc[static_cast<size_t>(k0)] : 0.0;
    std::ostringstream os;
    os << "bin,energy,ref_k53\n";
    for (size_t b = 0; b < acc.size(); ++b) {
        double ref = (b >= 1 && anchor > 0.0)
                         ? anchor * std::pow(static_cast<double>(b) / static_cast<double>(k0), -5.0 / 3.0)
                         : 0.0;
        os << b << "," << acc[b] << "," << ref << "\n";
    }
    write_text_atomic(out_csv, os.str());
}

void run_analyze_truncation(const RunConfig& cfg, const std::string& targets_file, int64_t frame,
                            int64_t kmax_hi, const std::string& out_csv) {
    (void)cfg;
    std::vector<Field> frames = trajectory_frames(targets_file, frame);
    int64_t s = frames[0].extent(0);
    if (kmax_hi <= 0) kmax_hi = s / 2;
    std::ostringstream os;
    os << "kmax,rel_error\n";
    for (int64_t k = 0; k <= kmax_hi; ++k) {
        double acc = 0.0;
        for (const Field& w : frames) acc += truncation_error(w, k);
        os << k << "," << acc / static_cast<double>(frames.size()) << "\n";
    }
    write_text_atomic(out_csv, os.str());
}

// --------------------------------------------------------------------------
// bench / observations / invert
// --------------------------------------------------------------------------

BenchReport run_bench(const RunConfig& cfg, const std::string& checkpoint,
                      const std::string& out_csv) {
    Checkpoint ck = load_checkpoint(checkpoint);
    const int64_t s = cfg.get_i64("data.resolution");
    const double t_obs = cfg.get_f64("mcmc.t_obs");
    const double dt = cfg.get_f64("mcmc.dt");
    GrfSpec grf = grf_spec_from(cfg);
    grf.dim = 2;
    Field w0 = sample_grf(grf, {s, s},
                          RngStream(static_cast<uint64_t>(cfg.get_i64("run.seed"))).derive(kObsSalt));
    Field input(Shape{s, s, 1}, w0.values());

    const int64_t runs = 20;
    auto median_of = [&](const std::function<void()>& work, int64_t n) {
        std::vector<double> times;
        for (int64_t i = 0; i < n; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            work();
            times.push_back(wall_since(t0));
        }
        std::sort(times.begin(), times.end());
        return times[static_cast<size_t>(n / 2)];
    };

    forward(ck.model, input); // warm the FFT plan cache before timing
    BenchReport report;
    report.runs = runs;
    report.fno_median_seconds = median_of([&] { forward(ck.model, input); }, runs);

    NsProblem base;
    base.w0 = w0;
    base.nu = cfg.get_f64("ns.nu");
    base.forcing = cfg.get("ns.forcing") == "standard" ? ns_standard_forcing(s) : Field{};
    base.t_final = t_obs;
    base.dt = dt;
    base.record_interval = 0.0;
    report.solver_median_seconds = median_of([&] { solve_ns(base); }, runs);
    report.ratio = report.solver_median_seconds / report.fno_median_seconds;

    if (!out_csv.empty()) {
        std::ostringstream os;
        os << "metric,value\n";
        os << "fno_median_seconds," << report.fno_median_seconds << "\n";
        os << "solver_median_seconds," << report.solver_median_seconds << "\n";
        os << "ratio," << report.ratio << "\n";
        os << "runs," << report.runs << "\n";
        write_text_atomic(out_csv, os.str());
    }
    return report;
}

namespace {

NsProblem ns_problem_from(const RunConfig& cfg, Field w0, double t_final, double dt) {
    NsProblem p;
    p.w0 = std::move(w0);
    p.nu = cfg.get_f64("ns.nu");
    int64_t s = p.w0.extent(0);
    p.forcing = cfg.get("ns.forcing") == "standard" ? ns_standard_forcing(s) : Field{};
    p.t_final = t_final;
    p.dt = dt;
    p.record_interval = 0.0; // final state only
    p.cfl_limit = cfg.get_f64("ns.cfl_limit");
    return p;
}

} // namespace

ObsReport run_make_observations(const RunConfig& cfg, const std::string& out_path) {
    const int64_t s = cfg.get_i64("data.resolution");
    const double t_obs = cfg.get_f64("mcmc.t_obs");
    const int64_t m = cfg.get_i64("mcmc.obs_grid");
    const uint64_t seed = static_cast<uint64_t>(cfg.get_i64("run.seed"));
    GrfSpec grf = grf_spec_from(cfg);
    grf.dim = 2;

    Field w0 = sample_grf(grf, {s, s}, RngStream(seed).derive(kObsSalt).derive(0));
    NsProblem p = ns_problem_from(cfg, w0, t_obs, cfg.get_f64("ns.dt"));
    Field w_obs = solve_ns(p).frame(0);

    ObservationOperator op = ObservationOperator::uniform_grid(m, s, t_obs, 1.0);
    std::vector<double> clean = op.observe(w_obs);
    double sigma = cfg.get_f64("mcmc.sigma_noise");
    if (sigma <= 0.0) {
        double rms = 0.0;
        for (double v : clean) rms += v * v;
        rms = std::sqrt(rms / static_cast<double>(clean.size()));
        sigma = 0.1 * rms;
    }
    RngStream noise = RngStream(seed).derive(kObsSalt).derive(1);
    std::vector<double> obs = clean;
    for (double& v : obs) v += sigma * noise.next_gauss();

    TensorContainer c;
    c.add_field("true_w0", w0);
    c.add_field("true_wT", w_obs);
    c.add("observations", {static_cast<int64_t>(obs.size())}, obs);
    std::vector<double> idx(op.indices.begin(), op.indices.end());
    c.add("indices", {static_cast<int64_t>(idx.size())}, idx);
    c.add("offsets", {static_cast<int64_t>(op.offsets.size())}, op.offsets);
    c.add_scalar("sigma_noise", sigma);
    c.add_scalar("t_obs", t_obs);
    c.add_scalar("obs_grid", static_cast<double>(m));
    json meta;
    meta["config_hash"] = hash_hex(cfg.hash());
    meta["seed"] = cfg.get_i64("run.seed");
    c.add_text("meta", meta.dump(2));
    c.write(out_path);
    return {out_path, sigma};
}

InvertReport run_invert(const RunConfig& cfg, const std::string& obs_path,
                        const std::string& out_dir, const std::string& tag) {
    TensorContainer oc = TensorContainer::read(obs_path);
    Field true_w0 = oc.field("true_w0");
    const int64_t s = true_w0.extent(0);

    ObservationOperator op;
    op.resolution = s;
    op.obs_grid = static_cast<int64_t>(oc.scalar("obs_grid"));
    op.t_obs = oc.scalar("t_obs");
    op.sigma_noise = oc.scalar("sigma_noise");
    for (double v : oc.field("indices").values()) op.indices.push_back(static_cast<int64_t>(v));
    op.offsets = oc.field("offsets").values();
    std::vector<double> obs = oc.field("observations").values();

    const std::string forward_kind = cfg.get("mcmc.forward");
    ForwardMap fwd;
    Checkpoint surrogate;
    if (forward_kind == "solver") {
        double dt = cfg.get_f64("mcmc.dt");
        fwd = [&cfg, dt, t_obs = op.t_obs](const Field& w0) {
            NsProblem p = ns_problem_from(cfg, w0, t_obs, dt);
            return solve_ns(p).frame(0);
        };
    } else if (forward_kind == "surrogate") {
        surrogate = load_checkpoint(cfg.get("mcmc.surrogate_checkpoint"));
        fwd = [&surrogate, s](const Field& w0) {
            Field input(Shape{s, s, 1}, w0.values());
            Field out = forward(surrogate.model, input);
            return Field(Shape{s, s}, std::move(out.values()));
        };
    } else {
        throw UsageError(concat("mcmc.forward '", forward_kind, "' must be solver|surrogate"));
    }

    McmcConfig mc;
    mc.beta = cfg.get_f64("mcmc.beta");
    mc.n_samples = cfg.get_i64("mcmc.samples");
    mc.burn_in = cfg.get_i64("mcmc.burn_in");
    mc.thin = cfg.get_i64("mcmc.thin");
    mc.seed = static_cast<uint64_t>(cfg.get_i64("run.seed"));
    mc.prior = grf_spec_from(cfg);
    mc.prior.dim = 2;
    mc.resolution = {s, s};

    Chain chain = run_mcmc(mc, obs, op, fwd);

    auto rms_misfit = [&](const Field& w0) {
        std::vector<double> pred = op.observe(fwd(w0));
        double acc = 0.0;
        for (size_t i = 0; i < obs.size(); ++i) acc += (obs[i] - pred[i]) * (obs[i] - pred[i]);
        return std::sqrt(acc / static_cast<double>(obs.size()));
    };

    InvertReport report;
    report.acceptance_rate = chain.acceptance_rate();
    report.forward_calls = chain.forward_calls;
    report.posterior_misfit = rms_misfit(chain.mean);
    report.prior_misfit = rms_misfit(Field(Shape{s, s}, 0.0)); // prior mean = 0

    TensorContainer mean_c;
    mean_c.add_field("posterior_mean", chain.mean);
    if (cfg.get_bool("mcmc.push_mean_forward")) {
        NsProblem p = ns_problem_from(cfg, chain.mean, op.t_obs, cfg.get_f64("mcmc.dt"));
        mean_c.add_field("pushed_forward_mean", solve_ns(p).frame(0));
    }
    json meta;
    meta["config_hash"] = hash_hex(cfg.hash());
    meta["seed"] = cfg.get_i64("run.seed");
    meta["forward"] = forward_kind;
    meta["acceptance_rate"] = report.acceptance_rate;
    meta["forward_calls"] = report.forward_calls;
    meta["posterior_misfit"] = report.posterior_misfit;
    meta["prior_misfit"] = report.prior_misfit;
    mean_c.add_text("meta", meta.dump(2));
    report.mean_path = concat(out_dir, "/", tag, ".mean.fnot");
    mean_c.write(report.mean_path);

    std::ostringstream os;
    os << "step,phi,accepted,acceptance_rate\n";
    for (const auto& r : chain.records)
        os << r.step << "," << r.phi << "," << (r.accepted ? 1 : 0) << "," << r.acceptance_rate
           << "\n";
    report.chain_csv = concat(out_dir, "/", tag, ".chain.csv");
    write_text_atomic(report.chain_csv, os.str());
    write_text_atomic(concat(out_dir, "/", tag, ".json"), meta.dump(2));
    return report;
}

} // namespace fno
