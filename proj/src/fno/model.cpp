#include "fno/model.hpp"

#include <cblas.h>

#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "fno/fft.hpp"
#include "fno/model_detail.hpp"

extern "C" void openblas_set_num_threads(int);

namespace fno {

namespace {

// Sample-level parallelism owns the cores; BLAS must stay single-threaded for
// deterministic, oversubscription-free math.
struct BlasInit {
    BlasInit() { openblas_set_num_threads(1); }
};
const BlasInit blas_init;

} // namespace

std::string variant_name(FnoVariant v) {
    switch (v) {
        case FnoVariant::fno1d: return "fno1d";
        case FnoVariant::fno2d: return "fno2d";
        case FnoVariant::fno2d_rnn: return "fno2d-rnn";
        case FnoVariant::fno3d: return "fno3d";
    }
    return "?";
}

FnoVariant variant_from_name(std::string_view name) {
    if (name == "fno1d") return FnoVariant::fno1d;
    if (name == "fno2d") return FnoVariant::fno2d;
    if (name == "fno2d-rnn" || name == "fno2d_rnn") return FnoVariant::fno2d_rnn;
    if (name == "fno3d") return FnoVariant::fno3d;
    throw UsageError(concat("unknown model variant '", name, "'"));
}

int FnoConfig::spatial_rank() const {
    switch (variant) {
        case FnoVariant::fno1d: return 1;
        case FnoVariant::fno2d:
        case FnoVariant::fno2d_rnn: return 2;
        case FnoVariant::fno3d: return 3;
    }
    return 0;
}

void FnoConfig::validate() const {
    FNO_REQUIRE(n_layers >= 1, UsageError, "model: n_layers must be >= 1");
    FNO_REQUIRE(width >= 1, UsageError, "model: width must be >= 1");
    FNO_REQUIRE(in_channels >= 1 && out_channels >= 1, UsageError,
                "model: channel counts must be >= 1");
    FNO_REQUIRE(q_hidden >= 1, UsageError, "model: q_hidden must be >= 1");
    FNO_REQUIRE(static_cast<int>(kmax.size()) == spatial_rank(), UsageError,
                "model: kmax needs one cutoff per transformed axis (", spatial_rank(), ")");
    for (int64_t k : kmax) FNO_REQUIRE(k >= 1, UsageError, "model: kmax entries must be >= 1");
    if (variant == FnoVariant::fno2d_rnn)
        FNO_REQUIRE(in_channels == rnn_window, UsageError,
                    "fno2d-rnn: in_channels must equal the window length");
    if (variant == FnoVariant::fno3d) {
        FNO_REQUIRE(horizon >= 1, UsageError, "fno3d: horizon must be >= 1");
        FNO_REQUIRE(horizon >= 2 * kmax.back() + 1, UsageError,
                    "fno3d: horizon ", horizon, " is below the temporal cutoff 2*",
                    kmax.back(), "+1");
    }
}

std::string FnoConfig::to_text() const {
    std::ostringstream os;
    os << "variant=" << variant_name(variant) << "\n";
    os << "in_channels=" << in_channels << "\n";
    os << "out_channels=" << out_channels << "\n";
    os << "width=" << width << "\n";
    os << "kmax=";
    for (size_t i = 0; i < kmax.size(); ++i) os << (i ? "," : "") << kmax[i];
    os << "\n";
    os << "layers=" << n_layers << "\n";
    os << "batch_norm=" << (batch_norm ? 1 : 0) << "\n";
    os << "grid=" << (grid == GridKind::torus ? "torus" : "box") << "\n";
    os << "rnn_window=" << rnn_window << "\n";
    os << "horizon=" << horizon << "\n";
    os << "q_hidden=" << q_hidden << "\n";
    return os.str();
}

FnoConfig FnoConfig::from_text(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        FNO_REQUIRE(eq != std::string::npos, DataError, "model config: bad line '", line, "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const char* key) {
        auto it = kv.find(key);
        FNO_REQUIRE(it != kv.end(), DataError, "model config: missing key '", key, "'");
        return it->second;
    };
    FnoConfig cfg;
    cfg.variant = variant_from_name(need("variant"));
    cfg.in_channels = std::stoi(need("in_channels"));
    cfg.out_channels = std::stoi(need("out_channels"));
    cfg.width = std::stoi(need("width"));
    cfg.kmax.clear();
    {
        std::istringstream ks(need("kmax"));
        std::string tok;
        while (std::getline(ks, tok, ',')) cfg.kmax.push_back(std::stoll(tok));
    }
    cfg.n_layers = std::stoi(need("layers"));
    cfg.batch_norm = need("batch_norm") == "1";
    cfg.grid = need("grid") == "box" ? GridKind::box : GridKind::torus;
    cfg.rnn_window = std::stoi(need("rnn_window"));
    cfg.horizon = std::stoi(need("horizon"));
    cfg.q_hidden = std::stoi(need("q_hidden"));
    cfg.validate();
    return cfg;
}

namespace {

int64_t retained_modes(const FnoConfig& cfg) {
    int64_t m = 1;
    for (size_t a = 0; a + 1 < cfg.kmax.size(); ++a) m *= 2 * cfg.kmax[a] + 1;
    m *= cfg.kmax.back() + 1;
    return m;
}

} // namespace

namespace detail {

std::vector<int64_t> block_offsets(const ModeSet& modes) {
    int d = modes.rank();
    std::vector<int64_t> offsets(static_cast<size_t>(modes.total()));
    Shape strides(static_cast<size_t>(d));
    int64_t stride = 1;
    for (int a = d - 1; a >= 0; --a) {
        strides[static_cast<size_t>(a)] = stride;
        int64_t stored = modes.resolution[static_cast<size_t>(a)];
        if (a == d - 1) stored = stored / 2 + 1;
        stride *= stored;
    }
    for (int64_t flat = 0; flat < modes.total(); ++flat) {
        int64_t rem = flat, off = 0;
        for (int a = d - 1; a >= 0; --a) {
            int64_t b = modes.block[static_cast<size_t>(a)];
            off += modes.stored_index(a, rem % b) * strides[static_cast<size_t>(a)];
            rem /= b;
        }
        offsets[static_cast<size_t>(flat)] = off;
    }
    return offsets;
}

} // namespace detail

ParamStore ParamStore::layout_for(const FnoConfig& cfg) {
    cfg.validate();
    ParamStore ps;
    int64_t dv = cfg.width, da = cfg.lifted_channels(), du = cfg.out_channels, qh = cfg.q_hidden;
    int64_t modes = retained_modes(cfg);
    auto add = [&](std::string name, Shape dims) {
        Segment seg;
        seg.name = std::move(name);
        seg.dims = std::move(dims);
        seg.count = shape_size(seg.dims);
        seg.offset = ps.size();
        ps.values_.resize(static_cast<size_t>(seg.offset + seg.count), 0.0);
        ps.segments_.push_back(std::move(seg));
    };
    add("P.weight", {dv, da});
    add("P.bias", {dv});
    for (int t = 0; t < cfg.n_layers; ++t) {
        std::string prefix = concat("layer", t, ".");
        add(prefix + "R", {modes, dv, dv, 2});
        add(prefix + "W.weight", {dv, dv});
        add(prefix + "W.bias", {dv});
        if (cfg.batch_norm) {
            add(prefix + "norm.scale", {dv});
            add(prefix + "norm.shift", {dv});
        }
    }
    add("Q.hidden.weight", {qh, dv});
    add("Q.hidden.bias", {qh});
    add("Q.out.weight", {du, qh});
    add("Q.out.bias", {du});
    return ps;
}

ParamStore ParamStore::flat(int64_t n) {
    ParamStore ps;
    ps.values_.assign(static_cast<size_t>(n), 0.0);
    ps.segments_.push_back({"values", 0, n, {n}});
    return ps;
}

const ParamStore::Segment& ParamStore::segment(std::string_view name) const {
    for (const auto& s : segments_)
        if (s.name == name) return s;
    throw DataError(concat("unknown parameter segment '", name, "'"));
}

bool ParamStore::has_segment(std::string_view name) const {
    for (const auto& s : segments_)
        if (s.name == name) return true;
    return false;
}

std::span<double> ParamStore::seg(std::string_view name) {
    const Segment& s = segment(name);
    return {values_.data() + s.offset, static_cast<size_t>(s.count)};
}

std::span<const double> ParamStore::seg(std::string_view name) const {
    const Segment& s = segment(name);
    return {values_.data() + s.offset, static_cast<size_t>(s.count)};
}

bool ParamStore::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

NormState NormState::fresh(const FnoConfig& cfg) {
    NormState ns;
    ns.running_mean.assign(static_cast<size_t>(cfg.n_layers),
                           std::vector<double>(static_cast<size_t>(cfg.width), 0.0));
    ns.running_var.assign(static_cast<size_t>(cfg.n_layers),
                          std::vector<double>(static_cast<size_t>(cfg.width), 1.0));
    return ns;
}

int64_t param_count(const FnoConfig& cfg) { return ParamStore::layout_for(cfg).size(); }

void init_params(ParamStore& params, const FnoConfig& cfg, RngStream rng) {
    uint64_t seg_index = 0;
    for (const auto& seg : params.segments()) {
        RngStream stream = rng.derive(seg_index++);
        double* v = params.data() + seg.offset;
        if (seg.name.ends_with(".R")) {
            double scale = 1.0 / (static_cast<double>(cfg.width) * static_cast<double>(cfg.width));
            for (int64_t i = 0; i < seg.count; ++i) v[i] = scale * stream.next_uniform();
        } else if (seg.name.ends_with("norm.scale")) {
            for (int64_t i = 0; i < seg.count; ++i) v[i] = 1.0;
        } else if (seg.name.ends_with("norm.shift") || seg.name.ends_with(".bias") ||
                   seg.name.ends_with("W.bias")) {
            // biases follow the fan-in rule of their weight; norm shift stays 0
            if (seg.name.ends_with("norm.shift")) {
                std::memset(v, 0, static_cast<size_t>(seg.count) * sizeof(double));
            } else {
                // fan-in equals the matching weight's input width
                int64_t fan_in = 1;
                for (const auto& w : params.segments()) {
                    if (w.name == seg.name.substr(0, seg.name.size() - 5) + ".weight" ||
                        (seg.name == "P.bias" && w.name == "P.weight")) {
                        fan_in = w.dims.back();
                        break;
                    }
                }
                double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
                for (int64_t i = 0; i < seg.count; ++i)
                    v[i] = bound * (2.0 * stream.next_uniform() - 1.0);
            }
        } else { // affine weights: fan-in scaled uniform
            int64_t fan_in = seg.dims.back();
            double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            for (int64_t i = 0; i < seg.count; ++i)
                v[i] = bound * (2.0 * stream.next_uniform() - 1.0);
        }
    }
}

FnoModel make_model(const FnoConfig& cfg, uint64_t seed) {
    FnoModel m;
    m.config = cfg;
    m.params = ParamStore::layout_for(cfg);
    init_params(m.params, cfg, RngStream(seed));
    m.norm = NormState::fresh(cfg);
    return m;
}

// ---------------------------------------------------------------------------
// pointwise affine maps (BLAS-backed)
// ---------------------------------------------------------------------------

void affine_forward(const double* in, int64_t n, int64_t cin, const double* weight,
                    const double* bias, double* out, int64_t cout) {
    for (int64_t i = 0; i < n; ++i) std::memcpy(out + i * cout, bias, static_cast<size_t>(cout) * sizeof(double));
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(n),
                static_cast<int>(cout), static_cast<int>(cin), 1.0, in, static_cast<int>(cin),
                weight, static_cast<int>(cin), 1.0, out, static_cast<int>(cout));
}

void affine_backward_data(const double* dout, int64_t n, int64_t cout, const double* weight,
                          double* din, int64_t cin) {
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(cin), static_cast<int>(cout), 1.0, dout, static_cast<int>(cout),
                weight, static_cast<int>(cin), 0.0, din, static_cast<int>(cin));
}

void affine_backward_params(const double* dout, int64_t n, int64_t cout, const double* in,
                            int64_t cin, double* dweight, double* dbias) {
    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(cout),
                static_cast<int>(cin), static_cast<int>(n), 1.0, dout, static_cast<int>(cout), in,
                static_cast<int>(cin), 1.0, dweight, static_cast<int>(cin));
    for (int64_t i = 0; i < n; ++i)
        for (int64_t c = 0; c < cout; ++c) dbias[c] += dout[i * cout + c];
}

// ---------------------------------------------------------------------------
// spec operations
// ---------------------------------------------------------------------------

Field augment_coords(const Field& input, const FnoConfig& cfg) {
    int d = cfg.spatial_rank();
    auto coord = [&](int64_t j, int64_t extent) {
        if (cfg.grid == GridKind::box)
            return static_cast<double>(j) / static_cast<double>(extent - 1);
        return static_cast<double>(j) / static_cast<double>(extent);
    };

    if (cfg.variant == FnoVariant::fno3d) {
        FNO_REQUIRE(input.rank() == 3 && input.extent(2) == cfg.in_channels, DataError,
                    "fno3d input must be [s1, s2, window=", cfg.in_channels, "], got ",
                    shape_str(input.shape()));
        int64_t s1 = input.extent(0), s2 = input.extent(1), w = input.extent(2);
        int64_t t_out = cfg.horizon;
        Field out(Shape{s1, s2, t_out, w + 3});
        for (int64_t i = 0; i < s1; ++i)
            for (int64_t j = 0; j < s2; ++j) {
                const double* frames = input.data() + (i * s2 + j) * w;
                for (int64_t t = 0; t < t_out; ++t) {
                    double* dst = out.data() + (((i * s2 + j) * t_out) + t) * (w + 3);
                    std::memcpy(dst, frames, static_cast<size_t>(w) * sizeof(double));
                    dst[w + 0] = coord(i, s1);
                    dst[w + 1] = coord(j, s2);
                    dst[w + 2] = static_cast<double>(t + 1) / static_cast<double>(t_out);
                }
            }
        return out;
    }

    FNO_REQUIRE(input.rank() == d + 1 && input.extent(d) == cfg.in_channels, DataError,
                "model input must be [spatial..., channels=", cfg.in_channels, "], got ",
                shape_str(input.shape()));
    Shape out_shape = input.shape();
    out_shape.back() += d;
    Field out(out_shape);
    int64_t c_in = cfg.in_channels, c_out = c_in + d;
    int64_t n = 1;
    for (int a = 0; a < d; ++a) n *= input.extent(a);
    Shape idx(static_cast<size_t>(d));
    for (int64_t p = 0; p < n; ++p) {
        int64_t rem = p;
        for (int a = d - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = rem % input.extent(a);
            rem /= input.extent(a);
        }
        double* dst = out.data() + p * c_out;
        std::memcpy(dst, input.data() + p * c_in, static_cast<size_t>(c_in) * sizeof(double));
        for (int a = 0; a < d; ++a) dst[c_in + a] = coord(idx[static_cast<size_t>(a)], input.extent(a));
    }
    return out;
}

Field lift(const Field& augmented, const FnoConfig& cfg, const ParamStore& params) {
    int64_t da = cfg.lifted_channels();
    FNO_REQUIRE(augmented.extent(augmented.rank() - 1) == da, DataError,
                "lift: expected ", da, " channels, got ", shape_str(augmented.shape()));
    int64_t n = augmented.size() / da;
    Shape out_shape = augmented.shape();
    out_shape.back() = cfg.width;
    Field out(out_shape);
    affine_forward(augmented.data(), n, da, params.seg("P.weight").data(),
                   params.seg("P.bias").data(), out.data(), cfg.width);
    return out;
}

ModeSet model_mode_set(const FnoConfig& cfg, const Shape& spatial) {
    FNO_REQUIRE(spatial.size() == cfg.kmax.size(), DataError, "model: resolution rank mismatch");
    for (size_t a = 0; a < spatial.size(); ++a)
        FNO_REQUIRE(spatial[a] >= 2 * cfg.kmax[a] + 1, DataError, "model: resolution ",
                    shape_str(spatial), " is below the mode cutoff 2*", cfg.kmax[a],
                    "+1 on axis ", a);
    return mode_set(spatial, cfg.kmax);
}

Field spectral_conv(const Field& v, std::span<const double> r_interleaved, const ModeSet& modes) {
    int d = modes.rank();
    int64_t dv = v.extent(v.rank() - 1);
    FNO_REQUIRE(static_cast<int64_t>(r_interleaved.size()) == modes.total() * dv * dv * 2, DataError,
                "spectral_conv: weight tensor size mismatch");
    SpectralField spec = fft::dft(v, d);
    auto offsets = detail::block_offsets(modes);
    std::vector<std::complex<double>> block(static_cast<size_t>(modes.total() * dv));
    std::vector<std::complex<double>> multiplied(block.size());
    detail::gather_block(spec, offsets, dv, block.data());
    detail::mode_multiply(r_interleaved.data(), block.data(), modes.total(), dv, multiplied.data());

    SpectralField out_spec(spec.shape(), d, spec.last_logical_extent());
    detail::scatter_block(multiplied.data(), offsets, dv, out_spec);
    fft::symmetrize_planes(out_spec);
    return fft::idft(out_spec);
}

Field fourier_layer(const Field& v, const FnoModel& model, int layer) {
    const FnoConfig& cfg = model.config;
    int d = cfg.spatial_rank();
    Shape spatial(v.shape().begin(), v.shape().begin() + d);
    ModeSet modes = model_mode_set(cfg, spatial);
    std::string prefix = concat("layer", layer, ".");
    Field conv = spectral_conv(v, model.params.seg(prefix + "R"), modes);
    int64_t n = v.size() / cfg.width;
    Field sum(v.shape());
    affine_forward(v.data(), n, cfg.width, model.params.seg(prefix + "W.weight").data(),
                   model.params.seg(prefix + "W.bias").data(), sum.data(), cfg.width);
    for (int64_t i = 0; i < sum.size(); ++i) sum[i] += conv[i];

    if (cfg.batch_norm) {
        const auto& mean = model.norm.running_mean[static_cast<size_t>(layer)];
        const auto& var = model.norm.running_var[static_cast<size_t>(layer)];
        auto scale = model.params.seg(prefix + "norm.scale");
        auto shift = model.params.seg(prefix + "norm.shift");
        for (int64_t i = 0; i < n; ++i)
            for (int64_t c = 0; c < cfg.width; ++c) {
                double& x = sum[i * cfg.width + c];
                x = scale[static_cast<size_t>(c)] * (x - mean[static_cast<size_t>(c)]) /
                        std::sqrt(var[static_cast<size_t>(c)] + model.norm.eps) +
                    shift[static_cast<size_t>(c)];
            }
    }
    for (int64_t i = 0; i < sum.size(); ++i) sum[i] = std::max(sum[i], 0.0);
    return sum;
}

Field project(const Field& v, const FnoConfig& cfg, const ParamStore& params) {
    int64_t dv = cfg.width, qh = cfg.q_hidden, du = cfg.out_channels;
    int64_t n = v.size() / dv;
    Shape hidden_shape = v.shape();
    hidden_shape.back() = qh;
    Field hidden(hidden_shape);
    affine_forward(v.data(), n, dv, params.seg("Q.hidden.weight").data(),
                   params.seg("Q.hidden.bias").data(), hidden.data(), qh);
    for (int64_t i = 0; i < hidden.size(); ++i) hidden[i] = std::max(hidden[i], 0.0);
    Shape out_shape = v.shape();
    out_shape.back() = du;
    Field out(out_shape);
    affine_forward(hidden.data(), n, qh, params.seg("Q.out.weight").data(),
                   params.seg("Q.out.bias").data(), out.data(), du);
    return out;
}

Field forward(const FnoModel& model, const Field& input) {
    check_finite(input, "model input");
    Field scaled = input;
    if (model.io.in_mean != 0.0 || model.io.in_std != 1.0)
        for (int64_t i = 0; i < scaled.size(); ++i)
            scaled[i] = (scaled[i] - model.io.in_mean) / model.io.in_std;
    Field v = lift(augment_coords(scaled, model.config), model.config, model.params);
    for (int t = 0; t < model.config.n_layers; ++t) v = fourier_layer(v, model, t);
    Field out = project(v, model.config, model.params);
    if (model.io.out_mean != 0.0 || model.io.out_std != 1.0)
        for (int64_t i = 0; i < out.size(); ++i)
            out[i] = out[i] * model.io.out_std + model.io.out_mean;
    return out;
}

Field rollout(const FnoModel& model, const Field& seed_frames, int64_t horizon) {
    const FnoConfig& cfg = model.config;
    FNO_REQUIRE(cfg.variant == FnoVariant::fno2d_rnn, UsageError,
                "rollout is only defined for the fno2d-rnn variant");
    FNO_REQUIRE(seed_frames.rank() == 3 && seed_frames.extent(2) == cfg.rnn_window, DataError,
                "rollout: seed must be [s, s, window=", cfg.rnn_window, "]");
    FNO_REQUIRE(horizon >= 1, UsageError, "rollout: horizon must be >= 1");

    int64_t s1 = seed_frames.extent(0), s2 = seed_frames.extent(1), w = cfg.rnn_window;
    Field window = seed_frames;
    Field out(Shape{s1, s2, horizon});
    for (int64_t h = 0; h < horizon; ++h) {
        Field next = forward(model, window); // [s1, s2, 1]
        for (int64_t p = 0; p < s1 * s2; ++p) {
            double* frames = window.data() + p * w;
            std::memmove(frames, frames + 1, static_cast<size_t>(w - 1) * sizeof(double));
            frames[w - 1] = next[p];
            out[p * horizon + h] = next[p];
        }
    }
    return out;
}

} // namespace fno
