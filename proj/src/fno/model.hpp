#pragma once

#include <span>
#include <string>
#include <string_view>

#include "fno/field.hpp"
#include "fno/modes.hpp"
#include "fno/rng.hpp"

namespace fno {

enum class FnoVariant { fno1d, fno2d, fno2d_rnn, fno3d };
enum class GridKind { torus, box };

std::string variant_name(FnoVariant v);
FnoVariant variant_from_name(std::string_view name);

/// Architecture hyperparameters. `kmax` has one cutoff per transformed axis
/// (the fno3d time axis included); `in_channels` counts the raw input
/// channels before coordinate augmentation.
struct FnoConfig {
    FnoVariant variant = FnoVariant::fno1d;
    int in_channels = 1;
    int out_channels = 1;
    int width = 64;            // d_v
    Shape kmax = {16};
    int n_layers = 4;
    bool batch_norm = true;
    GridKind grid = GridKind::torus;
    int rnn_window = 10;       // frames per fno2d-rnn input window
    int horizon = 10;          // fno3d output frames
    int q_hidden = 128;

    int spatial_rank() const;
    int lifted_channels() const { return in_channels + spatial_rank(); }
    void validate() const;

    std::string to_text() const;
    static FnoConfig from_text(std::string_view text);
};

/// Flat f64 parameter storage with a total named-segment index. The complex
/// spectral weights are stored as interleaved (re, im) pairs. Gradients use
/// the same layout.
class ParamStore {
public:
    struct Segment {
        std::string name;
        int64_t offset;
        int64_t count;
        Shape dims;
    };

    ParamStore() = default;
    static ParamStore layout_for(const FnoConfig& cfg);
    /// Single unnamed segment of n values (toy problems, tests).
    static ParamStore flat(int64_t n);

    int64_t size() const { return static_cast<int64_t>(values_.size()); }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    const std::vector<Segment>& segments() const { return segments_; }
    const Segment& segment(std::string_view name) const;
    bool has_segment(std::string_view name) const;
    std::span<double> seg(std::string_view name);
    std::span<const double> seg(std::string_view name) const;

    void fill(double v) { std::fill(values_.begin(), values_.end(), v); }
    bool all_finite() const;

private:
    std::vector<double> values_;
    std::vector<Segment> segments_;
};

/// Per-layer normalization statistics used at evaluation time (exponential
/// moving averages frozen at the end of training).
struct NormState {
    std::vector<std::vector<double>> running_mean; // [layer][d_v]
    std::vector<std::vector<double>> running_var;
    double momentum = 0.1;
    double eps = 1e-5;

    static NormState fresh(const FnoConfig& cfg);
};

/// Fixed input/output affine normalization baked into the operator: raw
/// input channels are standardized before lifting, outputs are mapped back to
/// the data scale after projection. Scalar (not pointwise), so the operator
/// stays resolution-free. Identity by default; set from training-set
/// statistics by the training harness and stored in checkpoints.
struct IoNorm {
    double in_mean = 0.0, in_std = 1.0;
    double out_mean = 0.0, out_std = 1.0;
};

struct FnoModel {
    FnoConfig config;
    ParamStore params;
    NormState norm;
    IoNorm io;
};

FnoModel make_model(const FnoConfig& cfg, uint64_t seed);
void init_params(ParamStore& params, const FnoConfig& cfg, RngStream rng);
int64_t param_count(const FnoConfig& cfg);

// --- stateless building blocks (unit-testable spec operations) -------------

/// Append normalized grid coordinates as channels. For fno3d the window
/// frames are first replicated along the output-time axis, so the result has
/// shape [s1, s2, horizon, window + 3].
Field augment_coords(const Field& input, const FnoConfig& cfg);

/// Pointwise lifting affine P: [spatial..., d_a'] -> [spatial..., d_v].
Field lift(const Field& augmented, const FnoConfig& cfg, const ParamStore& params);

/// Truncated spectral convolution: idft(embed(R * truncate(dft(v)))) with the
/// per-mode channel contraction out_l = sum_j R[k,l,j] v_hat[k,j].
Field spectral_conv(const Field& v, std::span<const double> r_interleaved, const ModeSet& modes);

/// One Fourier layer sigma(Norm(W v + K v)) in evaluation mode, using the
/// model's running statistics.
Field fourier_layer(const Field& v, const FnoModel& model, int layer);

/// Two-stage pointwise projection Q: d_v -> q_hidden -> d_u with ReLU between.
Field project(const Field& v, const FnoConfig& cfg, const ParamStore& params);

/// Full forward pass in evaluation mode.
Field forward(const FnoModel& model, const Field& input);

/// Autoregressive rollout for fno2d-rnn: feed a [s, s, window] seed, slide the
/// window over the model's own predictions, return [s, s, horizon].
Field rollout(const FnoModel& model, const Field& seed_frames, int64_t horizon);

/// Retained-mode set for an input resolution; throws when any extent is below
/// 2*kmax+1.
ModeSet model_mode_set(const FnoConfig& cfg, const Shape& spatial);

// pointwise affine helpers shared with the training path (BLAS-backed)
void affine_forward(const double* in, int64_t n, int64_t cin, const double* weight,
                    const double* bias, double* out, int64_t cout);
void affine_backward_data(const double* dout, int64_t n, int64_t cout, const double* weight,
                          double* din, int64_t cin);
void affine_backward_params(const double* dout, int64_t n, int64_t cout, const double* in,
                            int64_t cin, double* dweight, double* dbias);

} // namespace fno
