#include "fno/training.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>

#include "fno/fft.hpp"
#include "fno/model_detail.hpp"
#include "fno/parallel.hpp"

namespace fno {

PairSource::PairSource(std::vector<Field> in, std::vector<Field> tg)
    : inputs(std::move(in)), targets(std::move(tg)) {
    FNO_REQUIRE(inputs.size() == targets.size(), DataError,
                "pair source: inputs and targets differ in length");
}

void PairSource::load(int64_t index, Field& input, Field& target) const {
    input = inputs[static_cast<size_t>(index)];
    target = targets[static_cast<size_t>(index)];
}

double loss_rel_l2(const Field& pred, const Field& target) {
    FNO_REQUIRE(pred.shape() == target.shape(), DataError, "loss: shape mismatch ",
                shape_str(pred.shape()), " vs ", shape_str(target.shape()));
    double num = 0.0, den = 0.0;
    for (int64_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        num += d * d;
        den += target[i] * target[i];
    }
    FNO_REQUIRE(den > 0.0, DataError, "loss: zero-norm target");
    return std::sqrt(num / den);
}

namespace {

struct LayerParams {
    const double* r;
    const double* w;
    const double* wb;
    const double* scale;
    const double* shift;
};

LayerParams layer_params(const ParamStore& params, const FnoConfig& cfg, int t) {
    std::string prefix = concat("layer", t, ".");
    LayerParams lp{};
    lp.r = params.seg(prefix + "R").data();
    lp.w = params.seg(prefix + "W.weight").data();
    lp.wb = params.seg(prefix + "W.bias").data();
    if (cfg.batch_norm) {
        lp.scale = params.seg(prefix + "norm.scale").data();
        lp.shift = params.seg(prefix + "norm.shift").data();
    }
    return lp;
}

} // namespace

void forward_batch(FnoModel& model, const std::vector<Field>& inputs, bool training,
                   BatchCache& cache, int threads) {
    const FnoConfig& cfg = model.config;
    const int64_t B = static_cast<int64_t>(inputs.size());
    FNO_REQUIRE(B >= 1, DataError, "forward_batch: empty batch");
    for (const Field& f : inputs)
        FNO_REQUIRE(f.shape() == inputs[0].shape(), DataError,
                    "forward_batch: inconsistent input shapes in batch");
    const int d = cfg.spatial_rank();
    const int64_t dv = cfg.width;
    const int L = cfg.n_layers;

    cache.batch = B;
    cache.training = training;
    cache.aug.assign(static_cast<size_t>(B), Field{});
    cache.v.assign(static_cast<size_t>(L + 1), std::vector<Field>(static_cast<size_t>(B)));
    cache.trunc.assign(static_cast<size_t>(L),
                       std::vector<std::vector<std::complex<double>>>(static_cast<size_t>(B)));
    cache.pre_norm.assign(static_cast<size_t>(L), std::vector<Field>(static_cast<size_t>(B)));
    cache.mu.assign(static_cast<size_t>(L), std::vector<double>(static_cast<size_t>(dv), 0.0));
    cache.var.assign(static_cast<size_t>(L), std::vector<double>(static_cast<size_t>(dv), 1.0));
    cache.q_hidden.assign(static_cast<size_t>(B), Field{});
    cache.output.assign(static_cast<size_t>(B), Field{});

    parallel_for(B, threads, [&](int64_t b) {
        Field scaled = inputs[static_cast<size_t>(b)];
        if (model.io.in_mean != 0.0 || model.io.in_std != 1.0)
            for (int64_t i = 0; i < scaled.size(); ++i)
                scaled[i] = (scaled[i] - model.io.in_mean) / model.io.in_std;
        cache.aug[static_cast<size_t>(b)] = augment_coords(scaled, cfg);
        cache.v[0][static_cast<size_t>(b)] = lift(cache.aug[static_cast<size_t>(b)], cfg, model.params);
    });

    Shape spatial(cache.aug[0].shape().begin(), cache.aug[0].shape().begin() + d);
    cache.modes = model_mode_set(cfg, spatial);
    cache.block_offsets = detail::block_offsets(cache.modes);
    const int64_t n_modes = cache.modes.total();
    const int64_t n_points = shape_size(spatial);
    const int64_t last_logical = spatial.back();

    for (int t = 0; t < L; ++t) {
        LayerParams lp = layer_params(model.params, cfg, t);
        parallel_for(B, threads, [&](int64_t b) {
            const Field& vin = cache.v[static_cast<size_t>(t)][static_cast<size_t>(b)];
            SpectralField spec = fft::dft(vin, d);
            auto& block = cache.trunc[static_cast<size_t>(t)][static_cast<size_t>(b)];
            block.resize(static_cast<size_t>(n_modes * dv));
            detail::gather_block(spec, cache.block_offsets, dv, block.data());
            std::vector<std::complex<double>> multiplied(block.size());
            detail::mode_multiply(lp.r, block.data(), n_modes, dv, multiplied.data());
            SpectralField out_spec(spec.shape(), d, last_logical);
            detail::scatter_block(multiplied.data(), cache.block_offsets, dv, out_spec);
            fft::symmetrize_planes(out_spec);
            Field conv = fft::idft(out_spec);

            Field pre(vin.shape());
            affine_forward(vin.data(), n_points, dv, lp.w, lp.wb, pre.data(), dv);
            for (int64_t i = 0; i < pre.size(); ++i) pre[i] += conv[i];
            cache.pre_norm[static_cast<size_t>(t)][static_cast<size_t>(b)] = std::move(pre);
        });

        auto& mu = cache.mu[static_cast<size_t>(t)];
        auto& var = cache.var[static_cast<size_t>(t)];
        if (cfg.batch_norm) {
            if (training) {
                // batch statistics, reduced in sample order
                std::vector<std::vector<double>> sums(static_cast<size_t>(B)),
                    sqsums(static_cast<size_t>(B));
                parallel_for(B, threads, [&](int64_t b) {
                    const Field& pre = cache.pre_norm[static_cast<size_t>(t)][static_cast<size_t>(b)];
                    auto& s1 = sums[static_cast<size_t>(b)];
                    auto& s2 = sqsums[static_cast<size_t>(b)];
                    s1.assign(static_cast<size_t>(dv), 0.0);
                    s2.assign(static_cast<size_t>(dv), 0.0);
                    for (int64_t i = 0; i < n_points; ++i)
                        for (int64_t c = 0; c < dv; ++c) {
                            double x = pre[i * dv + c];
                            s1[static_cast<size_t>(c)] += x;
                            s2[static_cast<size_t>(c)] += x * x;
                        }
                });
                double m = static_cast<double>(B * n_points);
                for (int64_t c = 0; c < dv; ++c) {
                    double s1 = 0.0, s2 = 0.0;
                    for (int64_t b = 0; b < B; ++b) {
                        s1 += sums[static_cast<size_t>(b)][static_cast<size_t>(c)];
                        s2 += sqsums[static_cast<size_t>(b)][static_cast<size_t>(c)];
                    }
                    double mean = s1 / m;
                    mu[static_cast<size_t>(c)] = mean;
                    var[static_cast<size_t>(c)] = std::max(s2 / m - mean * mean, 0.0);
                }
                auto& rm = model.norm.running_mean[static_cast<size_t>(t)];
                auto& rv = model.norm.running_var[static_cast<size_t>(t)];
                double unbias = m > 1.5 ? m / (m - 1.0) : 1.0;
                for (int64_t c = 0; c < dv; ++c) {
                    rm[static_cast<size_t>(c)] = (1.0 - model.norm.momentum) * rm[static_cast<size_t>(c)] +
                                                 model.norm.momentum * mu[static_cast<size_t>(c)];
                    rv[static_cast<size_t>(c)] = (1.0 - model.norm.momentum) * rv[static_cast<size_t>(c)] +
                                                 model.norm.momentum * var[static_cast<size_t>(c)] * unbias;
                }
            } else {
                mu = model.norm.running_mean[static_cast<size_t>(t)];
                var = model.norm.running_var[static_cast<size_t>(t)];
            }
        }

        parallel_for(B, threads, [&](int64_t b) {
            const Field& pre = cache.pre_norm[static_cast<size_t>(t)][static_cast<size_t>(b)];
            Field out(pre.shape());
            if (cfg.batch_norm) {
                for (int64_t c = 0; c < dv; ++c) {
                    double inv_std = 1.0 / std::sqrt(var[static_cast<size_t>(c)] + model.norm.eps);
                    double g = lp.scale[c] * inv_std;
                    double off = lp.shift[c] - mu[static_cast<size_t>(c)] * g;
                    for (int64_t i = 0; i < n_points; ++i) {
                        double y = g * pre[i * dv + c] + off;
                        out[i * dv + c] = y > 0.0 ? y : 0.0;
                    }
                }
            } else {
                for (int64_t i = 0; i < out.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
            }
            cache.v[static_cast<size_t>(t + 1)][static_cast<size_t>(b)] = std::move(out);
        });
    }

    const int64_t qh = cfg.q_hidden, du = cfg.out_channels;
    parallel_for(B, threads, [&](int64_t b) {
        const Field& vl = cache.v[static_cast<size_t>(L)][static_cast<size_t>(b)];
        Shape hidden_shape = vl.shape();
        hidden_shape.back() = qh;
        Field hidden(hidden_shape);
        affine_forward(vl.data(), n_points, dv, model.params.seg("Q.hidden.weight").data(),
                       model.params.seg("Q.hidden.bias").data(), hidden.data(), qh);
        for (int64_t i = 0; i < hidden.size(); ++i) hidden[i] = std::max(hidden[i], 0.0);
        Shape out_shape = vl.shape();
        out_shape.back() = du;
        Field out(out_shape);
        affine_forward(hidden.data(), n_points, qh, model.params.seg("Q.out.weight").data(),
                       model.params.seg("Q.out.bias").data(), out.data(), du);
        if (model.io.out_mean != 0.0 || model.io.out_std != 1.0)
            for (int64_t i = 0; i < out.size(); ++i)
                out[i] = out[i] * model.io.out_std + model.io.out_mean;
        cache.q_hidden[static_cast<size_t>(b)] = std::move(hidden);
        cache.output[static_cast<size_t>(b)] = std::move(out);
    });
}

double backward_batch(const FnoModel& model, const BatchCache& cache,
                      const std::vector<Field>& targets, ParamStore& grads, int threads) {
    const FnoConfig& cfg = model.config;
    const int64_t B = cache.batch;
    FNO_REQUIRE(static_cast<int64_t>(targets.size()) == B, DataError,
                "backward_batch: target count mismatch");
    FNO_REQUIRE(grads.size() == model.params.size(), DataError,
                "backward_batch: gradient layout mismatch");
    const int d = cfg.spatial_rank();
    const int64_t dv = cfg.width;
    const int L = cfg.n_layers;
    const int64_t n_modes = cache.modes.total();
    const int64_t n_points = shape_size(Shape(cache.aug[0].shape().begin(),
                                              cache.aug[0].shape().begin() + d));
    const int64_t last_logical = cache.modes.resolution.back();
    const int64_t qh = cfg.q_hidden, du = cfg.out_channels;

    // loss and output cotangents (serial order for the loss sum)
    std::vector<Field> dout(static_cast<size_t>(B));
    double loss = 0.0;
    for (int64_t b = 0; b < B; ++b) {
        const Field& pred = cache.output[static_cast<size_t>(b)];
        const Field& tgt = targets[static_cast<size_t>(b)];
        FNO_REQUIRE(pred.shape() == tgt.shape(), DataError, "backward_batch: target shape ",
                    shape_str(tgt.shape()), " does not match output ", shape_str(pred.shape()));
        double num = 0.0, den = 0.0;
        Field e(pred.shape());
        for (int64_t i = 0; i < pred.size(); ++i) {
            e[i] = pred[i] - tgt[i];
            num += e[i] * e[i];
            den += tgt[i] * tgt[i];
        }
        FNO_REQUIRE(den > 0.0, DataError, "backward_batch: zero-norm target");
        double enorm = std::sqrt(num), tnorm = std::sqrt(den);
        loss += enorm / tnorm;
        double coeff = enorm > 0.0 ? 1.0 / (static_cast<double>(B) * enorm * tnorm) : 0.0;
        coeff *= model.io.out_std; // cotangent of the pre-denormalization output
        for (int64_t i = 0; i < e.size(); ++i) e[i] *= coeff;
        dout[static_cast<size_t>(b)] = std::move(e);
    }
    loss /= static_cast<double>(B);
    FNO_REQUIRE(std::isfinite(loss), NumericError, "backward_batch: non-finite loss");

    // per-sample gradient slots reduced in sample order at the end
    std::vector<std::vector<double>> slots(static_cast<size_t>(B),
                                           std::vector<double>(static_cast<size_t>(grads.size()), 0.0));
    auto slot_seg = [&](int64_t b, std::string_view name) {
        const auto& seg = grads.segment(name);
        return slots[static_cast<size_t>(b)].data() + seg.offset;
    };

    std::vector<Field> dv_cur(static_cast<size_t>(B));
    parallel_for(B, threads, [&](int64_t b) {
        const Field& hidden = cache.q_hidden[static_cast<size_t>(b)];
        const Field& vl = cache.v[static_cast<size_t>(L)][static_cast<size_t>(b)];
        const Field& dOut = dout[static_cast<size_t>(b)];
        affine_backward_params(dOut.data(), n_points, du, hidden.data(), qh,
                               slot_seg(b, "Q.out.weight"), slot_seg(b, "Q.out.bias"));
        Field dhidden(hidden.shape());
        affine_backward_data(dOut.data(), n_points, du, model.params.seg("Q.out.weight").data(),
                             dhidden.data(), qh);
        for (int64_t i = 0; i < dhidden.size(); ++i)
            if (hidden[i] <= 0.0) dhidden[i] = 0.0;
        affine_backward_params(dhidden.data(), n_points, qh, vl.data(), dv,
                               slot_seg(b, "Q.hidden.weight"), slot_seg(b, "Q.hidden.bias"));
        Field dvl(vl.shape());
        affine_backward_data(dhidden.data(), n_points, qh, model.params.seg("Q.hidden.weight").data(),
                             dvl.data(), dv);
        dv_cur[static_cast<size_t>(b)] = std::move(dvl);
    });

    for (int t = L - 1; t >= 0; --t) {
        LayerParams lp = layer_params(model.params, cfg, t);
        std::string prefix = concat("layer", t, ".");
        const auto& mu = cache.mu[static_cast<size_t>(t)];
        const auto& var = cache.var[static_cast<size_t>(t)];

        // ReLU mask (from the post-activation output) applied in place
        parallel_for(B, threads, [&](int64_t b) {
            Field& dy = dv_cur[static_cast<size_t>(b)];
            const Field& act = cache.v[static_cast<size_t>(t + 1)][static_cast<size_t>(b)];
            for (int64_t i = 0; i < dy.size(); ++i)
                if (act[i] <= 0.0) dy[i] = 0.0;
        });

        std::vector<Field> ds(static_cast<size_t>(B));
        if (cfg.batch_norm) {
            std::vector<double> inv_std(static_cast<size_t>(dv));
            for (int64_t c = 0; c < dv; ++c)
                inv_std[static_cast<size_t>(c)] =
                    1.0 / std::sqrt(var[static_cast<size_t>(c)] + model.norm.eps);

            // per-sample partial sums for the stat gradients
            std::vector<std::vector<double>> sdy(static_cast<size_t>(B)), sdyx(static_cast<size_t>(B));
            parallel_for(B, threads, [&](int64_t b) {
                const Field& dy = dv_cur[static_cast<size_t>(b)];
                const Field& pre = cache.pre_norm[static_cast<size_t>(t)][static_cast<size_t>(b)];
                auto& a1 = sdy[static_cast<size_t>(b)];
                auto& a2 = sdyx[static_cast<size_t>(b)];
                a1.assign(static_cast<size_t>(dv), 0.0);
                a2.assign(static_cast<size_t>(dv), 0.0);
                for (int64_t i = 0; i < n_points; ++i)
                    for (int64_t c = 0; c < dv; ++c) {
                        double xhat = (pre[i * dv + c] - mu[static_cast<size_t>(c)]) *
                                      inv_std[static_cast<size_t>(c)];
                        double g = dy[i * dv + c];
                        a1[static_cast<size_t>(c)] += g;
                        a2[static_cast<size_t>(c)] += g * xhat;
                    }
                // scale/shift gradients are the per-sample partials
                double* dscale = slot_seg(b, prefix + "norm.scale");
                double* dshift = slot_seg(b, prefix + "norm.shift");
                for (int64_t c = 0; c < dv; ++c) {
                    dscale[c] += a2[static_cast<size_t>(c)];
                    dshift[c] += a1[static_cast<size_t>(c)];
                }
            });
            std::vector<double> Sdy(static_cast<size_t>(dv), 0.0), Sdyx(static_cast<size_t>(dv), 0.0);
            for (int64_t b = 0; b < B; ++b)
                for (int64_t c = 0; c < dv; ++c) {
                    Sdy[static_cast<size_t>(c)] += sdy[static_cast<size_t>(b)][static_cast<size_t>(c)];
                    Sdyx[static_cast<size_t>(c)] += sdyx[static_cast<size_t>(b)][static_cast<size_t>(c)];
                }
            double m = static_cast<double>(B * n_points);
            parallel_for(B, threads, [&](int64_t b) {
                const Field& dy = dv_cur[static_cast<size_t>(b)];
                const Field& pre = cache.pre_norm[static_cast<size_t>(t)][static_cast<size_t>(b)];
                Field out(dy.shape());
                for (int64_t c = 0; c < dv; ++c) {
                    double g = lp.scale[c] * inv_std[static_cast<size_t>(c)];
                    for (int64_t i = 0; i < n_points; ++i) {
                        double grad = dy[i * dv + c];
                        if (cache.training) {
                            double xhat = (pre[i * dv + c] - mu[static_cast<size_t>(c)]) *
                                          inv_std[static_cast<size_t>(c)];
                            grad -= (Sdy[static_cast<size_t>(c)] +
                                     xhat * Sdyx[static_cast<size_t>(c)]) / m;
                        }
                        out[i * dv + c] = g * grad;
                    }
                }
                ds[static_cast<size_t>(b)] = std::move(out);
            });
        } else {
            for (int64_t b = 0; b < B; ++b) ds[static_cast<size_t>(b)] = std::move(dv_cur[static_cast<size_t>(b)]);
        }

        parallel_for(B, threads, [&](int64_t b) {
            const Field& dsb = ds[static_cast<size_t>(b)];
            const Field& vin = cache.v[static_cast<size_t>(t)][static_cast<size_t>(b)];

            affine_backward_params(dsb.data(), n_points, dv, vin.data(), dv,
                                   slot_seg(b, prefix + "W.weight"), slot_seg(b, prefix + "W.bias"));
            Field dvin(vin.shape());
            affine_backward_data(dsb.data(), n_points, dv, lp.w, dvin.data(), dv);

            // spectral path adjoint
            SpectralField g = fft::idft_adjoint(dsb, d, last_logical);
            fft::symmetrize_planes(g);
            std::vector<std::complex<double>> gblock(static_cast<size_t>(n_modes * dv));
            detail::gather_block(g, cache.block_offsets, dv, gblock.data());
            std::vector<std::complex<double>> dT(gblock.size());
            detail::mode_multiply_adjoint(
                lp.r, gblock.data(),
                cache.trunc[static_cast<size_t>(t)][static_cast<size_t>(b)].data(), n_modes, dv,
                slot_seg(b, prefix + "R"), dT.data());
            SpectralField dspec(g.shape(), d, last_logical);
            detail::scatter_block(dT.data(), cache.block_offsets, dv, dspec);
            Field dv2 = fft::dft_adjoint(dspec);
            for (int64_t i = 0; i < dvin.size(); ++i) dvin[i] += dv2[i];
            dv_cur[static_cast<size_t>(b)] = std::move(dvin);
        });
    }

    parallel_for(B, threads, [&](int64_t b) {
        affine_backward_params(dv_cur[static_cast<size_t>(b)].data(), n_points, dv,
                               cache.aug[static_cast<size_t>(b)].data(), cfg.lifted_channels(),
                               slot_seg(b, "P.weight"), slot_seg(b, "P.bias"));
    });

    double* g = grads.data();
    for (int64_t b = 0; b < B; ++b) {
        const auto& slot = slots[static_cast<size_t>(b)];
        for (int64_t i = 0; i < grads.size(); ++i) g[i] += slot[static_cast<size_t>(i)];
    }
    return loss;
}

double batch_loss(FnoModel& model, const std::vector<Field>& inputs,
                  const std::vector<Field>& targets, bool training, int threads) {
    BatchCache cache;
    forward_batch(model, inputs, training, cache, threads);
    double loss = 0.0;
    for (int64_t b = 0; b < cache.batch; ++b)
        loss += loss_rel_l2(cache.output[static_cast<size_t>(b)], targets[static_cast<size_t>(b)]);
    return loss / static_cast<double>(cache.batch);
}

AdamState AdamState::fresh(const ParamStore& params) {
    AdamState s;
    s.m.assign(static_cast<size_t>(params.size()), 0.0);
    s.v.assign(static_cast<size_t>(params.size()), 0.0);
    return s;
}

void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state, double lr) {
    FNO_REQUIRE(params.size() == grads.size(), DataError, "adam: layout mismatch");
    FNO_REQUIRE(static_cast<int64_t>(state.m.size()) == params.size(), DataError,
                "adam: state size mismatch");
    FNO_REQUIRE(grads.all_finite(), NumericError, "adam: non-finite gradient");
    state.t += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    double* p = params.data();
    const double* g = grads.data();
    for (int64_t i = 0; i < params.size(); ++i) {
        double& m = state.m[static_cast<size_t>(i)];
        double& v = state.v[static_cast<size_t>(i)];
        m = state.beta1 * m + (1.0 - state.beta1) * g[i];
        v = state.beta2 * v + (1.0 - state.beta2) * g[i] * g[i];
        double mhat = m / bc1;
        double vhat = v / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
    return cfg.lr0 * std::pow(0.5, static_cast<double>(epoch / cfg.halve_every));
}

std::vector<EpochRecord> train(FnoModel& model, const SampleSource& train_data,
                               const SampleSource& test_data, const TrainConfig& cfg,
                               AdamState& adam, const EpochCallback& callback) {
    FNO_REQUIRE(train_data.size() > 0, DataError, "train: empty dataset");
    FNO_REQUIRE(cfg.epochs >= 0 && cfg.batch >= 1 && cfg.lr0 > 0.0, UsageError,
                "train: bad epochs/batch/lr configuration");
    const int64_t N = train_data.size();
    std::vector<EpochRecord> records;

    for (int epoch = cfg.start_epoch; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        double lr = learning_rate_at(cfg, epoch);

        std::vector<int64_t> order(static_cast<size_t>(N));
        std::iota(order.begin(), order.end(), int64_t{0});
        RngStream shuffle = RngStream(cfg.seed).derive(0x5u).derive(static_cast<uint64_t>(epoch));
        for (int64_t i = N - 1; i > 0; --i) {
            int64_t j = static_cast<int64_t>(shuffle.next_u64() % static_cast<uint64_t>(i + 1));
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }

        double epoch_loss = 0.0;
        int64_t seen = 0;
        ParamStore grads = ParamStore::layout_for(model.config);
        BatchCache cache;
        for (int64_t start = 0; start < N; start += cfg.batch) {
            int64_t bsize = std::min<int64_t>(cfg.batch, N - start);
            std::vector<Field> inputs(static_cast<size_t>(bsize)), targets(static_cast<size_t>(bsize));
            parallel_for(bsize, cfg.threads, [&](int64_t i) {
                train_data.load(order[static_cast<size_t>(start + i)], inputs[static_cast<size_t>(i)],
                                targets[static_cast<size_t>(i)]);
            });
            forward_batch(model, inputs, true, cache, cfg.threads);
            grads.fill(0.0);
            double loss = backward_batch(model, cache, targets, grads, cfg.threads);
            adam_step(model.params, grads, adam, lr);
            epoch_loss += loss * static_cast<double>(bsize);
            seen += bsize;
        }
        epoch_loss /= static_cast<double>(seen);
        FNO_REQUIRE(epoch_loss <= cfg.divergence_limit, NumericError,
                    "train: diverged at epoch ", epoch, " (loss ", epoch_loss, ")");

        double test_loss = test_data.size() > 0 ? evaluate(model, test_data, cfg.threads) : 0.0;
        auto t1 = std::chrono::steady_clock::now();
        EpochRecord rec{epoch, lr, epoch_loss, test_loss,
                        std::chrono::duration<double>(t1 - t0).count()};
        records.push_back(rec);
        if (callback) callback(rec, model, adam);
    }
    return records;
}

double evaluate(const FnoModel& model, const SampleSource& data, int threads) {
    const int64_t N = data.size();
    FNO_REQUIRE(N > 0, DataError, "evaluate: empty dataset");
    std::vector<double> losses(static_cast<size_t>(N));
    parallel_for(N, threads, [&](int64_t i) {
        Field input, target;
        data.load(i, input, target);
        Field pred = forward(model, input);
        losses[static_cast<size_t>(i)] = loss_rel_l2(pred, target);
    });
    double acc = 0.0;
    for (double l : losses) acc += l;
    return acc / static_cast<double>(N);
}

double evaluate_rollout(const FnoModel& model, const std::vector<Field>& seeds,
                        const std::vector<Field>& truth_blocks, int threads) {
    FNO_REQUIRE(seeds.size() == truth_blocks.size() && !seeds.empty(), DataError,
                "evaluate_rollout: seed/truth mismatch");
    const int64_t N = static_cast<int64_t>(seeds.size());
    std::vector<double> losses(static_cast<size_t>(N));
    parallel_for(N, threads, [&](int64_t i) {
        const Field& truth = truth_blocks[static_cast<size_t>(i)];
        int64_t horizon = truth.extent(truth.rank() - 1);
        Field pred = rollout(model, seeds[static_cast<size_t>(i)], horizon);
        losses[static_cast<size_t>(i)] = loss_rel_l2(pred, truth);
    });
    double acc = 0.0;
    for (double l : losses) acc += l;
    return acc / static_cast<double>(N);
}

} // namespace fno
