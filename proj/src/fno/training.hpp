#pragma once

#include <functional>

#include "fno/model.hpp"

namespace fno {

/// Abstract sample access so trajectory-derived training sets (RNN windows,
/// space-time blocks) need not be materialized. Implementations must be
/// thread-safe for concurrent load() calls.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual int64_t size() const = 0;
    virtual void load(int64_t index, Field& input, Field& target) const = 0;
};

/// Materialized (input, target) pairs.
class PairSource : public SampleSource {
public:
    PairSource() = default;
    PairSource(std::vector<Field> inputs, std::vector<Field> targets);
    int64_t size() const override { return static_cast<int64_t>(inputs.size()); }
    void load(int64_t index, Field& input, Field& target) const override;

    std::vector<Field> inputs, targets;
};

/// ||pred - target||_2 / ||target||_2 for one sample. Zero-norm targets are
/// rejected.
double loss_rel_l2(const Field& pred, const Field& target);

// --- reverse-mode machinery -------------------------------------------------

/// Activations cached by the batched forward pass for the backward sweep.
struct BatchCache {
    int64_t batch = 0;
    bool training = true;
    ModeSet modes;
    std::vector<int64_t> block_offsets;
    std::vector<Field> aug;                                  // [B]
    std::vector<std::vector<Field>> v;                       // [L+1][B], v[0] = lifted
    std::vector<std::vector<std::vector<std::complex<double>>>> trunc; // [L][B]
    std::vector<std::vector<Field>> pre_norm;                // [L][B]
    std::vector<std::vector<double>> mu, var;                // [L][d_v]
    std::vector<Field> q_hidden;                             // [B] post-ReLU
    std::vector<Field> output;                               // [B]
};

/// Batched forward pass. In training mode the normalization uses batch
/// statistics (and updates the running averages); in evaluation mode it uses
/// the frozen running statistics. Batch statistics are reduced in sample
/// order, so results do not depend on the thread count.
void forward_batch(FnoModel& model, const std::vector<Field>& inputs, bool training,
                   BatchCache& cache, int threads);

/// Mean relative-L2 loss of a batch plus the exact gradient with respect to
/// every parameter. `grads` must share the model's layout; contributions are
/// accumulated (call grads.fill(0) for a fresh gradient). Per-sample
/// contributions are reduced in sample order.
double backward_batch(const FnoModel& model, const BatchCache& cache,
                      const std::vector<Field>& targets, ParamStore& grads, int threads);

/// Convenience: forward + loss without keeping gradients.
double batch_loss(FnoModel& model, const std::vector<Field>& inputs,
                  const std::vector<Field>& targets, bool training, int threads);

// --- optimization -----------------------------------------------------------

struct AdamState {
    std::vector<double> m, v;
    int64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    static AdamState fresh(const ParamStore& params);
};

/// Standard bias-corrected Adam update. Rejects non-finite gradients.
void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state, double lr);

struct TrainConfig {
    int epochs = 500;
    int batch = 20;
    double lr0 = 1e-3;
    int halve_every = 100; // epochs between halvings of the learning rate
    uint64_t seed = 0;
    int threads = 1;
    double divergence_limit = 1e3;
    int start_epoch = 0;   // resume point; epoch e draws shuffle stream (seed, e)
};

struct EpochRecord {
    int epoch;
    double lr;
    double train_rel_l2;
    double test_rel_l2;
    double wall_seconds;
};

using EpochCallback = std::function<void(const EpochRecord&, const FnoModel&, const AdamState&)>;

/// Seeded epoch loop: shuffle, batch forward/backward, Adam step, per-epoch
/// train/test relative error records. The callback (checkpointing, logging)
/// runs after every epoch.
std::vector<EpochRecord> train(FnoModel& model, const SampleSource& train_data,
                               const SampleSource& test_data, const TrainConfig& cfg,
                               AdamState& adam, const EpochCallback& callback = {});

/// Mean test relative L2 over a source (evaluation mode, resolution-free).
double evaluate(const FnoModel& model, const SampleSource& data, int threads);

/// Mean relative L2 of autoregressive rollouts: each seed [s,s,window] is
/// rolled `horizon` steps and compared against the true block [s,s,horizon].
double evaluate_rollout(const FnoModel& model, const std::vector<Field>& seeds,
                        const std::vector<Field>& truth_blocks, int threads);

double learning_rate_at(const TrainConfig& cfg, int epoch);

} // namespace fno
