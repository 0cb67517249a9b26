#pragma once

#include <memory>
#include <string>

#include "fno/training.hpp"

namespace fno {

/// A generated dataset on disk: {stem}.inputs.fnot, {stem}.targets.fnot and a
/// {stem}.json provenance sidecar. Tensors are stacked along a leading sample
/// axis.
struct StoredDataset {
    Field inputs;   // [N, ...]
    Field targets;  // [N, ...]
    std::string meta_json;

    int64_t count() const { return inputs.extent(0); }
};

void write_dataset(const std::string& stem, const Field& inputs, const Field& targets,
                   const std::string& meta_json, const std::string& sidecar_json = "");
StoredDataset load_dataset(const std::string& stem);

/// Slice sample i off the leading axis.
Field slice_first_axis(const Field& stacked, int64_t index);

/// Materialized pairs; a trailing channel axis of extent 1 is appended to
/// both sides (model inputs/outputs carry explicit channels).
class SlicePairSource : public SampleSource {
public:
    SlicePairSource(Field inputs, Field targets);
    int64_t size() const override { return inputs_.extent(0); }
    void load(int64_t index, Field& input, Field& target) const override;

private:
    Field inputs_, targets_;
};

/// Frame access over NS trajectories: frame 0 is the initial vorticity, frames
/// 1..T are the recorded snapshots.
struct NsFrames {
    Field w0;    // [N, s, s]
    Field traj;  // [N, s, s, T]

    int64_t count() const { return w0.extent(0); }
    int64_t resolution() const { return w0.extent(1); }
    int64_t recorded() const { return traj.extent(3); }
    Field frame(int64_t sample, int64_t t) const;                     // [s, s]
    Field frame_block(int64_t sample, int64_t t0, int64_t n) const;   // [s, s, n]
};

NsFrames ns_frames_from(const StoredDataset& ds);

/// Sliding windows over trajectories: input = frames [t0, t0+window) as
/// channels, target = frame t0 + window. Windows start at multiples of
/// `stride`.
class RnnWindowSource : public SampleSource {
public:
    RnnWindowSource(std::shared_ptr<const NsFrames> frames, int64_t window, int64_t stride = 1);
    int64_t size() const override;
    void load(int64_t index, Field& input, Field& target) const override;

private:
    std::shared_ptr<const NsFrames> frames_;
    int64_t window_, stride_, per_sample_;
};

/// Space-time blocks: input = frames 1..window, target = the following
/// `horizon` frames with a trailing channel axis.
class SpaceTimeBlockSource : public SampleSource {
public:
    SpaceTimeBlockSource(std::shared_ptr<const NsFrames> frames, int64_t window, int64_t horizon);
    int64_t size() const override { return frames_->count(); }
    void load(int64_t index, Field& input, Field& target) const override;

private:
    std::shared_ptr<const NsFrames> frames_;
    int64_t window_, horizon_;
};

/// (w0, w(t_target)) pairs for direct surrogate training; t_target indexes
/// recorded frames (1-based).
class NsPairSource : public SampleSource {
public:
    NsPairSource(std::shared_ptr<const NsFrames> frames, int64_t target_frame);
    int64_t size() const override { return frames_->count(); }
    void load(int64_t index, Field& input, Field& target) const override;

private:
    std::shared_ptr<const NsFrames> frames_;
    int64_t target_frame_;
};

struct RolloutSet {
    std::vector<Field> seeds;   // [s, s, window] each
    std::vector<Field> truths;  // [s, s, horizon] each
};

/// Rollout evaluation fixtures: seed = frames 1..window, truth = the rest of
/// the recorded trajectory.
RolloutSet make_rollout_set(const NsFrames& frames, int64_t window, int64_t horizon);

/// Spatial downsampling of a whole dataset (factors per spatial axis; the
/// sample and any trailing time axes are untouched).
Field downsample_stack(const Field& stacked, int spatial_rank, int64_t factor);

} // namespace fno
