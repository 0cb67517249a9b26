#include "fno/dataset.hpp"

#include <fstream>

#include "fno/grf.hpp"
#include "fno/tensor_io.hpp"

namespace fno {

void write_dataset(const std::string& stem, const Field& inputs, const Field& targets,
                   const std::string& meta_json, const std::string& sidecar_json) {
    FNO_REQUIRE(inputs.extent(0) == targets.extent(0), DataError,
                "dataset: input/target sample counts differ");
    TensorContainer in_c, tg_c;
    in_c.add_field("data", inputs);
    in_c.add_text("meta", meta_json);
    tg_c.add_field("data", targets);
    tg_c.add_text("meta", meta_json);
    in_c.write(stem + ".inputs.fnot");
    tg_c.write(stem + ".targets.fnot");

    std::string tmp = stem + ".json.tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        FNO_REQUIRE(f.good(), DataError, "cannot write '", tmp, "'");
        f << (sidecar_json.empty() ? meta_json : sidecar_json) << "\n";
    }
    FNO_REQUIRE(std::rename(tmp.c_str(), (stem + ".json").c_str()) == 0, DataError,
                "atomic rename failed for '", stem, ".json'");
}

StoredDataset load_dataset(const std::string& stem) {
    StoredDataset ds;
    TensorContainer in_c = TensorContainer::read(stem + ".inputs.fnot");
    TensorContainer tg_c = TensorContainer::read(stem + ".targets.fnot");
    ds.inputs = in_c.field("data");
    ds.targets = tg_c.field("data");
    ds.meta_json = in_c.text("meta");
    check_finite(ds.inputs, "dataset inputs");
    check_finite(ds.targets, "dataset targets");
    FNO_REQUIRE(ds.inputs.extent(0) == ds.targets.extent(0), DataError, "dataset '", stem,
                "': input/target sample counts differ");
    return ds;
}

Field slice_first_axis(const Field& stacked, int64_t index) {
    FNO_REQUIRE(index >= 0 && index < stacked.extent(0), DataError, "sample index ", index,
                " out of range");
    Shape shape(stacked.shape().begin() + 1, stacked.shape().end());
    int64_t n = shape_size(shape);
    Field out(shape);
    std::copy(stacked.data() + index * n, stacked.data() + (index + 1) * n, out.data());
    return out;
}

namespace {

Field with_channel_axis(Field f) {
    Shape shape = f.shape();
    shape.push_back(1);
    return Field(shape, std::move(f.values()));
}

} // namespace

SlicePairSource::SlicePairSource(Field inputs, Field targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
    FNO_REQUIRE(inputs_.extent(0) == targets_.extent(0), DataError,
                "pair source: sample counts differ");
}

void SlicePairSource::load(int64_t index, Field& input, Field& target) const {
    input = with_channel_axis(slice_first_axis(inputs_, index));
    target = with_channel_axis(slice_first_axis(targets_, index));
}

Field NsFrames::frame(int64_t sample, int64_t t) const {
    FNO_REQUIRE(t >= 0 && t <= recorded(), DataError, "frame index ", t, " out of range");
    if (t == 0) return slice_first_axis(w0, sample);
    int64_t s = resolution(), nt = recorded();
    Field out(Shape{s, s});
    const double* src = traj.data() + sample * s * s * nt;
    for (int64_t p = 0; p < s * s; ++p) out[p] = src[p * nt + (t - 1)];
    return out;
}

Field NsFrames::frame_block(int64_t sample, int64_t t0, int64_t n) const {
    FNO_REQUIRE(t0 >= 0 && t0 + n <= recorded() + 1, DataError, "frame block [", t0, ", ", t0 + n,
                ") out of range");
    int64_t s = resolution(), nt = recorded();
    Field out(Shape{s, s, n});
    const double* src = traj.data() + sample * s * s * nt;
    const double* w0p = w0.data() + sample * s * s;
    for (int64_t p = 0; p < s * s; ++p)
        for (int64_t t = 0; t < n; ++t) {
            int64_t ft = t0 + t;
            out[p * n + t] = ft == 0 ? w0p[p] : src[p * nt + (ft - 1)];
        }
    return out;
}

NsFrames ns_frames_from(const StoredDataset& ds) {
    FNO_REQUIRE(ds.inputs.rank() == 3 && ds.targets.rank() == 4, DataError,
                "ns dataset must have [N,s,s] inputs and [N,s,s,T] targets");
    NsFrames frames;
    frames.w0 = ds.inputs;
    frames.traj = ds.targets;
    return frames;
}

RnnWindowSource::RnnWindowSource(std::shared_ptr<const NsFrames> frames, int64_t window,
                                 int64_t stride)
    : frames_(std::move(frames)), window_(window), stride_(stride) {
    FNO_REQUIRE(window_ >= 1 && stride_ >= 1, DataError, "window source: bad window/stride");
    int64_t last_start = frames_->recorded() - window_; // target must exist
    FNO_REQUIRE(last_start >= 0, DataError, "window source: trajectory shorter than window");
    per_sample_ = last_start / stride_ + 1;
}

int64_t RnnWindowSource::size() const { return frames_->count() * per_sample_; }

void RnnWindowSource::load(int64_t index, Field& input, Field& target) const {
    int64_t sample = index / per_sample_;
    int64_t t0 = (index % per_sample_) * stride_;
    input = frames_->frame_block(sample, t0, window_);
    target = with_channel_axis(frames_->frame(sample, t0 + window_));
}

SpaceTimeBlockSource::SpaceTimeBlockSource(std::shared_ptr<const NsFrames> frames, int64_t window,
                                           int64_t horizon)
    : frames_(std::move(frames)), window_(window), horizon_(horizon) {
    FNO_REQUIRE(window_ >= 1 && horizon_ >= 1, DataError, "block source: bad window/horizon");
    FNO_REQUIRE(window_ + horizon_ <= frames_->recorded(), DataError,
                "block source: trajectory has ", frames_->recorded(), " frames, needs ",
                window_ + horizon_);
}

void SpaceTimeBlockSource::load(int64_t index, Field& input, Field& target) const {
    input = frames_->frame_block(index, 1, window_);
    Field block = frames_->frame_block(index, window_ + 1, horizon_);
    target = with_channel_axis(std::move(block));
}

NsPairSource::NsPairSource(std::shared_ptr<const NsFrames> frames, int64_t target_frame)
    : frames_(std::move(frames)), target_frame_(target_frame) {
    FNO_REQUIRE(target_frame_ >= 1 && target_frame_ <= frames_->recorded(), DataError,
                "pair source: target frame ", target_frame_, " out of range");
}

void NsPairSource::load(int64_t index, Field& input, Field& target) const {
    input = with_channel_axis(frames_->frame(index, 0));
    target = with_channel_axis(frames_->frame(index, target_frame_));
}

RolloutSet make_rollout_set(const NsFrames& frames, int64_t window, int64_t horizon) {
    FNO_REQUIRE(window + horizon <= frames.recorded(), DataError,
                "rollout set: trajectory has ", frames.recorded(), " frames, needs ",
                window + horizon);
    RolloutSet out;
    for (int64_t i = 0; i < frames.count(); ++i) {
        out.seeds.push_back(frames.frame_block(i, 1, window));
        out.truths.push_back(frames.frame_block(i, window + 1, horizon));
    }
    return out;
}

Field downsample_stack(const Field& stacked, int spatial_rank, int64_t factor) {
    std::vector<int64_t> factors(static_cast<size_t>(stacked.rank()), 1);
    for (int a = 1; a <= spatial_rank; ++a) factors[static_cast<size_t>(a)] = factor;
    return downsample(stacked, factors);
}

} // namespace fno
