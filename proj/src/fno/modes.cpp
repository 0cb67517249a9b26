#include "fno/modes.hpp"

#include <algorithm>
#include <iostream>

#include "fno/fft.hpp"

namespace fno {

namespace {

void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

bool axis_is_full(const ModeSet& ms, int axis) { return axis + 1 < ms.rank(); }

// Per-axis list of logical indices in ascending stored order.
std::vector<int64_t> logical_axis_indices(int64_t s, int64_t k) {
    std::vector<int64_t> idx;
    if (2 * k + 1 >= s) {
        idx.resize(static_cast<size_t>(s));
        for (int64_t i = 0; i < s; ++i) idx[static_cast<size_t>(i)] = i;
        return idx;
    }
    for (int64_t i = 0; i <= k; ++i) idx.push_back(i);
    for (int64_t i = s - k; i < s; ++i) idx.push_back(i);
    return idx;
}

} // namespace

int64_t ModeSet::stored_index(int axis, int64_t c) const {
    int64_t s = resolution[static_cast<size_t>(axis)];
    int64_t k = kmax[static_cast<size_t>(axis)];
    int64_t b = block[static_cast<size_t>(axis)];
    if (!axis_is_full(*this, axis)) return c;   // half axis stores 0..kmax directly
    if (b == s) return c;                       // whole axis retained
    return c <= k ? c : s - (b - c);
}

int64_t ModeSet::frequency(int axis, int64_t c) const {
    int64_t s = resolution[static_cast<size_t>(axis)];
    int64_t k = kmax[static_cast<size_t>(axis)];
    int64_t b = block[static_cast<size_t>(axis)];
    if (!axis_is_full(*this, axis)) return c;
    if (b == s) return signed_frequency(c, s);
    return c <= k ? c : c - b;
}

std::vector<Shape> ModeSet::logical_indices() const {
    std::vector<std::vector<int64_t>> per_axis;
    for (int a = 0; a < rank(); ++a)
        per_axis.push_back(
            logical_axis_indices(resolution[static_cast<size_t>(a)], kmax[static_cast<size_t>(a)]));
    std::vector<Shape> out;
    Shape cursor(per_axis.size(), 0);
    int64_t total = 1;
    for (auto& v : per_axis) total *= static_cast<int64_t>(v.size());
    out.reserve(static_cast<size_t>(total));
    for (int64_t flat = 0; flat < total; ++flat) {
        int64_t rem = flat;
        Shape idx(per_axis.size());
        for (int a = rank() - 1; a >= 0; --a) {
            auto& v = per_axis[static_cast<size_t>(a)];
            idx[static_cast<size_t>(a)] = v[static_cast<size_t>(rem % static_cast<int64_t>(v.size()))];
            rem /= static_cast<int64_t>(v.size());
        }
        out.push_back(std::move(idx));
    }
    return out;
}

std::vector<Shape> ModeSet::stored_indices() const {
    std::vector<Shape> out;
    out.reserve(static_cast<size_t>(total()));
    int64_t n = total();
    for (int64_t flat = 0; flat < n; ++flat) {
        int64_t rem = flat;
        Shape idx(static_cast<size_t>(rank()));
        for (int a = rank() - 1; a >= 0; --a) {
            int64_t b = block[static_cast<size_t>(a)];
            idx[static_cast<size_t>(a)] = stored_index(a, rem % b);
            rem /= b;
        }
        out.push_back(std::move(idx));
    }
    return out;
}

ModeSet mode_set(const Shape& resolution, const Shape& kmax) {
    return mode_set(resolution, kmax, &warn_stderr);
}

ModeSet mode_set(const Shape& resolution, const Shape& kmax, void (*warn)(const std::string&)) {
    FNO_REQUIRE(!resolution.empty() && resolution.size() == kmax.size(), DataError,
                "mode_set: resolution and kmax ranks differ");
    ModeSet ms;
    ms.resolution = resolution;
    ms.kmax = kmax;
    ms.block.resize(resolution.size());
    for (size_t a = 0; a < resolution.size(); ++a) {
        int64_t s = resolution[a];
        int64_t k = kmax[a];
        FNO_REQUIRE(s >= 1, DataError, "mode_set: zero extent on axis ", a);
        FNO_REQUIRE(k >= 0, DataError, "mode_set: negative cutoff on axis ", a);
        if (2 * k + 1 > s && warn)
            warn(concat("mode cutoff ", k, " exceeds resolution ", s, " on axis ", a,
                        "; truncating to available modes"));
        bool last = a + 1 == resolution.size();
        if (last)
            ms.block[a] = std::min<int64_t>(k + 1, s / 2 + 1);
        else
            ms.block[a] = std::min<int64_t>(2 * k + 1, s);
    }
    return ms;
}

SpectralField truncate(const SpectralField& spec, const ModeSet& modes) {
    FNO_REQUIRE(spec.logical_spatial() == modes.resolution, DataError,
                "truncate: mode set resolved for ", shape_str(modes.resolution),
                " but spectrum has spatial extents ", shape_str(spec.logical_spatial()));
    int d = spec.spatial_rank();
    int64_t nc = spec.channel_size();

    // Output = the same coefficients at the minimal resolution holding them.
    Shape out_logical = modes.block;
    int64_t last_logical = std::min<int64_t>(2 * modes.kmax.back() + 1, modes.resolution.back());
    out_logical[static_cast<size_t>(d - 1)] = last_logical;
    Shape out_stored = spec.shape();
    for (int a = 0; a < d; ++a) out_stored[static_cast<size_t>(a)] = modes.block[static_cast<size_t>(a)];
    SpectralField out(std::move(out_stored), d, last_logical);

    int64_t total_block = modes.total();
    const std::complex<double>* src = spec.data();
    std::complex<double>* dst = out.data();
    Shape in_strides(static_cast<size_t>(d));
    int64_t stride = nc;
    for (int a = d - 1; a >= 0; --a) {
        in_strides[static_cast<size_t>(a)] = stride;
        stride *= spec.extent(a);
    }
    double scale = static_cast<double>(out.logical_spatial_size()) /
                   static_cast<double>(spec.logical_spatial_size());
    for (int64_t flat = 0; flat < total_block; ++flat) {
        int64_t rem = flat;
        int64_t src_off = 0;
        for (int a = d - 1; a >= 0; --a) {
            int64_t b = modes.block[static_cast<size_t>(a)];
            src_off += modes.stored_index(a, rem % b) * in_strides[static_cast<size_t>(a)];
            rem /= b;
        }
        for (int64_t c = 0; c < nc; ++c) dst[flat * nc + c] = scale * src[src_off + c];
    }
    return out;
}

SpectralField embed(const SpectralField& small, const Shape& target_resolution) {
    int d = small.spatial_rank();
    FNO_REQUIRE(static_cast<int>(target_resolution.size()) == d, DataError,
                "embed: target resolution rank mismatch");
    Shape small_logical = small.logical_spatial();
    for (int a = 0; a < d; ++a)
        FNO_REQUIRE(target_resolution[static_cast<size_t>(a)] >= small_logical[static_cast<size_t>(a)],
                    DataError, "embed: target resolution ", shape_str(target_resolution),
                    " smaller than source ", shape_str(small_logical), " on axis ", a);

    int64_t nc = small.channel_size();
    Shape out_stored = small.shape();
    for (int a = 0; a < d; ++a) out_stored[static_cast<size_t>(a)] = target_resolution[static_cast<size_t>(a)];
    out_stored[static_cast<size_t>(d - 1)] = target_resolution[static_cast<size_t>(d - 1)] / 2 + 1;
    SpectralField out(std::move(out_stored), d, target_resolution[static_cast<size_t>(d - 1)]);

    // Per-axis placement of a source index: usually one target slot; a Nyquist
    // coefficient going to a strictly larger axis splits in half across +/-N
    // (the minus branch of the half axis is implied by storage and dropped).
    struct Slot {
        int64_t index;
        double weight;
    };
    auto axis_slots = [&](int a, int64_t i) {
        int64_t s = small_logical[static_cast<size_t>(a)];
        int64_t t = target_resolution[static_cast<size_t>(a)];
        bool last = a + 1 == d;
        std::vector<Slot> slots;
        int64_t freq = last ? i : signed_frequency(i, s);
        bool nyquist = (s % 2 == 0) && (freq == s / 2);
        if (!nyquist || t == s) {
            int64_t idx = freq >= 0 ? freq : t + freq;
            slots.push_back({idx, 1.0});
        } else if (last) {
            slots.push_back({freq, 0.5});
        } else {
            slots.push_back({freq, 0.5});
            slots.push_back({t - freq, 0.5});
        }
        return slots;
    };

    int64_t small_stored = small.stored_spatial_size();
    const std::complex<double>* src = small.data();
    std::complex<double>* dst = out.data();
    Shape out_strides(static_cast<size_t>(d));
    int64_t stride = nc;
    for (int a = d - 1; a >= 0; --a) {
        out_strides[static_cast<size_t>(a)] = stride;
        stride *= out.extent(a);
    }

    double scale = static_cast<double>(out.logical_spatial_size()) /
                   static_cast<double>(small.logical_spatial_size());

    std::vector<std::vector<Slot>> slots(static_cast<size_t>(d));
    for (int64_t flat = 0; flat < small_stored; ++flat) {
        int64_t rem = flat;
        for (int a = d - 1; a >= 0; --a) {
            int64_t e = small.extent(a);
            slots[static_cast<size_t>(a)] = axis_slots(a, rem % e);
            rem /= e;
        }
        int64_t combos = 1;
        for (auto& s : slots) combos *= static_cast<int64_t>(s.size());
        for (int64_t combo = 0; combo < combos; ++combo) {
            int64_t crem = combo;
            int64_t off = 0;
            double w = 1.0;
            for (int a = d - 1; a >= 0; --a) {
                auto& s = slots[static_cast<size_t>(a)];
                const Slot& slot = s[static_cast<size_t>(crem % static_cast<int64_t>(s.size()))];
                crem /= static_cast<int64_t>(s.size());
                off += slot.index * out_strides[static_cast<size_t>(a)];
                w *= slot.weight;
            }
            for (int64_t c = 0; c < nc; ++c) dst[off + c] += scale * w * src[flat * nc + c];
        }
    }
    return out;
}

Field lowpass(const Field& field, int spatial_rank, const Shape& kmax) {
    Shape resolution(field.shape().begin(), field.shape().begin() + spatial_rank);
    SpectralField spec = fft::dft(field, spatial_rank);
    ModeSet ms = mode_set(resolution, kmax);
    SpectralField small = truncate(spec, ms);
    SpectralField back = embed(small, resolution);
    return fft::idft(back);
}

} // namespace fno
