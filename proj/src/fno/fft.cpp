#include "fno/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>

namespace fno::fft {

namespace {

// FFTW planning is not thread-safe; execution through the new-array interface
// is. Plans are created once per spatial shape with FFTW_ESTIMATE (deterministic)
// and FFTW_UNALIGNED (no SIMD alignment requirement on caller buffers).
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct TransformPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan dct1 = nullptr;
};

std::vector<int> to_int_dims(const Shape& extents) {
    std::vector<int> dims(extents.size());
    for (size_t i = 0; i < extents.size(); ++i) {
        FNO_REQUIRE(extents[i] <= std::numeric_limits<int>::max(), DataError,
                    "transform extent too large: ", extents[i]);
        dims[i] = static_cast<int>(extents[i]);
    }
    return dims;
}

TransformPlans& plans_for(const Shape& logical_spatial) {
    static std::map<Shape, TransformPlans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(logical_spatial);
    if (it != cache.end()) return it->second;

    auto dims = to_int_dims(logical_spatial);
    int64_t n = shape_size(logical_spatial);
    int64_t half = n / logical_spatial.back() * (logical_spatial.back() / 2 + 1);

    double* real_buf = fftw_alloc_real(static_cast<size_t>(n));
    fftw_complex* cplx_buf = fftw_alloc_complex(static_cast<size_t>(half));
    TransformPlans plans;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans.r2c = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), real_buf, cplx_buf, flags);
    plans.c2r = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), cplx_buf, real_buf, flags);
    fftw_free(real_buf);
    fftw_free(cplx_buf);
    FNO_REQUIRE(plans.r2c && plans.c2r, NumericError, "fftw planning failed for shape ",
                shape_str(logical_spatial));
    return cache.emplace(logical_spatial, plans).first->second;
}

fftw_plan dct1_plan_for(const Shape& extents) {
    static std::map<Shape, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(extents);
    if (it != cache.end()) return it->second;

    auto dims = to_int_dims(extents);
    int64_t n = shape_size(extents);
    double* in = fftw_alloc_real(static_cast<size_t>(n));
    double* out = fftw_alloc_real(static_cast<size_t>(n));
    std::vector<fftw_r2r_kind> kinds(extents.size(), FFTW_REDFT00);
    fftw_plan plan = fftw_plan_r2r(static_cast<int>(dims.size()), dims.data(), in, out, kinds.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    FNO_REQUIRE(plan, NumericError, "fftw DCT-I planning failed for shape ", shape_str(extents));
    return cache.emplace(extents, plan).first->second;
}

struct SplitShape {
    Shape spatial;       // logical spatial extents
    int64_t n_spatial;   // grid points
    int64_t n_channels;  // product of trailing extents
};

SplitShape split_field_shape(const Shape& shape, int spatial_rank) {
    FNO_REQUIRE(spatial_rank >= 1 && spatial_rank <= static_cast<int>(shape.size()), DataError,
                "spatial rank ", spatial_rank, " out of range for shape ", shape_str(shape));
    SplitShape s;
    s.spatial.assign(shape.begin(), shape.begin() + spatial_rank);
    s.n_spatial = shape_size(s.spatial);
    s.n_channels = 1;
    for (size_t a = static_cast<size_t>(spatial_rank); a < shape.size(); ++a) s.n_channels *= shape[a];
    return s;
}

} // namespace

SpectralField dft(const Field& field, int spatial_rank) {
    check_finite(field, "dft");
    auto split = split_field_shape(field.shape(), spatial_rank);
    int64_t s_last = split.spatial.back();
    int64_t half_last = s_last / 2 + 1;
    int64_t stored_spatial = split.n_spatial / s_last * half_last;

    Shape stored_shape = field.shape();
    stored_shape[static_cast<size_t>(spatial_rank - 1)] = half_last;
    SpectralField out(std::move(stored_shape), spatial_rank, s_last);

    auto& plans = plans_for(split.spatial);
    std::vector<double> scratch_in(static_cast<size_t>(split.n_spatial));
    std::vector<std::complex<double>> scratch_out(static_cast<size_t>(stored_spatial));
    const double* src = field.data();
    std::complex<double>* dst = out.data();
    int64_t nc = split.n_channels;
    for (int64_t c = 0; c < nc; ++c) {
        for (int64_t i = 0; i < split.n_spatial; ++i) scratch_in[static_cast<size_t>(i)] = src[i * nc + c];
        fftw_execute_dft_r2c(plans.r2c, scratch_in.data(),
                             reinterpret_cast<fftw_complex*>(scratch_out.data()));
        for (int64_t i = 0; i < stored_spatial; ++i) dst[i * nc + c] = scratch_out[static_cast<size_t>(i)];
    }
    return out;
}

namespace {

Field c2r_impl(const SpectralField& spec, double scale) {
    Shape spatial = spec.logical_spatial();
    auto& plans = plans_for(spatial);
    int64_t n_spatial = spec.logical_spatial_size();
    int64_t stored_spatial = spec.stored_spatial_size();
    int64_t nc = spec.channel_size();

    Shape out_shape = spec.shape();
    out_shape[static_cast<size_t>(spec.spatial_rank() - 1)] = spatial.back();
    Field out(std::move(out_shape));

    std::vector<std::complex<double>> scratch_in(static_cast<size_t>(stored_spatial));
    std::vector<double> scratch_out(static_cast<size_t>(n_spatial));
    const std::complex<double>* src = spec.data();
    double* dst = out.data();
    for (int64_t c = 0; c < nc; ++c) {
        for (int64_t i = 0; i < stored_spatial; ++i) scratch_in[static_cast<size_t>(i)] = src[i * nc + c];
        fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                             scratch_out.data());
        for (int64_t i = 0; i < n_spatial; ++i) dst[i * nc + c] = scratch_out[static_cast<size_t>(i)] * scale;
    }
    return out;
}

} // namespace

Field idft(const SpectralField& spec) {
    return c2r_impl(spec, 1.0 / static_cast<double>(spec.logical_spatial_size()));
}

Field idft_unnormalized(const SpectralField& spec) { return c2r_impl(spec, 1.0); }

SpectralField idft_adjoint(const Field& cotangent, int spatial_rank, int64_t last_logical_extent) {
    FNO_REQUIRE(cotangent.extent(spatial_rank - 1) == last_logical_extent, DataError,
                "idft_adjoint: cotangent last spatial extent mismatch");
    SpectralField g = dft(cotangent, spatial_rank);
    double inv_n = 1.0 / static_cast<double>(g.logical_spatial_size());
    int64_t half_last = g.extent(spatial_rank - 1);
    int64_t lead = g.stored_spatial_size() / half_last;
    int64_t nc = g.channel_size();
    std::complex<double>* d = g.data();
    for (int64_t l = 0; l < lead; ++l) {
        for (int64_t p = 0; p < half_last; ++p) {
            double w = on_self_conjugate_plane(p, last_logical_extent) ? inv_n : 2.0 * inv_n;
            int64_t base = (l * half_last + p) * nc;
            for (int64_t c = 0; c < nc; ++c) d[base + c] *= w;
        }
    }
    return g;
}

Field dft_adjoint(const SpectralField& cotangent) {
    SpectralField x = cotangent;
    int64_t half_last = x.extent(x.spatial_rank() - 1);
    int64_t lead = x.stored_spatial_size() / half_last;
    int64_t nc = x.channel_size();
    std::complex<double>* d = x.data();
    for (int64_t l = 0; l < lead; ++l) {
        for (int64_t p = 0; p < half_last; ++p) {
            if (on_self_conjugate_plane(p, x.last_logical_extent())) continue;
            int64_t base = (l * half_last + p) * nc;
            for (int64_t c = 0; c < nc; ++c) d[base + c] *= 0.5;
        }
    }
    symmetrize_planes(x);
    return idft_unnormalized(x);
}

void symmetrize_planes(SpectralField& spec) {
    int d = spec.spatial_rank();
    Shape lead_extents(spec.shape().begin(), spec.shape().begin() + (d - 1));
    int64_t lead = shape_size(lead_extents);
    if (d == 1) lead = 1;
    int64_t half_last = spec.extent(d - 1);
    int64_t nc = spec.channel_size();
    std::complex<double>* data = spec.data();

    std::vector<int64_t> planes;
    planes.push_back(0);
    if (spec.last_logical_extent() % 2 == 0 && half_last == spec.last_logical_extent() / 2 + 1)
        planes.push_back(half_last - 1);

    Shape index(static_cast<size_t>(std::max(d - 1, 1)), 0);
    for (int64_t l = 0; l < lead; ++l) {
        // multi-index over the leading axes and its negation mod extents
        int64_t rem = l;
        for (int a = d - 2; a >= 0; --a) {
            index[static_cast<size_t>(a)] = rem % lead_extents[static_cast<size_t>(a)];
            rem /= lead_extents[static_cast<size_t>(a)];
        }
        int64_t neg = 0;
        for (int a = 0; a < d - 1; ++a) {
            int64_t e = lead_extents[static_cast<size_t>(a)];
            int64_t i = index[static_cast<size_t>(a)];
            neg = neg * e + (i == 0 ? 0 : e - i);
        }
        if (neg < l) continue;
        for (int64_t p : planes) {
            int64_t base_a = (l * half_last + p) * nc;
            int64_t base_b = (neg * half_last + p) * nc;
            for (int64_t c = 0; c < nc; ++c) {
                if (neg == l) {
                    data[base_a + c] = {data[base_a + c].real(), 0.0};
                } else {
                    std::complex<double> za = data[base_a + c];
                    std::complex<double> zb = data[base_b + c];
                    std::complex<double> avg = 0.5 * (za + std::conj(zb));
                    data[base_a + c] = avg;
                    data[base_b + c] = std::conj(avg);
                }
            }
        }
    }
}

Field cosine_series_eval(const Field& coeffs, int spatial_rank) {
    auto split = split_field_shape(coeffs.shape(), spatial_rank);
    for (int64_t e : split.spatial)
        FNO_REQUIRE(e >= 2, DataError, "cosine series needs extents >= 2, got ",
                    shape_str(split.spatial));
    fftw_plan plan = dct1_plan_for(split.spatial);

    // REDFT00 computes Y_j = X_0 + (-1)^j X_{n-1} + 2 sum_interior X_k cos(...)
    // per axis, so interior coefficients carry a factor 1/2 per axis.
    Field out(coeffs.shape());
    std::vector<double> scratch_in(static_cast<size_t>(split.n_spatial));
    std::vector<double> scratch_out(static_cast<size_t>(split.n_spatial));
    int64_t nc = split.n_channels;
    const double* src = coeffs.data();
    double* dst = out.data();
    Shape index(static_cast<size_t>(spatial_rank), 0);
    for (int64_t c = 0; c < nc; ++c) {
        for (int64_t i = 0; i < split.n_spatial; ++i) {
            int64_t rem = i;
            double factor = 1.0;
            for (int a = spatial_rank - 1; a >= 0; --a) {
                int64_t e = split.spatial[static_cast<size_t>(a)];
                int64_t k = rem % e;
                rem /= e;
                if (k > 0 && k < e - 1) factor *= 0.5;
            }
            scratch_in[static_cast<size_t>(i)] = src[i * nc + c] * factor;
        }
        fftw_execute_r2r(plan, scratch_in.data(), scratch_out.data());
        for (int64_t i = 0; i < split.n_spatial; ++i) dst[i * nc + c] = scratch_out[static_cast<size_t>(i)];
    }
    return out;
}

} // namespace fno::fft
