#include "fno/grf.hpp"

#include <cmath>

#include "fno/fft.hpp"

namespace fno {

void GrfSpec::validate() const {
    FNO_REQUIRE(scale > 0.0 && tau > 0.0, DataError, "grf: scale and tau must be positive");
    FNO_REQUIRE(dim >= 1, DataError, "grf: dimension must be >= 1");
    FNO_REQUIRE(alpha > 0.5 * dim, NumericError, "grf: alpha = ", alpha,
                " must exceed d/2 = ", 0.5 * dim, " for sample continuity");
}

double grf_mode_std(const GrfSpec& spec, const Shape& freq) {
    double k2 = 0.0;
    for (int64_t k : freq) k2 += static_cast<double>(k) * static_cast<double>(k);
    double pi2 = M_PI * M_PI;
    double lambda = (spec.boundary == GrfBoundary::periodic) ? 4.0 * pi2 * k2 : pi2 * k2;
    return std::sqrt(spec.scale) * std::pow(lambda + spec.tau, -0.5 * spec.alpha);
}

namespace {

uint64_t freq_key(const Shape& freq) {
    uint64_t h = 0x6fca1c3a1cd1b2efULL;
    for (int64_t k : freq) h = RngStream::mix(h ^ static_cast<uint64_t>(k + (int64_t{1} << 32)));
    return h;
}

void apply_pushforward(const GrfSpec& spec, Field& f) {
    if (spec.push == GrfPushforward::none) return;
    for (int64_t i = 0; i < f.size(); ++i)
        f[i] = f[i] > spec.push_threshold ? spec.push_above : spec.push_below;
}

Field sample_periodic(const GrfSpec& spec, const Shape& resolution, const RngStream& rng) {
    int d = spec.dim;
    Shape stored = resolution;
    stored.back() = resolution.back() / 2 + 1;
    SpectralField coeffs(stored, d, resolution.back());
    double n = static_cast<double>(shape_size(resolution));

    int64_t total = coeffs.stored_spatial_size();
    Shape idx(static_cast<size_t>(d)), freq(static_cast<size_t>(d)), neg(static_cast<size_t>(d));
    for (int64_t flat = 0; flat < total; ++flat) {
        int64_t rem = flat;
        for (int a = d - 1; a >= 0; --a) {
            int64_t e = coeffs.extent(a);
            idx[static_cast<size_t>(a)] = rem % e;
            rem /= e;
        }
        bool self_conjugate = true;
        for (int a = 0; a < d; ++a) {
            int64_t s = resolution[static_cast<size_t>(a)];
            int64_t i = idx[static_cast<size_t>(a)];
            int64_t k = (a == d - 1) ? i : signed_frequency(i, s);
            freq[static_cast<size_t>(a)] = k;
            // negation mod s keeps Nyquist in place
            neg[static_cast<size_t>(a)] = (s % 2 == 0 && (k == s / 2 || k == -s / 2)) ? k : -k;
            if (neg[static_cast<size_t>(a)] != k) self_conjugate = false;
        }
        bool canonical = self_conjugate || freq >= neg;
        const Shape& key = canonical ? freq : neg;
        auto [a_draw, b_draw] = rng.derive(freq_key(key)).next_gauss2();

        double sigma = grf_mode_std(spec, freq);
        std::complex<double> z;
        if (self_conjugate)
            z = {n * sigma * a_draw, 0.0};
        else if (canonical)
            z = n * sigma * std::complex<double>(a_draw, b_draw) * M_SQRT1_2;
        else
            z = n * sigma * std::complex<double>(a_draw, -b_draw) * M_SQRT1_2;
        coeffs[flat] = z;
    }
    return fft::idft(coeffs);
}

Field sample_neumann(const GrfSpec& spec, const Shape& resolution, const RngStream& rng) {
    // cosine eigenbasis: u = sum_k sigma_k zeta_k prod_j c_{k_j} cos(pi k_j x_j)
    // with c_0 = 1 and c_k = sqrt(2) (L2-orthonormal on [0,1]^d)
    int d = spec.dim;
    Field coeffs(resolution);
    int64_t total = coeffs.size();
    Shape freq(static_cast<size_t>(d));
    for (int64_t flat = 0; flat < total; ++flat) {
        int64_t rem = flat;
        double basis_norm = 1.0;
        for (int a = d - 1; a >= 0; --a) {
            int64_t e = resolution[static_cast<size_t>(a)];
            int64_t k = rem % e;
            rem /= e;
            freq[static_cast<size_t>(a)] = k;
            if (k > 0) basis_norm *= M_SQRT2;
        }
        double zeta = rng.derive(freq_key(freq)).next_gauss();
        coeffs[flat] = grf_mode_std(spec, freq) * basis_norm * zeta;
    }
    return fft::cosine_series_eval(coeffs, d);
}

} // namespace

Field sample_grf(const GrfSpec& spec, const Shape& resolution, const RngStream& rng) {
    spec.validate();
    FNO_REQUIRE(static_cast<int>(resolution.size()) == spec.dim, DataError,
                "grf: resolution rank ", resolution.size(), " != spec dimension ", spec.dim);
    for (int64_t e : resolution) FNO_REQUIRE(e >= 2, DataError, "grf: resolution extents must be >= 2");

    Field f = (spec.boundary == GrfBoundary::periodic) ? sample_periodic(spec, resolution, rng)
                                                       : sample_neumann(spec, resolution, rng);
    apply_pushforward(spec, f);
    check_finite(f, "sample_grf");
    return f;
}

Field downsample(const Field& field, const std::vector<int64_t>& factors) {
    FNO_REQUIRE(factors.size() <= field.shape().size(), DataError,
                "downsample: more factors than axes");
    Shape out_shape = field.shape();
    for (size_t a = 0; a < factors.size(); ++a) {
        int64_t f = factors[a];
        int64_t s = field.extent(static_cast<int>(a));
        FNO_REQUIRE(f >= 1, DataError, "downsample: factor must be >= 1");
        if (f == 1) continue;
        FNO_REQUIRE(s % f == 0 || (s - 1) % f == 0, DataError, "downsample: factor ", f,
                    " divides neither extent ", s, " nor extent-1");
        out_shape[a] = (s % f == 0) ? s / f : (s - 1) / f + 1;
    }
    Field out(out_shape);
    int rank = field.rank();
    Shape idx(static_cast<size_t>(rank));
    for (int64_t flat = 0; flat < out.size(); ++flat) {
        int64_t rem = flat;
        for (int a = rank - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = rem % out_shape[static_cast<size_t>(a)];
            rem /= out_shape[static_cast<size_t>(a)];
        }
        for (size_t a = 0; a < factors.size(); ++a) idx[a] *= factors[a];
        out[flat] = field.at(idx);
    }
    return out;
}

} // namespace fno
