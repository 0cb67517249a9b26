#pragma once

#include <complex>
#include <cstring>

#include "fno/field.hpp"
#include "fno/modes.hpp"

namespace fno::detail {

/// Flat offsets (in stored spatial units) of every retained-block entry inside
/// a spectrum at the mode set's resolution.
std::vector<int64_t> block_offsets(const ModeSet& modes);

inline void gather_block(const SpectralField& spec, const std::vector<int64_t>& offsets,
                         int64_t dv, std::complex<double>* block) {
    const std::complex<double>* src = spec.data();
    for (size_t m = 0; m < offsets.size(); ++m)
        std::memcpy(block + m * static_cast<size_t>(dv), src + offsets[m] * dv,
                    static_cast<size_t>(dv) * sizeof(std::complex<double>));
}

inline void scatter_block(const std::complex<double>* block, const std::vector<int64_t>& offsets,
                          int64_t dv, SpectralField& spec) {
    std::complex<double>* dst = spec.data();
    for (size_t m = 0; m < offsets.size(); ++m)
        std::memcpy(dst + offsets[m] * dv, block + m * static_cast<size_t>(dv),
                    static_cast<size_t>(dv) * sizeof(std::complex<double>));
}

/// out[m,l] = sum_j R[m,l,j] in[m,j] with R stored as interleaved (re, im).
inline void mode_multiply(const double* r, const std::complex<double>* in, int64_t modes,
                          int64_t dv, std::complex<double>* out) {
    for (int64_t m = 0; m < modes; ++m) {
        const double* rm = r + m * dv * dv * 2;
        const std::complex<double>* tin = in + m * dv;
        std::complex<double>* tout = out + m * dv;
        for (int64_t l = 0; l < dv; ++l) {
            double acc_re = 0.0, acc_im = 0.0;
            const double* row = rm + l * dv * 2;
            for (int64_t j = 0; j < dv; ++j) {
                double rr = row[j * 2], ri = row[j * 2 + 1];
                double tr = tin[j].real(), ti = tin[j].imag();
                acc_re += rr * tr - ri * ti;
                acc_im += rr * ti + ri * tr;
            }
            tout[l] = {acc_re, acc_im};
        }
    }
}

/// Adjoints of mode_multiply under the real inner product:
/// dR[m,l,j] += G[m,l] conj(T[m,j]) and dT[m,j] = sum_l conj(R[m,l,j]) G[m,l].
inline void mode_multiply_adjoint(const double* r, const std::complex<double>* g,
                                  const std::complex<double>* t, int64_t modes, int64_t dv,
                                  double* dr, std::complex<double>* dt) {
    for (int64_t m = 0; m < modes; ++m) {
        const double* rm = r + m * dv * dv * 2;
        double* drm = dr + m * dv * dv * 2;
        const std::complex<double>* gm = g + m * dv;
        const std::complex<double>* tm = t + m * dv;
        std::complex<double>* dtm = dt + m * dv;
        for (int64_t j = 0; j < dv; ++j) dtm[j] = {0.0, 0.0};
        for (int64_t l = 0; l < dv; ++l) {
            double g_re = gm[l].real(), g_im = gm[l].imag();
            const double* row = rm + l * dv * 2;
            double* drow = drm + l * dv * 2;
            for (int64_t j = 0; j < dv; ++j) {
                double t_re = tm[j].real(), t_im = tm[j].imag();
                drow[j * 2] += g_re * t_re + g_im * t_im;
                drow[j * 2 + 1] += g_im * t_re - g_re * t_im;
                double r_re = row[j * 2], r_im = row[j * 2 + 1];
                dtm[j] += std::complex<double>(r_re * g_re + r_im * g_im,
                                               r_re * g_im - r_im * g_re);
            }
        }
    }
}

} // namespace fno::detail
