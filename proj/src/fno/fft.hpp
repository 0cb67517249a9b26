#pragma once

#include "fno/field.hpp"

namespace fno::fft {

/// Forward discrete transform over the leading `spatial_rank` axes, one
/// transform per trailing (channel/time) index. Unnormalized sum
/// F(k) = sum_x f(x) e^{-2 pi i <x,k>/s}; the last spatial axis keeps only
/// non-negative frequencies. Rejects non-finite input.
SpectralField dft(const Field& field, int spatial_rank);

/// Inverse transform carrying the 1/n factor, so idft(dft(f)) == f. Input must
/// be conjugate-consistent on the k_last = 0 (and Nyquist) planes; every
/// producer in this library guarantees that structurally.
Field idft(const SpectralField& spec);

/// Inverse without the 1/n factor (the raw conjugate-symmetric sum).
Field idft_unnormalized(const SpectralField& spec);

/// Adjoint of idft as a real-linear map from stored coefficients to grid
/// values: (w_k / n) * dft(cotangent), where w_k is 2 off the self-conjugate
/// last-axis planes and 1 on them.
SpectralField idft_adjoint(const Field& cotangent, int spatial_rank, int64_t last_logical_extent);

/// Adjoint of dft as a real-linear map from grid values to stored coefficients.
Field dft_adjoint(const SpectralField& cotangent);

/// Project the k_last = 0 / Nyquist planes onto their conjugate-symmetric part
/// (pairs (k, -k) within the plane averaged, self-paired entries realified).
/// Equivalent to taking the real part of the reconstructed field; a no-op on
/// already consistent spectra.
void symmetrize_planes(SpectralField& spec);

/// Evaluate the cosine series u_j = sum_k a_k prod_l cos(pi j_l k_l / (s_l-1))
/// on the endpoint-inclusive grid, batched over trailing axes (DCT-I based).
/// Every spatial extent must be >= 2.
Field cosine_series_eval(const Field& coeffs, int spatial_rank);

/// True if the stored last-axis index sits on a self-conjugate plane
/// (frequency 0, or Nyquist when the logical extent is even).
inline bool on_self_conjugate_plane(int64_t last_index, int64_t last_logical_extent) {
    if (last_index == 0) return true;
    return last_logical_extent % 2 == 0 && last_index == last_logical_extent / 2;
}

} // namespace fno::fft
