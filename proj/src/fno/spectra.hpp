#pragma once

#include "fno/field.hpp"

namespace fno {

enum class SpectrumBinning { l1, euclidean };

struct SpectrumBin {
    int64_t wavenumber;
    double energy;
};

/// Binned energy spectrum of a 2-d field. Default binning follows the paper's
/// convention |k| = |k1| + |k2|; euclidean rounds sqrt(k1^2 + k2^2) to the
/// nearest integer. Energies are |F w(k)|^2 / n^2 summed over the full
/// symmetric spectrum, so the bins add up to the mean-square of w.
std::vector<SpectrumBin> energy_spectrum(const Field& w,
                                         SpectrumBinning binning = SpectrumBinning::l1);

/// Relative L2 error committed by truncating every axis at kmax:
/// ||w - lowpass(w)|| / ||w||. Defined as 0 for the zero field.
double truncation_error(const Field& w, int64_t kmax);

/// Least-squares slope of log(energy) vs log(wavenumber) over bins in
/// [k_lo, k_hi]; empty bins are skipped.
double spectrum_slope(const std::vector<SpectrumBin>& bins, int64_t k_lo, int64_t k_hi);

} // namespace fno
