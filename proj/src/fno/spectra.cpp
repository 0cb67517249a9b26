#include "fno/spectra.hpp"

#include <cmath>

#include "fno/fft.hpp"
#include "fno/modes.hpp"

namespace fno {

std::vector<SpectrumBin> energy_spectrum(const Field& w, SpectrumBinning binning) {
    FNO_REQUIRE(w.rank() == 2, DataError, "energy_spectrum: expected a 2-d field, got ",
                shape_str(w.shape()));
    const int64_t s1 = w.extent(0), s2 = w.extent(1);
    const double inv_n2 = 1.0 / (static_cast<double>(s1 * s2) * static_cast<double>(s1 * s2));
    SpectralField spec = fft::dft(w, 2);
    const int64_t half = spec.extent(1);

    int64_t max_bin = 0;
    std::vector<double> acc;
    auto deposit = [&](int64_t bin, double e) {
        if (bin >= static_cast<int64_t>(acc.size())) acc.resize(static_cast<size_t>(bin + 1), 0.0);
        acc[static_cast<size_t>(bin)] += e;
        max_bin = std::max(max_bin, bin);
    };

    for (int64_t i = 0; i < s1; ++i) {
        int64_t k1 = signed_frequency(i, s1);
        for (int64_t j = 0; j < half; ++j) {
            int64_t k2 = j;
            double weight = fft::on_self_conjugate_plane(j, s2) ? 1.0 : 2.0;
            double e = weight * std::norm(spec.at({i, j})) * inv_n2;
            int64_t bin;
            if (binning == SpectrumBinning::l1)
                bin = std::llabs(k1) + std::llabs(k2);
            else
                bin = static_cast<int64_t>(std::llround(
                    std::sqrt(static_cast<double>(k1 * k1 + k2 * k2))));
            deposit(bin, e);
        }
    }

    std::vector<SpectrumBin> out;
    out.reserve(acc.size());
    for (int64_t b = 0; b <= max_bin; ++b) out.push_back({b, acc[static_cast<size_t>(b)]});
    return out;
}

double truncation_error(const Field& w, int64_t kmax) {
    FNO_REQUIRE(kmax >= 0, DataError, "truncation_error: kmax must be >= 0");
    double norm = w.l2_norm();
    if (norm == 0.0) return 0.0;
    Shape cutoffs(w.shape().size(), kmax);
    Field lp = lowpass(w, w.rank(), cutoffs);
    double err = 0.0;
    for (int64_t i = 0; i < w.size(); ++i) {
        double d = w[i] - lp[i];
        err += d * d;
    }
    return std::sqrt(err) / norm;
}

double spectrum_slope(const std::vector<SpectrumBin>& bins, int64_t k_lo, int64_t k_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int64_t count = 0;
    for (const auto& b : bins) {
        if (b.wavenumber < k_lo || b.wavenumber > k_hi || b.energy <= 0.0) continue;
        double x = std::log(static_cast<double>(b.wavenumber));
        double y = std::log(b.energy);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    FNO_REQUIRE(count >= 2, DataError, "spectrum_slope: fewer than two non-empty bins in range");
    double denom = count * sxx - sx * sx;
    return (count * sxy - sx * sy) / denom;
}

} // namespace fno
