#include "fno/navier_stokes.hpp"

#include <cmath>

#include "fno/fft.hpp"

namespace fno {

namespace {

struct SpectralGeometry {
    int64_t s, half;
    std::vector<double> dk1, dk2;    // differentiation wavenumbers
    std::vector<double> lambda;      // 4 pi^2 |k|^2
    std::vector<bool> keep;          // 2/3-rule mask
    std::vector<bool> nyquist;       // any Nyquist component: excluded from advection

    explicit SpectralGeometry(int64_t s_in) : s(s_in), half(s_in / 2 + 1) {
        int64_t total = s * half;
        dk1.resize(static_cast<size_t>(total));
        dk2.resize(static_cast<size_t>(total));
        lambda.resize(static_cast<size_t>(total));
        keep.resize(static_cast<size_t>(total));
        nyquist.resize(static_cast<size_t>(total));
        int64_t cutoff = s / 3;
        bool even = s % 2 == 0;
        for (int64_t i = 0; i < s; ++i) {
            int64_t kx = signed_frequency(i, s);
            for (int64_t j = 0; j < half; ++j) {
                size_t idx = static_cast<size_t>(i * half + j);
                double k1 = static_cast<double>(kx);
                double k2 = static_cast<double>(j);
                lambda[idx] = 4.0 * M_PI * M_PI * (k1 * k1 + k2 * k2);
                dk1[idx] = k1;
                dk2[idx] = k2;
                nyquist[idx] = even && (std::llabs(kx) == s / 2 || j == s / 2);
                keep[idx] = std::llabs(kx) <= cutoff && j <= cutoff;
            }
        }
    }

    void mask(SpectralField& f) const {
        for (int64_t i = 0; i < f.size(); ++i)
            if (!keep[static_cast<size_t>(i)]) f[i] = {0.0, 0.0};
    }
};

// (u1, u2, dw/dx1, dw/dx2) packed as four channels of one spectral field
SpectralField advection_terms(const SpectralField& w_hat, const SpectralGeometry& g) {
    SpectralField packed(Shape{g.s, g.half, 4}, 2, g.s);
    const std::complex<double> two_pi_i{0.0, 2.0 * M_PI};
    for (int64_t m = 0; m < g.s * g.half; ++m) {
        size_t idx = static_cast<size_t>(m);
        if (g.nyquist[idx]) continue; // spectral-derivative convention
        std::complex<double> w = w_hat[m];
        std::complex<double> psi =
            g.lambda[idx] > 0.0 ? w / g.lambda[idx] : std::complex<double>{0.0, 0.0};
        packed[m * 4 + 0] = two_pi_i * g.dk2[idx] * psi;    // u1 = d(psi)/dx2
        packed[m * 4 + 1] = -two_pi_i * g.dk1[idx] * psi;   // u2 = -d(psi)/dx1
        packed[m * 4 + 2] = two_pi_i * g.dk1[idx] * w;
        packed[m * 4 + 3] = two_pi_i * g.dk2[idx] * w;
    }
    return packed;
}

} // namespace

Field NsTrajectory::frame(int64_t index) const {
    int64_t s1 = snapshots.extent(0), s2 = snapshots.extent(1), nt = snapshots.extent(2);
    FNO_REQUIRE(index >= 0 && index < nt, DataError, "trajectory frame ", index, " out of range");
    Field f(Shape{s1, s2});
    for (int64_t i = 0; i < s1 * s2; ++i) f[i] = snapshots[i * nt + index];
    return f;
}

Field ns_standard_forcing(int64_t s) {
    Field f(Shape{s, s});
    for (int64_t i = 0; i < s; ++i)
        for (int64_t j = 0; j < s; ++j) {
            double phase = 2.0 * M_PI * static_cast<double>(i + j) / static_cast<double>(s);
            f.at({i, j}) = 0.1 * (std::sin(phase) + std::cos(phase));
        }
    return f;
}

Field ns_velocity(const Field& w) {
    FNO_REQUIRE(w.rank() == 2 && w.extent(0) == w.extent(1), DataError,
                "ns_velocity: vorticity must be square 2-d");
    SpectralGeometry g(w.extent(0));
    SpectralField packed = advection_terms(fft::dft(w, 2), g);
    Field all = fft::idft(packed);
    Field uv(Shape{g.s, g.s, 2});
    for (int64_t i = 0; i < g.s * g.s; ++i) {
        uv[i * 2 + 0] = all[i * 4 + 0];
        uv[i * 2 + 1] = all[i * 4 + 1];
    }
    return uv;
}

NsTrajectory solve_ns(const NsProblem& p) {
    FNO_REQUIRE(p.w0.rank() == 2 && p.w0.extent(0) == p.w0.extent(1), DataError,
                "ns: w0 must be square 2-d, got ", shape_str(p.w0.shape()));
    FNO_REQUIRE(p.nu > 0.0 && p.dt > 0.0 && p.t_final > 0.0, DataError,
                "ns: nu, dt and t_final must be positive");
    check_finite(p.w0, "ns w0");

    const int64_t s = p.w0.extent(0);
    SpectralGeometry g(s);
    const int64_t n = s * s;
    const double inv_n = 1.0 / static_cast<double>(n);

    int64_t total_steps = static_cast<int64_t>(std::llround(p.t_final / p.dt));
    FNO_REQUIRE(std::abs(total_steps * p.dt - p.t_final) < 1e-9 * p.t_final, DataError,
                "ns: t_final must be an integer number of steps");
    int64_t record_every = 0;
    if (p.record_interval > 0.0) {
        record_every = static_cast<int64_t>(std::llround(p.record_interval / p.dt));
        FNO_REQUIRE(record_every > 0 &&
                        std::abs(record_every * p.dt - p.record_interval) < 1e-9 * p.record_interval,
                    DataError, "ns: record_interval must be an integer number of steps");
    }
    int64_t n_rec = record_every > 0 ? total_steps / record_every : 1;

    SpectralField w_hat = fft::dft(p.w0, 2);
    g.mask(w_hat);
    SpectralField f_hat(Shape{s, g.half}, 2, s);
    if (!p.forcing.empty()) {
        FNO_REQUIRE(p.forcing.shape() == p.w0.shape(), DataError, "ns: forcing shape mismatch");
        f_hat = fft::dft(p.forcing, 2);
        g.mask(f_hat);
    }

    const double initial_amp = std::max(p.w0.max_abs(), 1e-3);
    NsTrajectory out;
    out.snapshots = Field(Shape{s, s, n_rec});
    out.times.reserve(static_cast<size_t>(n_rec));

    int64_t recorded = 0;
    for (int64_t step = 1; step <= total_steps; ++step) {
        SpectralField packed = advection_terms(w_hat, g);
        Field terms = fft::idft(packed);

        Field nonlinear(Shape{s, s});
        double max_u = 0.0;
        for (int64_t i = 0; i < n; ++i) {
            double u1 = terms[i * 4 + 0], u2 = terms[i * 4 + 1];
            nonlinear[i] = u1 * terms[i * 4 + 2] + u2 * terms[i * 4 + 3];
            max_u = std::max(max_u, std::max(std::abs(u1), std::abs(u2)));
        }
        if (!std::isfinite(max_u))
            throw NumericError(concat("ns: blow-up (velocity) at step ", step));
        double courant = p.dt * max_u * static_cast<double>(s);
        out.max_courant = std::max(out.max_courant, courant);
        if (courant > p.cfl_limit)
            throw NumericError(concat("ns: advective CFL ", courant, " exceeds limit ",
                                      p.cfl_limit, " at step ", step, "; reduce dt"));

        SpectralField n_hat = fft::dft(nonlinear, 2);
        for (int64_t m = 0; m < s * g.half; ++m) {
            size_t idx = static_cast<size_t>(m);
            if (!g.keep[idx]) {
                w_hat[m] = {0.0, 0.0};
                continue;
            }
            double impl = 0.5 * p.nu * p.dt * g.lambda[idx];
            w_hat[m] = ((1.0 - impl) * w_hat[m] - p.dt * n_hat[m] + p.dt * f_hat[m]) / (1.0 + impl);
        }

        if ((record_every > 0 && step % record_every == 0) ||
            (record_every == 0 && step == total_steps)) {
            Field w = fft::idft(w_hat);
            double amp = w.max_abs();
            if (!std::isfinite(amp) || amp > p.blowup_factor * initial_amp)
                throw NumericError(concat("ns: blow-up at step ", step, ", max|w| = ", amp));
            int64_t t_idx = recorded++;
            for (int64_t i = 0; i < n; ++i) out.snapshots[i * n_rec + t_idx] = w[i];
            out.times.push_back(static_cast<double>(step) * p.dt);
        }
        (void)inv_n;
    }
    out.steps = total_steps;
    return out;
}

} // namespace fno
