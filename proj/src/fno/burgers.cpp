#include "fno/burgers.hpp"

#include <cmath>

#include "fno/fft.hpp"
#include "fno/modes.hpp"

namespace fno {

Field solve_burgers(const BurgersProblem& p) {
    FNO_REQUIRE(p.u0.rank() == 1, DataError, "burgers: u0 must be 1-d, got ",
                shape_str(p.u0.shape()));
    FNO_REQUIRE(p.nu > 0.0, DataError, "burgers: viscosity must be positive");
    FNO_REQUIRE(p.dt_max > 0.0 && p.cfl > 0.0 && p.t_final >= 0.0, DataError,
                "burgers: dt_max, cfl and t_final must be positive");
    check_finite(p.u0, "burgers u0");

    const int64_t s = p.u0.extent(0);
    const int64_t half = s / 2 + 1;
    const double dx = 1.0 / static_cast<double>(s);
    // 3/2-rule padded grid for the quadratic term
    const int64_t padded = ((3 * s + 1) / 2 + 1) & ~int64_t{1};
    const Shape pad_res{padded};
    const double spectrum_rescale = static_cast<double>(s) / static_cast<double>(padded);
    const double initial_amp = std::max(p.u0.max_abs(), 1e-300);

    SpectralField u_hat = fft::dft(p.u0, 1);

    std::vector<double> diffusion(static_cast<size_t>(half));
    double diffusion_dt = -1.0;

    double t = 0.0;
    int64_t step = 0;
    while (t < p.t_final) {
        Field u_pad = fft::idft(embed(u_hat, pad_res));
        double max_u = u_pad.max_abs();
        if (!std::isfinite(max_u) || max_u > p.blowup_factor * initial_amp)
            throw NumericError(concat("burgers: blow-up at step ", step, ", t = ", t,
                                      ", max|u| = ", max_u));

        double dt = p.dt_max;
        if (max_u > 0.0) dt = std::min(dt, p.cfl * dx / max_u);
        dt = std::min(dt, p.t_final - t);

        for (int64_t i = 0; i < padded; ++i) u_pad[i] *= u_pad[i];
        SpectralField sq_hat = fft::dft(u_pad, 1);

        if (dt != diffusion_dt) {
            for (int64_t k = 0; k < half; ++k) {
                double omega = 2.0 * M_PI * static_cast<double>(k);
                diffusion[static_cast<size_t>(k)] = std::exp(-p.nu * omega * omega * dt);
            }
            diffusion_dt = dt;
        }

        // u_hat <- e^{-nu (2 pi k)^2 dt} (u_hat - dt * pi i k * F[u^2])
        for (int64_t k = 0; k < half; ++k) {
            std::complex<double> nonlinear{0.0, 0.0};
            bool nyquist = (s % 2 == 0) && (k == s / 2);
            if (k > 0 && !nyquist)
                nonlinear = std::complex<double>(0.0, M_PI * static_cast<double>(k)) *
                            (spectrum_rescale * sq_hat[k]);
            u_hat[k] = diffusion[static_cast<size_t>(k)] * (u_hat[k] - dt * nonlinear);
        }

        t += dt;
        ++step;
    }

    Field u = fft::idft(u_hat);
    check_finite(u, "burgers solution");
    return u;
}

} // namespace fno
