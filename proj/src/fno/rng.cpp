#include "fno/rng.hpp"

#include <cmath>

namespace fno {

std::pair<double, double> RngStream::next_gauss2() {
    double u1 = next_uniform_pos();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

} // namespace fno
