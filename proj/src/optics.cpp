#include "bellsim/optics.hpp"

#include <stdexcept>

namespace bellsim {

PortIntensities output_intensities(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta) {
    const double sum_sq = e.value() * e.value() + e_lo.value() * e_lo.value();
    const double cross = 2.0 * e.value() * e_lo.value() * std::sin(theta.radians());
    PortIntensities out{0.5 * (sum_sq + cross), 0.5 * (sum_sq - cross)};
    // sum_sq >= |cross| holds exactly in reals; guard the last-ulp rounding case.
    if (out.reflected < 0.0) out.reflected = 0.0;
    if (out.transmitted < 0.0) out.transmitted = 0.0;
    return out;
}

double homodyne_difference(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta) {
    return 2.0 * e.value() * e_lo.value() * std::sin(theta.radians());
}

double real_wave_oracle(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta, int n_samples) {
    if (n_samples < 8 || n_samples % 4 != 0)
        throw std::invalid_argument(
            "real_wave_oracle: n_samples must be a multiple of 4 and >= 8");

    const double amp = e.value();
    const double lo = e_lo.value();
    const double th = theta.radians();
    const double inv_sqrt2 = 0.70710678118654752440;

    // E_r(phi) = (-E sin phi + E_L cos(phi + theta)) / sqrt(2)
    // E_t(phi) = ( E cos phi - E_L sin(phi + theta)) / sqrt(2)
    double acc = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double phi = kTwoPi * j / n_samples;
        const double er = inv_sqrt2 * (-amp * std::sin(phi) + lo * std::cos(phi + th));
        const double et = inv_sqrt2 * (amp * std::cos(phi) - lo * std::sin(phi + th));
        acc += er * er - et * et;
    }
    return 2.0 * acc / n_samples;
}

}  // namespace bellsim
