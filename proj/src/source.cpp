#include "bellsim/source.hpp"

#include <stdexcept>

namespace bellsim {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SourceConfig::validate() const {
    if (!(finite(omega0) && omega0 > 0.0))
        throw std::invalid_argument("omega0 must be positive");
    if (!(finite(sigma_omega) && sigma_omega >= 0.0))
        throw std::invalid_argument("sigma_omega must be >= 0");
    if (!(finite(amplitude_scale) && amplitude_scale > 0.0))
        throw std::invalid_argument("amplitude_scale must be positive");
    if (!(finite(tap_reflectance) && tap_reflectance > 0.0 && tap_reflectance < 1.0))
        throw std::invalid_argument("tap_reflectance in (0,1)");
    if (!(finite(pd_threshold) && pd_threshold >= 0.0))
        throw std::invalid_argument("pd_threshold must be >= 0");
    if (!(finite(pd_efficiency) && pd_efficiency >= 0.0 && pd_efficiency <= 1.0))
        throw std::invalid_argument("pd_efficiency in [0,1]");
}

PairEvent generate_pair(const SourceConfig& cfg, RandomStream& rng) {
    PairEvent pair;

    switch (cfg.alpha_mode) {
        case AlphaMode::Binary:
            pair.alpha = PhaseAngle(rng.coin() ? kPi : 0.0);
            break;
        case AlphaMode::Uniform:
            pair.alpha = PhaseAngle(rng.uniform01() * kTwoPi);
            break;
        case AlphaMode::Fixed:
            pair.alpha = cfg.alpha_fixed;
            break;
    }

    do {
        pair.omega = cfg.omega0 + cfg.sigma_omega * rng.normal01();
    } while (pair.omega <= 0.0);

    const double amp = cfg.amplitude_mode == AmplitudeMode::Rayleigh
                           ? rng.rayleigh(cfg.amplitude_scale)
                           : cfg.amplitude_scale;
    pair.amp_a = FieldAmplitude(amp);
    pair.amp_b = pair.amp_a;  // one draw, both arms equal
    return pair;
}

TapResult tap_split(FieldAmplitude amp, double tap_reflectance) {
    if (!(std::isfinite(tap_reflectance) && tap_reflectance > 0.0 && tap_reflectance < 1.0))
        throw std::invalid_argument("tap_reflectance in (0,1)");
    const double a = amp.value();
    return {tap_reflectance * a * a, FieldAmplitude(a * std::sqrt(1.0 - tap_reflectance))};
}

bool event_ready(double tapped_intensity, const SourceConfig& cfg, RandomStream& rng) {
    const bool detected = rng.bernoulli(cfg.pd_efficiency);
    return tapped_intensity >= cfg.pd_threshold && detected;
}

}  // namespace bellsim
