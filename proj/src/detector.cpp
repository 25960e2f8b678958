#include "bellsim/detector.hpp"

#include <stdexcept>

namespace bellsim {

void DetectorConfig::validate() const {
    if (!(std::isfinite(gain) && gain > 0.0))
        throw std::invalid_argument("gain must be positive");
    if (!(std::isfinite(noise_sigma) && noise_sigma >= 0.0))
        throw std::invalid_argument("noise_sigma must be >= 0");
    if (discriminator_threshold &&
        !(std::isfinite(*discriminator_threshold) && *discriminator_threshold >= 0.0))
        throw std::invalid_argument("discriminator_threshold must be >= 0");
}

HomodyneReading read_homodyne(const PortIntensities& ports, const DetectorConfig& cfg,
                              RandomStream& rng) {
    HomodyneReading r;
    r.v_reflected = cfg.gain * ports.reflected + cfg.noise_sigma * rng.normal01();
    r.v_transmitted = cfg.gain * ports.transmitted + cfg.noise_sigma * rng.normal01();
    r.v_diff = r.v_reflected - r.v_transmitted;
    return r;
}

Outcome digitize(double v_diff, RandomStream& rng) {
    if (v_diff > 0.0) return Outcome::Plus;
    if (v_diff < 0.0) return Outcome::Minus;
    return rng.coin() ? Outcome::Plus : Outcome::Minus;
}

Outcome discriminate(const HomodyneReading& reading, const DetectorConfig& cfg) {
    if (!cfg.discriminator_threshold)
        throw std::logic_error("discriminate: no discriminator_threshold configured");
    const double t = *cfg.discriminator_threshold;
    const bool fired_r = reading.v_reflected >= t;
    const bool fired_t = reading.v_transmitted >= t;
    if (fired_r && !fired_t) return Outcome::Plus;
    if (fired_t && !fired_r) return Outcome::Minus;
    return Outcome::None;
}

}  // namespace bellsim
