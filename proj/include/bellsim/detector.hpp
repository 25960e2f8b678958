#pragma once

#include <optional>

#include "bellsim/optics.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

struct DetectorConfig {
    double gain = 1.0;         // volts per intensity unit
    double noise_sigma = 0.0;  // additive Gaussian per photodiode, volts
    std::optional<double> discriminator_threshold;  // volts; unset = digitize mode
    bool subtract_pedestal = false;  // reserved; discriminators act on raw voltages

    void validate() const;
    bool operator==(const DetectorConfig&) const = default;
};

struct HomodyneReading {
    double v_reflected = 0.0;
    double v_transmitted = 0.0;
    double v_diff = 0.0;  // always v_reflected - v_transmitted

    bool operator==(const HomodyneReading&) const = default;
};

enum class Outcome { Plus, Minus, None };

constexpr int outcome_value(Outcome o) {
    return o == Outcome::Plus ? 1 : o == Outcome::Minus ? -1 : 0;
}

/// Photodiode voltages: gain * intensity plus independent Gaussian noise per
/// diode. Two normals are always consumed, reflected first.
HomodyneReading read_homodyne(const PortIntensities& ports, const DetectorConfig& cfg,
                              RandomStream& rng);

/// Sign of the difference voltage. An exact zero falls back to a fair coin
/// (the noiseless analytic edge case at integral multiples of pi).
Outcome digitize(double v_diff, RandomStream& rng);

/// Threshold discriminators on the two raw voltages: Plus if only the
/// reflected port fires, Minus if only the transmitted port fires, None when
/// neither fires or both fire (ambiguous event, discarded).
Outcome discriminate(const HomodyneReading& reading, const DetectorConfig& cfg);

}  // namespace bellsim
