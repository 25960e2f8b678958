#pragma once

#include "bellsim/angles.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

enum class AlphaMode { Binary, Uniform, Fixed };
enum class AmplitudeMode { Rayleigh, Fixed };

struct SourceConfig {
    double omega0 = 1.0;           // centre angular frequency (normalized units)
    double sigma_omega = 0.0;      // frequency jitter std dev, shared by the pair
    double amplitude_scale = 1.0;  // Rayleigh scale, or the exact amplitude in Fixed mode
    AmplitudeMode amplitude_mode = AmplitudeMode::Rayleigh;
    AlphaMode alpha_mode = AlphaMode::Binary;
    PhaseAngle alpha_fixed{};      // used only by AlphaMode::Fixed
    double tap_reflectance = 0.1;  // unbalanced tap toward the event-ready PD
    double pd_threshold = 0.0;     // minimum tapped intensity for detection
    double pd_efficiency = 1.0;

    void validate() const;
    bool operator==(const SourceConfig&) const = default;
};

/// One OPA emission. Both arms carry the same hidden phase and frequency.
struct PairEvent {
    PhaseAngle alpha;
    double omega = 0.0;
    FieldAmplitude amp_a;
    FieldAmplitude amp_b;
};

struct TapResult {
    double tapped_intensity = 0.0;
    FieldAmplitude main_amplitude;
};

/// Draw order within the source stream is fixed: alpha, omega, amplitude.
/// Binary alpha consumes one coin, Uniform one uniform, Fixed none. omega
/// consumes one normal per attempt (resampled only while non-positive). The
/// amplitude consumes one draw in Rayleigh mode, none in Fixed mode.
PairEvent generate_pair(const SourceConfig& cfg, RandomStream& rng);

/// Split at an unbalanced tap with intensity reflectance r in (0, 1):
/// intensity r*amp^2 goes to the event-ready PD, amplitude amp*sqrt(1-r)
/// carries on to the homodyne detector.
TapResult tap_split(FieldAmplitude amp, double tap_reflectance);

/// True iff the tapped intensity reaches pd_threshold and an independent
/// Bernoulli(pd_efficiency) draw succeeds. The Bernoulli is consumed
/// unconditionally so the stream layout does not depend on the comparison.
bool event_ready(double tapped_intensity, const SourceConfig& cfg, RandomStream& rng);

}  // namespace bellsim
