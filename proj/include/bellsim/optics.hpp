#pragma once

#include "bellsim/angles.hpp"

namespace bellsim {

/// Intensities leaving the two ports of the lossless 50-50 homodyne beamsplitter.
struct PortIntensities {
    double reflected = 0.0;
    double transmitted = 0.0;

    bool operator==(const PortIntensities&) const = default;
};

/// Port intensities for a test beam of amplitude E mixed with a local
/// oscillator E_L at phase difference theta:
///   reflected   = (E^2 + E_L^2 + 2 E E_L sin theta) / 2
///   transmitted = (E^2 + E_L^2 - 2 E E_L sin theta) / 2
/// The two always sum to E^2 + E_L^2 (lossless splitter).
PortIntensities output_intensities(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta);

/// Difference of the two port intensities, 2 E E_L sin theta.
double homodyne_difference(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta);

/// Independent check of homodyne_difference that never touches complex
/// exponentials: samples the two real output waves at n_samples equally
/// spaced points of one optical period and returns twice the difference of
/// their mean square intensities. n_samples must be a multiple of 4 and at
/// least 8, which keeps the discrete period average alias-free.
double real_wave_oracle(FieldAmplitude e, FieldAmplitude e_lo, PhaseAngle theta, int n_samples);

}  // namespace bellsim
