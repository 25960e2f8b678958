#pragma once

#include <cmath>
#include <stdexcept>

namespace bellsim {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Angle in radians, stored reduced to (-pi, pi].
class PhaseAngle {
public:
    constexpr PhaseAngle() = default;

    explicit PhaseAngle(double radians) {
        if (!std::isfinite(radians))
            throw std::invalid_argument("PhaseAngle: radians must be finite");
        radians_ = reduce(radians);
    }

    double radians() const { return radians_; }

    /// Reduce x to (-pi, pi].
    static double reduce(double x) {
        double r = std::remainder(x, kTwoPi);  // lands in [-pi, pi]
        if (r <= -kPi) r += kTwoPi;            // fold the -pi boundary onto +pi
        return r == 0.0 ? 0.0 : r;             // canonicalize -0
    }

    bool operator==(const PhaseAngle&) const = default;

private:
    double radians_ = 0.0;
};

/// Non-negative classical field amplitude (the E and E_L of the homodyne formulas).
class FieldAmplitude {
public:
    constexpr FieldAmplitude() = default;

    explicit FieldAmplitude(double value) : value_(value) {
        if (!(std::isfinite(value) && value >= 0.0))
            throw std::invalid_argument("FieldAmplitude: value must be finite and >= 0");
    }

    double value() const { return value_; }

    bool operator==(const FieldAmplitude&) const = default;

private:
    double value_ = 0.0;
};

}  // namespace bellsim
