#pragma once

#include <cmath>
#include <cstdint>

namespace bellsim {

/// Inverse of the standard normal CDF for p in (0, 1).
/// Wichura's AS241 rational approximations, good to ~1e-16.
double inverse_normal_cdf(double p);

/// SplitMix64 output mix (Vigna, public domain).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// One private draw sequence. Every trial derives its own streams from
/// (master seed, trial index, role), so a trial can be replayed in isolation
/// and trials can run in parallel with results identical to sequential runs.
///
/// Each sampling helper consumes a fixed number of engine outputs (one u64
/// each, stated per method), which pins the in-stream draw order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53-bit resolution. One u64.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1); safe for inverse CDFs and logs. One u64.
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Standard normal via the inverse CDF. Exactly one u64.
    double normal01() { return inverse_normal_cdf(uniform_open01()); }

    double normal(double mu, double sigma) { return mu + sigma * normal01(); }

    /// Rayleigh with the given scale. Exactly one u64.
    double rayleigh(double scale) {
        return scale * std::sqrt(-2.0 * std::log(uniform_open01()));
    }

    /// Bernoulli(p); p = 1 always succeeds, p = 0 never. One u64.
    bool bernoulli(double p) { return uniform01() < p; }

    /// Fair coin. One u64.
    bool coin() { return (next_u64() >> 63) != 0; }

    /// Uniform index in {0, 1}. One u64.
    int pick2() { return static_cast<int>(next_u64() >> 63); }

private:
    std::uint64_t state_;
};

enum class StreamRole : std::uint64_t {
    Settings = 1,  // per-trial setting-index choices
    Source = 2,    // pair generation: alpha, omega, amplitude (in that order)
    ArmA = 3,      // arm A: PD Bernoulli, noise (reflected), noise (transmitted), tie coin
    ArmB = 4,      // arm B: same order as arm A
};

/// Stream derivation rule (also documented in the README):
///   h      = mix64(master_seed + 0x9E3779B97F4A7C15 * role)
///   state0 = mix64(h ^ (trial_index + 0x632BE59BD9B4E019))
/// The stream then advances state by the same odd gamma and emits mix64(state).
inline RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                                  StreamRole role) {
    std::uint64_t h = mix64(master_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(role));
    return RandomStream(mix64(h ^ (trial_index + 0x632BE59BD9B4E019ull)));
}

}  // namespace bellsim
