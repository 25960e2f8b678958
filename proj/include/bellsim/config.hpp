#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellsim/stats.hpp"

namespace bellsim {

/// Configuration grammar: flat sectioned key-value text.
///
///   # comment to end of line
///   [section]
///   key = value
///
/// Sections and keys are fixed; unknown or duplicate keys are rejected with
/// line context. emit_config() writes the canonical form (every section,
/// every key, full precision); parse(emit(cfg)) == cfg. The seed is
/// mandatory, as are the four setting phases a_theta, a_prime_theta,
/// b_theta, b_prime_theta. Everything else has documented defaults.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepParameter { DiscriminatorThreshold, NoiseSigma, SigmaOmega, PathDelay };

struct ScanSection {
    Channel channel = Channel::A;
    double start = -kPi;
    double end = kPi;
    int steps = 1000;
    bool operator==(const ScanSection&) const = default;
};

struct SweepSection {
    SweepParameter parameter = SweepParameter::DiscriminatorThreshold;
    std::vector<double> grid;
    bool operator==(const SweepSection&) const = default;
};

struct CurvesSection {
    std::optional<double> theta_a;  // unset: use the schedule's a_theta
    double grid_start = -2.9452431127404804;  // 15/16 of pi on either side
    double grid_end = 2.9452431127404804;
    int grid_steps = 16;
    bool operator==(const CurvesSection&) const = default;
};

struct HistSection {
    int bins = 61;
    bool operator==(const HistSection&) const = default;
};

struct RunConfig {
    ExperimentConfig experiment;
    std::int64_t n_trials = 10000;
    std::uint64_t seed = 0;  // mandatory in config text; no wall-clock default
    int n_threads = 1;
    ChshSubtract chsh_subtract = ChshSubtract::ABprime;
    std::string out_dir = "out";
    ScanSection scan;
    SweepSection sweep;
    CurvesSection curves;
    HistSection hist;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string emit_config(const RunConfig& cfg);

}  // namespace bellsim
