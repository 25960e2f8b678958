#pragma once

#include <cstdint>
#include <vector>

#include "bellsim/detector.hpp"
#include "bellsim/source.hpp"

namespace bellsim {

struct ChannelSetting {
    PhaseAngle theta_set;            // applied LO phase shift
    double path_delay = 0.0;         // time units; phase accrues as omega * path_delay
    FieldAmplitude lo_amplitude{1.0};
    double drift_rate = 0.0;         // slow additive path-delay drift per trial index

    void validate() const;
    bool operator==(const ChannelSetting&) const = default;
};

enum class SelectionMode { RandomPerTrial, FixedPair };

struct SettingsSchedule {
    ChannelSetting a, a_prime, b, b_prime;
    SelectionMode selection = SelectionMode::RandomPerTrial;
    int fixed_a = 0;  // FixedPair mode only
    int fixed_b = 0;

    const ChannelSetting& side_a(int index) const { return index == 0 ? a : a_prime; }
    const ChannelSetting& side_b(int index) const { return index == 0 ? b : b_prime; }
    void validate() const;
    bool operator==(const SettingsSchedule&) const = default;
};

struct ExperimentConfig {
    SourceConfig source;
    DetectorConfig detector_a;
    DetectorConfig detector_b;
    SettingsSchedule settings;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

struct TrialRecord {
    std::int64_t trial_id = 0;
    int setting_a_index = 0;
    int setting_b_index = 0;
    bool ready_a = false;
    bool ready_b = false;
    HomodyneReading reading_a, reading_b;
    Outcome outcome_a = Outcome::None;
    Outcome outcome_b = Outcome::None;
    // Diagnostics only; the statistics estimators never read these.
    PhaseAngle alpha;
    double omega = 0.0;

    bool operator==(const TrialRecord&) const = default;
};

struct TrialSet {
    std::vector<TrialRecord> records;
    ExperimentConfig config;
    std::int64_t n_trials = 0;
    std::uint64_t seed = 0;
};

/// The phase fed to the beamsplitter: reduce(theta_set + omega*path_delay - alpha).
PhaseAngle effective_phase(const ChannelSetting& setting, const PairEvent& pair);

/// One trial. Streams are derived from (master_seed, trial_id, role); the
/// pipeline is generate_pair, then per arm: tap_split, event_ready,
/// effective_phase, output_intensities, read_homodyne, digitize (or
/// discriminate when the arm's threshold is set). Arm A runs before arm B but
/// draws from its own stream, so neither arm's randomness depends on the other.
TrialRecord run_trial(const ExperimentConfig& cfg, std::int64_t trial_id, int setting_a_index,
                      int setting_b_index, std::uint64_t master_seed);

/// n_trials independent trials. Deterministic given (cfg, n_trials, seed)
/// and independent of n_threads; trials are written by index.
TrialSet run_experiment(const ExperimentConfig& cfg, std::int64_t n_trials, std::uint64_t seed,
                        int n_threads = 1);

enum class Channel { A, B };

struct ScanPoint {
    double theta = 0.0;  // the swept (unreduced) LO phase
    double v_diff = 0.0;
    PhaseAngle alpha;    // diagnostic
};

/// LO phase of one channel swept linearly from start to end over n_steps,
/// one fresh pulse pair per step (the hidden phase re-randomizes per pulse).
std::vector<ScanPoint> scan_phase(const ExperimentConfig& cfg, Channel channel, double start,
                                  double end, int n_steps, std::uint64_t seed);

/// Difference voltages of one channel with the LO phase drawn uniformly on
/// (-pi, pi) per trial; the raw material of the voltage-difference histogram.
std::vector<double> sample_uniform_phase_diffs(const ExperimentConfig& cfg, Channel channel,
                                               std::int64_t n_trials, std::uint64_t seed);

}  // namespace bellsim
