#include "bellsim/runner.hpp"

#include <stdexcept>
#include <thread>

namespace bellsim {

void ChannelSetting::validate() const {
    if (!(lo_amplitude.value() > 0.0))
        throw std::invalid_argument("lo_amplitude must be positive");
    if (!std::isfinite(path_delay))
        throw std::invalid_argument("path_delay must be finite");
    if (!std::isfinite(drift_rate))
        throw std::invalid_argument("drift_rate must be finite");
}

void SettingsSchedule::validate() const {
    a.validate();
    a_prime.validate();
    b.validate();
    b_prime.validate();
    if (fixed_a < 0 || fixed_a > 1 || fixed_b < 0 || fixed_b > 1)
        throw std::invalid_argument("fixed setting indices must be 0 or 1");
}

void ExperimentConfig::validate() const {
    source.validate();
    detector_a.validate();
    detector_b.validate();
    settings.validate();
}

PhaseAngle effective_phase(const ChannelSetting& setting, const PairEvent& pair) {
    return PhaseAngle(setting.theta_set.radians() + pair.omega * setting.path_delay -
                      pair.alpha.radians());
}

namespace {

ChannelSetting setting_at_trial(const ChannelSetting& s, std::int64_t trial_id) {
    if (s.drift_rate == 0.0) return s;
    ChannelSetting out = s;
    out.path_delay += s.drift_rate * static_cast<double>(trial_id);
    return out;
}

struct ArmResult {
    bool ready = false;
    HomodyneReading reading;
    Outcome outcome = Outcome::None;
};

ArmResult run_arm(const SourceConfig& src, const DetectorConfig& det,
                  const ChannelSetting& setting, const PairEvent& pair, FieldAmplitude amp,
                  RandomStream& rng) {
    const TapResult tap = tap_split(amp, src.tap_reflectance);
    ArmResult r;
    r.ready = event_ready(tap.tapped_intensity, src, rng);
    const PhaseAngle theta = effective_phase(setting, pair);
    const PortIntensities ports = output_intensities(tap.main_amplitude, setting.lo_amplitude, theta);
    r.reading = read_homodyne(ports, det, rng);
    r.outcome = det.discriminator_threshold ? discriminate(r.reading, det)
                                            : digitize(r.reading.v_diff, rng);
    return r;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, std::int64_t trial_id, int setting_a_index,
                      int setting_b_index, std::uint64_t master_seed) {
    const auto id = static_cast<std::uint64_t>(trial_id);
    RandomStream src_rng = derive_stream(master_seed, id, StreamRole::Source);
    RandomStream a_rng = derive_stream(master_seed, id, StreamRole::ArmA);
    RandomStream b_rng = derive_stream(master_seed, id, StreamRole::ArmB);

    const PairEvent pair = generate_pair(cfg.source, src_rng);

    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.setting_a_index = setting_a_index;
    rec.setting_b_index = setting_b_index;
    rec.alpha = pair.alpha;
    rec.omega = pair.omega;

    const ArmResult ra = run_arm(cfg.source, cfg.detector_a,
                                 setting_at_trial(cfg.settings.side_a(setting_a_index), trial_id),
                                 pair, pair.amp_a, a_rng);
    const ArmResult rb = run_arm(cfg.source, cfg.detector_b,
                                 setting_at_trial(cfg.settings.side_b(setting_b_index), trial_id),
                                 pair, pair.amp_b, b_rng);
    rec.ready_a = ra.ready;
    rec.ready_b = rb.ready;
    rec.reading_a = ra.reading;
    rec.reading_b = rb.reading;
    rec.outcome_a = ra.outcome;
    rec.outcome_b = rb.outcome;
    return rec;
}

TrialSet run_experiment(const ExperimentConfig& cfg, std::int64_t n_trials, std::uint64_t seed,
                        int n_threads) {
    cfg.validate();
    if (n_trials < 1) throw std::invalid_argument("run_experiment: n_trials must be >= 1");

    TrialSet set;
    set.config = cfg;
    set.n_trials = n_trials;
    set.seed = seed;
    set.records.resize(static_cast<std::size_t>(n_trials));

    auto work = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            int ia = cfg.settings.fixed_a;
            int ib = cfg.settings.fixed_b;
            if (cfg.settings.selection == SelectionMode::RandomPerTrial) {
                RandomStream srng =
                    derive_stream(seed, static_cast<std::uint64_t>(i), StreamRole::Settings);
                ia = srng.pick2();
                ib = srng.pick2();
            }
            set.records[static_cast<std::size_t>(i)] = run_trial(cfg, i, ia, ib, seed);
        }
    };

    if (n_threads <= 1) {
        work(0, n_trials);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (n_trials + n_threads - 1) / n_threads;
        for (std::int64_t lo = 0; lo < n_trials; lo += chunk)
            pool.emplace_back(work, lo, std::min(lo + chunk, n_trials));
        for (auto& t : pool) t.join();
    }
    return set;
}

std::vector<ScanPoint> scan_phase(const ExperimentConfig& cfg, Channel channel, double start,
                                  double end, int n_steps, std::uint64_t seed) {
    cfg.validate();
    if (n_steps < 2) throw std::invalid_argument("scan_phase: n_steps must be >= 2");

    const bool is_a = channel == Channel::A;
    const ChannelSetting& base = is_a ? cfg.settings.a : cfg.settings.b;
    const DetectorConfig& det = is_a ? cfg.detector_a : cfg.detector_b;
    const StreamRole arm_role = is_a ? StreamRole::ArmA : StreamRole::ArmB;

    std::vector<ScanPoint> points(static_cast<std::size_t>(n_steps));
    for (int k = 0; k < n_steps; ++k) {
        const double theta = start + (end - start) * k / (n_steps - 1);
        ChannelSetting s = setting_at_trial(base, k);
        s.theta_set = PhaseAngle(theta);

        const auto id = static_cast<std::uint64_t>(k);
        RandomStream src_rng = derive_stream(seed, id, StreamRole::Source);
        RandomStream arm_rng = derive_stream(seed, id, arm_role);
        const PairEvent pair = generate_pair(cfg.source, src_rng);
        const ArmResult r = run_arm(cfg.source, det, s, pair, is_a ? pair.amp_a : pair.amp_b,
                                    arm_rng);
        points[static_cast<std::size_t>(k)] = {theta, r.reading.v_diff, pair.alpha};
    }
    return points;
}

std::vector<double> sample_uniform_phase_diffs(const ExperimentConfig& cfg, Channel channel,
                                               std::int64_t n_trials, std::uint64_t seed) {
    cfg.validate();
    if (n_trials < 1) throw std::invalid_argument("sample_uniform_phase_diffs: n_trials must be >= 1");

    const bool is_a = channel == Channel::A;
    const ChannelSetting& base = is_a ? cfg.settings.a : cfg.settings.b;
    const DetectorConfig& det = is_a ? cfg.detector_a : cfg.detector_b;
    const StreamRole arm_role = is_a ? StreamRole::ArmA : StreamRole::ArmB;

    std::vector<double> values(static_cast<std::size_t>(n_trials));
    for (std::int64_t i = 0; i < n_trials; ++i) {
        const auto id = static_cast<std::uint64_t>(i);
        RandomStream set_rng = derive_stream(seed, id, StreamRole::Settings);
        ChannelSetting s = setting_at_trial(base, i);
        s.theta_set = PhaseAngle(set_rng.uniform_open01() * kTwoPi - kPi);

        RandomStream src_rng = derive_stream(seed, id, StreamRole::Source);
        RandomStream arm_rng = derive_stream(seed, id, arm_role);
        const PairEvent pair = generate_pair(cfg.source, src_rng);
        const ArmResult r = run_arm(cfg.source, det, s, pair, is_a ? pair.amp_a : pair.amp_b,
                                    arm_rng);
        values[static_cast<std::size_t>(i)] = r.reading.v_diff;
    }
    return values;
}

}  // namespace bellsim
