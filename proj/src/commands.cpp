#include "bellsim/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

#include "bellsim/csv.hpp"

namespace bellsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string prepare_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

void write_summary(CommandOutcome& outcome, const std::string& dir) {
    const std::string path = dir + "/summary.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << outcome.summary.dump(2) << "\n";
    outcome.files.push_back(path);
}

json common_summary(const char* command, const RunConfig& cfg) {
    json j;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["n_trials"] = cfg.n_trials;
    j["timestamp_utc"] = utc_timestamp();
    return j;
}

struct PairStats {
    double e_fair = kNaN, e_fair_err = kNaN;
    double e_post = kNaN, e_post_err = kNaN;
};

PairStats pair_stats(const PairTally& t) {
    PairStats s;
    if (t.n_ready > 0) {
        s.e_fair = correlation_fair(t);
        s.e_fair_err = correlation_fair_err(t);
    }
    if (t.observed() > 0) {
        s.e_post = correlation_postselected(t);
        s.e_post_err = correlation_postselected_err(t);
    }
    return s;
}

const char* pair_label(int ia, int ib) {
    static const char* names[2][2] = {{"ab", "ab_prime"}, {"a_prime_b", "a_prime_b_prime"}};
    return names[ia][ib];
}

double accepted_fraction(const CoincidenceTally& tally) {
    std::int64_t ready = 0, total = 0;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            ready += tally.pair[ia][ib].n_ready;
            total += tally.pair[ia][ib].n_trials;
        }
    return total > 0 ? static_cast<double>(ready) / static_cast<double>(total) : kNaN;
}

json chsh_json(const ChshResult& r) {
    return json{{"value", r.s}, {"stderr", r.s_err}};
}

void write_tally_csv(const std::string& path, const CoincidenceTally& tally,
                     CommandOutcome& outcome) {
    CsvFile csv(path, {"setting_pair", "n_trials", "n_ready", "n_pp", "n_pm", "n_mp", "n_mm",
                       "e_fair", "e_fair_err", "e_post", "e_post_err"});
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            const PairTally& t = tally.pair[ia][ib];
            const PairStats s = pair_stats(t);
            csv.row({pair_label(ia, ib), format_i64(t.n_trials), format_i64(t.n_ready),
                     format_i64(t.n_pp), format_i64(t.n_pm), format_i64(t.n_mp),
                     format_i64(t.n_mm), format_g17(s.e_fair), format_g17(s.e_fair_err),
                     format_g17(s.e_post), format_g17(s.e_post_err)});
        }
    outcome.files.push_back(path);
}

}  // namespace

CommandOutcome cmd_run(const RunConfig& cfg) {
    const std::string dir = prepare_out_dir(cfg);
    const TrialSet set = run_experiment(cfg.experiment, cfg.n_trials, cfg.seed, cfg.n_threads);
    const CoincidenceTally tally = tally_trials(set);

    CommandOutcome outcome;
    write_tally_csv(dir + "/tally.csv", tally, outcome);

    json j = common_summary("run", cfg);
    j["accepted_fraction"] = accepted_fraction(tally);
    if (cfg.experiment.settings.selection == SelectionMode::RandomPerTrial) {
        const ChshResult fair = chsh_from_tally(tally, Estimator::FairNAB, cfg.chsh_subtract);
        const ChshResult post = chsh_from_tally(tally, Estimator::PostSelected, cfg.chsh_subtract);
        j["s_fair"] = chsh_json(fair);
        j["s_post"] = chsh_json(post);
    } else {
        // FixedPair runs populate a single cell; S needs all four pairs.
        j["s_fair"] = nullptr;
        j["s_post"] = nullptr;
    }
    json pairs = json::object();
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            const PairTally& t = tally.pair[ia][ib];
            const PairStats s = pair_stats(t);
            pairs[pair_label(ia, ib)] = {{"n_trials", t.n_trials}, {"n_ready", t.n_ready},
                                         {"e_fair", s.e_fair},     {"e_fair_err", s.e_fair_err},
                                         {"e_post", s.e_post},     {"e_post_err", s.e_post_err}};
        }
    j["pairs"] = pairs;
    outcome.summary = std::move(j);
    write_summary(outcome, dir);
    return outcome;
}

namespace {

RunConfig apply_sweep_value(const RunConfig& cfg, SweepParameter parameter, double value) {
    RunConfig out = cfg;
    switch (parameter) {
        case SweepParameter::DiscriminatorThreshold:
            out.experiment.detector_a.discriminator_threshold = value;
            out.experiment.detector_b.discriminator_threshold = value;
            break;
        case SweepParameter::NoiseSigma:
            out.experiment.detector_a.noise_sigma = value;
            out.experiment.detector_b.noise_sigma = value;
            break;
        case SweepParameter::SigmaOmega:
            out.experiment.source.sigma_omega = value;
            break;
        case SweepParameter::PathDelay:
            // Common optical delay on all four settings.
            out.experiment.settings.a.path_delay = value;
            out.experiment.settings.a_prime.path_delay = value;
            out.experiment.settings.b.path_delay = value;
            out.experiment.settings.b_prime.path_delay = value;
            break;
    }
    try {
        out.experiment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep: grid value " + format_g17(value) + " rejected: " + e.what());
    }
    return out;
}

struct SweepRow {
    double value = 0.0;
    double s_fair = kNaN, s_fair_err = kNaN;
    double s_post = kNaN, s_post_err = kNaN;
    double accepted = kNaN;
};

}  // namespace

CommandOutcome cmd_sweep(const RunConfig& cfg) {
    if (cfg.sweep.grid.empty())
        throw ConfigError("sweep: empty grid (set [sweep] grid or pass --grid)");
    const std::string dir = prepare_out_dir(cfg);

    std::vector<SweepRow> rows;
    for (double value : cfg.sweep.grid) {
        const RunConfig point = apply_sweep_value(cfg, cfg.sweep.parameter, value);
        // Same seed base at every grid point, for variance reduction.
        const TrialSet set = run_experiment(point.experiment, cfg.n_trials, cfg.seed, cfg.n_threads);
        const CoincidenceTally tally = tally_trials(set);
        SweepRow row;
        row.value = value;
        row.accepted = accepted_fraction(tally);
        try {
            const ChshResult fair = chsh_from_tally(tally, Estimator::FairNAB, cfg.chsh_subtract);
            row.s_fair = fair.s;
            row.s_fair_err = fair.s_err;
        } catch (const std::domain_error&) { /* leave nan */ }
        try {
            const ChshResult post = chsh_from_tally(tally, Estimator::PostSelected, cfg.chsh_subtract);
            row.s_post = post.s;
            row.s_post_err = post.s_err;
        } catch (const std::domain_error&) { /* leave nan */ }
        rows.push_back(row);
    }

    CommandOutcome outcome;
    const std::string path = dir + "/sweep.csv";
    {
        CsvFile csv(path, {"value", "s_fair", "s_fair_err", "s_post", "s_post_err",
                           "accepted_fraction"});
        for (const SweepRow& r : rows)
            csv.row({format_g17(r.value), format_g17(r.s_fair), format_g17(r.s_fair_err),
                     format_g17(r.s_post), format_g17(r.s_post_err), format_g17(r.accepted)});
    }
    outcome.files.push_back(path);

    json j = common_summary("sweep", cfg);
    j["parameter"] = cfg.sweep.parameter == SweepParameter::DiscriminatorThreshold ? "discriminator_threshold"
                     : cfg.sweep.parameter == SweepParameter::NoiseSigma           ? "noise_sigma"
                     : cfg.sweep.parameter == SweepParameter::SigmaOmega           ? "sigma_omega"
                                                                                   : "path_delay";
    j["n_points"] = rows.size();
    json first_crossing = nullptr;
    for (const SweepRow& r : rows)
        if (std::isfinite(r.s_post) && r.s_post > 2.0) {
            first_crossing = {{"value", r.value}, {"s_post", r.s_post}};
            break;
        }
    j["first_s_post_above_2"] = first_crossing;
    outcome.summary = std::move(j);
    write_summary(outcome, dir);
    return outcome;
}

CommandOutcome cmd_curves(const RunConfig& cfg) {
    const std::string dir = prepare_out_dir(cfg);
    const double theta_a =
        cfg.curves.theta_a ? *cfg.curves.theta_a : cfg.experiment.settings.a.theta_set.radians();

    CommandOutcome outcome;
    const std::string path = dir + "/curves.csv";
    std::vector<double> rate_pp, rate_pm, rate_mp, rate_mm;
    {
        CsvFile csv(path, {"theta_b", "n_ready", "n_pp", "n_pm", "n_mp", "n_mm", "rate_pp",
                           "rate_pm", "rate_mp", "rate_mm", "analytic_pp"});
        for (int k = 0; k < cfg.curves.grid_steps; ++k) {
            const double theta_b =
                cfg.curves.grid_steps == 1
                    ? cfg.curves.grid_start
                    : cfg.curves.grid_start + (cfg.curves.grid_end - cfg.curves.grid_start) * k /
                                                  (cfg.curves.grid_steps - 1);
            RunConfig point = cfg;
            point.experiment.settings.selection = SelectionMode::FixedPair;
            point.experiment.settings.fixed_a = 0;
            point.experiment.settings.fixed_b = 0;
            point.experiment.settings.a.theta_set = PhaseAngle(theta_a);
            point.experiment.settings.b.theta_set = PhaseAngle(theta_b);
            const TrialSet set =
                run_experiment(point.experiment, cfg.n_trials, cfg.seed, cfg.n_threads);
            const PairTally& t = tally_trials(set).pair[0][0];
            const double n = static_cast<double>(t.n_ready);
            const double pp = t.n_ready > 0 ? t.n_pp / n : kNaN;
            const double pm = t.n_ready > 0 ? t.n_pm / n : kNaN;
            const double mp = t.n_ready > 0 ? t.n_mp / n : kNaN;
            const double mm = t.n_ready > 0 ? t.n_mm / n : kNaN;
            double analytic_pp = kNaN;
            try {
                analytic_pp = analytic_coincidence(PhaseAngle(theta_a), PhaseAngle(theta_b)).pp;
            } catch (const std::domain_error&) { /* undefined at multiples of pi */ }
            rate_pp.push_back(pp);
            rate_pm.push_back(pm);
            rate_mp.push_back(mp);
            rate_mm.push_back(mm);
            csv.row({format_g17(theta_b), format_i64(t.n_ready), format_i64(t.n_pp),
                     format_i64(t.n_pm), format_i64(t.n_mp), format_i64(t.n_mm), format_g17(pp),
                     format_g17(pm), format_g17(mp), format_g17(mm), format_g17(analytic_pp)});
        }
    }
    outcome.files.push_back(path);

    json j = common_summary("curves", cfg);
    j["theta_a"] = theta_a;
    const auto vis = [](const std::vector<double>& rates) -> json {
        try {
            return visibility(rates);
        } catch (const std::exception&) {
            return nullptr;
        }
    };
    j["visibility"] = {{"pp", vis(rate_pp)}, {"pm", vis(rate_pm)}, {"mp", vis(rate_mp)},
                       {"mm", vis(rate_mm)}};
    outcome.summary = std::move(j);
    write_summary(outcome, dir);
    return outcome;
}

CommandOutcome cmd_scan(const RunConfig& cfg) {
    const std::string dir = prepare_out_dir(cfg);
    const std::vector<ScanPoint> points = scan_phase(cfg.experiment, cfg.scan.channel,
                                                     cfg.scan.start, cfg.scan.end, cfg.scan.steps,
                                                     cfg.seed);
    std::vector<double> thetas(points.size()), vs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        thetas[i] = points[i].theta;
        vs[i] = points[i].v_diff;
    }
    const TwoCurveFit fit = two_curve_decomposition(thetas, vs);

    CommandOutcome outcome;
    const std::string path = dir + "/scan.csv";
    {
        CsvFile csv(path, {"theta", "v_diff", "class_label", "alpha"});
        for (std::size_t i = 0; i < points.size(); ++i)
            csv.row({format_g17(points[i].theta), format_g17(points[i].v_diff),
                     format_i64(fit.labels[i]), format_g17(points[i].alpha.radians())});
    }
    outcome.files.push_back(path);

    json j = common_summary("scan", cfg);
    j["channel"] = cfg.scan.channel == Channel::A ? "A" : "B";
    j["n_points"] = points.size();
    j["amplitude_fit"] = fit.amplitude;
    j["rms_residual"] = fit.rms_residual;
    if (cfg.experiment.source.alpha_mode == AlphaMode::Binary) {
        // Misclassification against the diagnostic alpha, overall and away
        // from the curve crossings at sin(theta) = 0.
        std::int64_t bad = 0, bad_cut = 0, n_cut = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const int truth = points[i].alpha.radians() == 0.0 ? 0 : 1;
            const bool mis = fit.labels[i] != truth;
            bad += mis;
            if (std::fabs(std::sin(points[i].theta)) >= 0.1) {
                ++n_cut;
                bad_cut += mis;
            }
        }
        j["misclassification"] = static_cast<double>(bad) / static_cast<double>(points.size());
        j["misclassification_excl_sin_lt_0.1"] =
            n_cut > 0 ? json(static_cast<double>(bad_cut) / static_cast<double>(n_cut)) : json(nullptr);
    } else {
        j["misclassification"] = nullptr;
        j["misclassification_excl_sin_lt_0.1"] = nullptr;
    }
    outcome.summary = std::move(j);
    write_summary(outcome, dir);
    return outcome;
}

CommandOutcome cmd_hist(const RunConfig& cfg) {
    const std::string dir = prepare_out_dir(cfg);
    const std::vector<double> values =
        sample_uniform_phase_diffs(cfg.experiment, Channel::A, cfg.n_trials, cfg.seed);
    const Histogram h = diff_histogram(values, cfg.hist.bins);
    const double tail = tail_fraction_above_half_max(values);

    CommandOutcome outcome;
    const std::string path = dir + "/hist.csv";
    {
        CsvFile csv(path, {"bin_lo", "bin_hi", "count"});
        const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            const double lo = h.lo + width * static_cast<double>(i);
            const double hi = i + 1 == h.counts.size() ? h.hi : h.lo + width * static_cast<double>(i + 1);
            csv.row({format_g17(lo), format_g17(hi), format_i64(h.counts[i])});
        }
    }
    outcome.files.push_back(path);

    double x_max = 0.0;
    for (double v : values) x_max = std::max(x_max, std::fabs(v));

    json j = common_summary("hist", cfg);
    j["bins"] = cfg.hist.bins;
    j["total"] = h.total;
    j["lo"] = h.lo;
    j["hi"] = h.hi;
    j["x_max_abs"] = x_max;
    j["tail_fraction_above_half_max"] = tail;
    outcome.summary = std::move(j);
    write_summary(outcome, dir);
    return outcome;
}

}  // namespace bellsim
