// bellsim: classical homodyne Bell-test simulator CLI.
//
// Subcommands: run, sweep, curves, scan, hist. Every subcommand reads one
// config file (--config); --seed and --out override the file, as do the
// environment variables BELLSIM_SEED and BELLSIM_OUT (flag > env > file).
// Exit codes: 0 success, 2 config/usage error, 3 runtime error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bellsim/commands.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string command;
    // flag overrides; empty/unset means "not given"
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> sweep_parameter;
    std::optional<std::string> sweep_grid;
    std::optional<double> curves_theta_a;
    std::optional<std::string> scan_channel;
    std::optional<double> scan_start, scan_end;
    std::optional<int> scan_steps;
    std::optional<int> hist_bins;
};

std::optional<std::string> env_string(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

bellsim::RunConfig effective_config(const Options& opt) {
    using bellsim::ConfigError;
    bellsim::RunConfig cfg = bellsim::load_config_file(opt.config_path);

    if (opt.seed) {
        cfg.seed = *opt.seed;
    } else if (auto env = env_string("BELLSIM_SEED")) {
        try {
            std::size_t pos = 0;
            cfg.seed = std::stoull(*env, &pos);
            if (pos != env->size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("BELLSIM_SEED is not an unsigned integer: " + *env);
        }
    }
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    else if (auto env = env_string("BELLSIM_OUT")) cfg.out_dir = *env;

    if (opt.sweep_parameter) {
        const std::string& p = *opt.sweep_parameter;
        if (p == "discriminator_threshold") cfg.sweep.parameter = bellsim::SweepParameter::DiscriminatorThreshold;
        else if (p == "noise_sigma") cfg.sweep.parameter = bellsim::SweepParameter::NoiseSigma;
        else if (p == "sigma_omega") cfg.sweep.parameter = bellsim::SweepParameter::SigmaOmega;
        else if (p == "path_delay") cfg.sweep.parameter = bellsim::SweepParameter::PathDelay;
        else throw ConfigError("--parameter: expected one of discriminator_threshold, noise_sigma, sigma_omega, path_delay");
    }
    if (opt.sweep_grid) {
        cfg.sweep.grid.clear();
        std::stringstream ss(*opt.sweep_grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t pos = 0;
                cfg.sweep.grid.push_back(std::stod(item, &pos));
                if (pos != item.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ConfigError("--grid: not a number: '" + item + "'");
            }
        }
    }
    if (opt.curves_theta_a) cfg.curves.theta_a = *opt.curves_theta_a;
    if (opt.scan_channel) {
        if (*opt.scan_channel == "A") cfg.scan.channel = bellsim::Channel::A;
        else if (*opt.scan_channel == "B") cfg.scan.channel = bellsim::Channel::B;
        else throw ConfigError("--channel: expected A or B");
    }
    if (opt.scan_start) cfg.scan.start = *opt.scan_start;
    if (opt.scan_end) cfg.scan.end = *opt.scan_end;
    if (opt.scan_steps) cfg.scan.steps = *opt.scan_steps;
    if (opt.hist_bins) cfg.hist.bins = *opt.hist_bins;

    if (cfg.scan.steps < 2) throw ConfigError("scan steps must be >= 2");
    if (cfg.hist.bins < 2) throw ConfigError("hist bins must be >= 2");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical homodyne Bell-test simulator"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Config file path")->required();
        sub->add_option("--seed", opt.seed, "Override the config seed");
        sub->add_option("--out", opt.out_dir, "Override the output directory");
    };

    CLI::App* run = app.add_subcommand("run", "CHSH run: tally CSV + fair/post-selected S");
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep of S (fair and post-selected)");
    add_common(sweep);
    sweep->add_option("--parameter", opt.sweep_parameter,
                      "discriminator_threshold | noise_sigma | sigma_omega | path_delay");
    sweep->add_option("--grid", opt.sweep_grid, "Comma-separated grid values");

    CLI::App* curves = app.add_subcommand("curves", "Coincidence-rate curves over a theta_B grid");
    add_common(curves);
    curves->add_option("--theta-a", opt.curves_theta_a, "Fixed theta_A (radians)");

    CLI::App* scan = app.add_subcommand("scan", "Single-channel phase scan (Breitenbach-style scatter)");
    add_common(scan);
    scan->add_option("--channel", opt.scan_channel, "A | B");
    scan->add_option("--start", opt.scan_start, "Scan start (radians)");
    scan->add_option("--end", opt.scan_end, "Scan end (radians)");
    scan->add_option("--steps", opt.scan_steps, "Number of scan steps");

    CLI::App* hist = app.add_subcommand("hist", "Voltage-difference histogram under random LO phase");
    add_common(hist);
    hist->add_option("--bins", opt.hist_bins, "Number of histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        bellsim::RunConfig cfg;
        bellsim::CommandOutcome outcome;
        if (run->parsed()) { opt.command = "run"; cfg = effective_config(opt); outcome = bellsim::cmd_run(cfg); }
        else if (sweep->parsed()) { opt.command = "sweep"; cfg = effective_config(opt); outcome = bellsim::cmd_sweep(cfg); }
        else if (curves->parsed()) { opt.command = "curves"; cfg = effective_config(opt); outcome = bellsim::cmd_curves(cfg); }
        else if (scan->parsed()) { opt.command = "scan"; cfg = effective_config(opt); outcome = bellsim::cmd_scan(cfg); }
        else { opt.command = "hist"; cfg = effective_config(opt); outcome = bellsim::cmd_hist(cfg); }

        for (const std::string& f : outcome.files) std::cout << "wrote " << f << "\n";
        if (outcome.summary.contains("s_fair") && !outcome.summary["s_fair"].is_null())
            std::cout << "S_fair = " << outcome.summary["s_fair"]["value"]
                      << " +- " << outcome.summary["s_fair"]["stderr"]
                      << ", S_post = " << outcome.summary["s_post"]["value"]
                      << " +- " << outcome.summary["s_post"]["stderr"] << "\n";
        return 0;
    } catch (const bellsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
