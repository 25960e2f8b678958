#include "bellsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bellsim/csv.hpp"

namespace bellsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct KeyContext {
    int line;
    const std::string& section;
    const std::string& key;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line) + ": " + what + " for key '" +
                          key + "' in [" + section + "]");
    }
};

double parse_double(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) ctx.fail("expected a number, got '" + t + "'");
    return x;
}

std::int64_t parse_i64(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    char* end = nullptr;
    const long long x = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) ctx.fail("expected an integer, got '" + t + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t.empty() || t[0] == '-') ctx.fail("expected an unsigned integer, got '" + t + "'");
    char* end = nullptr;
    const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) ctx.fail("expected an unsigned integer, got '" + t + "'");
    return x;
}

bool parse_bool(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "true") return true;
    if (t == "false") return false;
    ctx.fail("expected true or false, got '" + t + "'");
}

std::optional<double> parse_opt_double(const std::string& v, const KeyContext& ctx) {
    if (trim(v) == "none") return std::nullopt;
    return parse_double(v, ctx);
}

std::vector<double> parse_grid(const std::string& v, const KeyContext& ctx) {
    std::vector<double> grid;
    const std::string t = trim(v);
    if (t.empty()) return grid;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_double(item, ctx));
    return grid;
}

AlphaMode parse_alpha_mode(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "binary") return AlphaMode::Binary;
    if (t == "uniform") return AlphaMode::Uniform;
    if (t == "fixed") return AlphaMode::Fixed;
    ctx.fail("expected binary, uniform or fixed, got '" + t + "'");
}

AmplitudeMode parse_amplitude_mode(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "rayleigh") return AmplitudeMode::Rayleigh;
    if (t == "fixed") return AmplitudeMode::Fixed;
    ctx.fail("expected rayleigh or fixed, got '" + t + "'");
}

SelectionMode parse_selection(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "random") return SelectionMode::RandomPerTrial;
    if (t == "fixed") return SelectionMode::FixedPair;
    ctx.fail("expected random or fixed, got '" + t + "'");
}

Channel parse_channel(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "A") return Channel::A;
    if (t == "B") return Channel::B;
    ctx.fail("expected A or B, got '" + t + "'");
}

ChshSubtract parse_subtract(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "ab") return ChshSubtract::AB;
    if (t == "ab_prime") return ChshSubtract::ABprime;
    if (t == "a_prime_b") return ChshSubtract::AprimeB;
    if (t == "a_prime_b_prime") return ChshSubtract::AprimeBprime;
    ctx.fail("expected one of ab, ab_prime, a_prime_b, a_prime_b_prime, got '" + t + "'");
}

SweepParameter parse_sweep_parameter(const std::string& v, const KeyContext& ctx) {
    const std::string t = trim(v);
    if (t == "discriminator_threshold") return SweepParameter::DiscriminatorThreshold;
    if (t == "noise_sigma") return SweepParameter::NoiseSigma;
    if (t == "sigma_omega") return SweepParameter::SigmaOmega;
    if (t == "path_delay") return SweepParameter::PathDelay;
    ctx.fail(
        "expected one of discriminator_threshold, noise_sigma, sigma_omega, path_delay, got '" +
        t + "'");
}

const char* alpha_mode_name(AlphaMode m) {
    switch (m) {
        case AlphaMode::Binary: return "binary";
        case AlphaMode::Uniform: return "uniform";
        case AlphaMode::Fixed: return "fixed";
    }
    return "?";
}

const char* amplitude_mode_name(AmplitudeMode m) {
    return m == AmplitudeMode::Rayleigh ? "rayleigh" : "fixed";
}

const char* subtract_name(ChshSubtract s) {
    switch (s) {
        case ChshSubtract::AB: return "ab";
        case ChshSubtract::ABprime: return "ab_prime";
        case ChshSubtract::AprimeB: return "a_prime_b";
        case ChshSubtract::AprimeBprime: return "a_prime_b_prime";
    }
    return "?";
}

const char* sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::DiscriminatorThreshold: return "discriminator_threshold";
        case SweepParameter::NoiseSigma: return "noise_sigma";
        case SweepParameter::SigmaOmega: return "sigma_omega";
        case SweepParameter::PathDelay: return "path_delay";
    }
    return "?";
}

struct Parser {
    RunConfig cfg;
    bool seed_seen = false;
    bool theta_seen[4] = {false, false, false, false};  // a, a_prime, b, b_prime
    std::set<std::string> seen_keys;

    void assign(const std::string& section, const std::string& key, const std::string& value,
                int line) {
        const KeyContext ctx{line, section, key};
        if (!seen_keys.insert(section + "/" + key).second)
            throw ConfigError("config line " + std::to_string(line) + ": duplicate key '" + key +
                              "' in [" + section + "]");

        if (section == "run") {
            if (key == "seed") { cfg.seed = parse_u64(value, ctx); seed_seen = true; return; }
            if (key == "n_trials") { cfg.n_trials = parse_i64(value, ctx); return; }
            if (key == "n_threads") { cfg.n_threads = static_cast<int>(parse_i64(value, ctx)); return; }
            if (key == "chsh_subtract") { cfg.chsh_subtract = parse_subtract(value, ctx); return; }
            if (key == "out_dir") { cfg.out_dir = trim(value); return; }
        } else if (section == "source") {
            SourceConfig& s = cfg.experiment.source;
            if (key == "omega0") { s.omega0 = parse_double(value, ctx); return; }
            if (key == "sigma_omega") { s.sigma_omega = parse_double(value, ctx); return; }
            if (key == "amplitude_scale") { s.amplitude_scale = parse_double(value, ctx); return; }
            if (key == "amplitude_mode") { s.amplitude_mode = parse_amplitude_mode(value, ctx); return; }
            if (key == "alpha_mode") { s.alpha_mode = parse_alpha_mode(value, ctx); return; }
            if (key == "alpha_fixed") { s.alpha_fixed = make_phase(value, ctx); return; }
            if (key == "tap_reflectance") { s.tap_reflectance = parse_double(value, ctx); return; }
            if (key == "pd_threshold") { s.pd_threshold = parse_double(value, ctx); return; }
            if (key == "pd_efficiency") { s.pd_efficiency = parse_double(value, ctx); return; }
        } else if (section == "detector_a" || section == "detector_b") {
            DetectorConfig& d =
                section == "detector_a" ? cfg.experiment.detector_a : cfg.experiment.detector_b;
            if (key == "gain") { d.gain = parse_double(value, ctx); return; }
            if (key == "noise_sigma") { d.noise_sigma = parse_double(value, ctx); return; }
            if (key == "discriminator_threshold") { d.discriminator_threshold = parse_opt_double(value, ctx); return; }
            if (key == "subtract_pedestal") { d.subtract_pedestal = parse_bool(value, ctx); return; }
        } else if (section == "settings") {
            SettingsSchedule& sch = cfg.experiment.settings;
            if (key == "selection") { sch.selection = parse_selection(value, ctx); return; }
            if (key == "fixed_a") { sch.fixed_a = static_cast<int>(parse_i64(value, ctx)); return; }
            if (key == "fixed_b") { sch.fixed_b = static_cast<int>(parse_i64(value, ctx)); return; }
            ChannelSetting* ch = nullptr;
            std::string sub;
            int theta_slot = -1;
            if (key.rfind("a_prime_", 0) == 0) { ch = &sch.a_prime; sub = key.substr(8); theta_slot = 1; }
            else if (key.rfind("b_prime_", 0) == 0) { ch = &sch.b_prime; sub = key.substr(8); theta_slot = 3; }
            else if (key.rfind("a_", 0) == 0) { ch = &sch.a; sub = key.substr(2); theta_slot = 0; }
            else if (key.rfind("b_", 0) == 0) { ch = &sch.b; sub = key.substr(2); theta_slot = 2; }
            if (ch) {
                if (sub == "theta") { ch->theta_set = make_phase(value, ctx); theta_seen[theta_slot] = true; return; }
                if (sub == "path_delay") { ch->path_delay = parse_double(value, ctx); return; }
                if (sub == "lo_amplitude") { ch->lo_amplitude = make_amplitude(value, ctx); return; }
                if (sub == "drift_rate") { ch->drift_rate = parse_double(value, ctx); return; }
            }
        } else if (section == "scan") {
            if (key == "channel") { cfg.scan.channel = parse_channel(value, ctx); return; }
            if (key == "start") { cfg.scan.start = parse_double(value, ctx); return; }
            if (key == "end") { cfg.scan.end = parse_double(value, ctx); return; }
            if (key == "steps") { cfg.scan.steps = static_cast<int>(parse_i64(value, ctx)); return; }
        } else if (section == "sweep") {
            if (key == "parameter") { cfg.sweep.parameter = parse_sweep_parameter(value, ctx); return; }
            if (key == "grid") { cfg.sweep.grid = parse_grid(value, ctx); return; }
        } else if (section == "curves") {
            if (key == "theta_a") {
                cfg.curves.theta_a = trim(value) == "default"
                                         ? std::nullopt
                                         : std::optional<double>(parse_double(value, ctx));
                return;
            }
            if (key == "grid_start") { cfg.curves.grid_start = parse_double(value, ctx); return; }
            if (key == "grid_end") { cfg.curves.grid_end = parse_double(value, ctx); return; }
            if (key == "grid_steps") { cfg.curves.grid_steps = static_cast<int>(parse_i64(value, ctx)); return; }
        } else if (section == "hist") {
            if (key == "bins") { cfg.hist.bins = static_cast<int>(parse_i64(value, ctx)); return; }
        } else {
            throw ConfigError("config line " + std::to_string(line) + ": unknown section [" +
                              section + "]");
        }
        throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key +
                          "' in [" + section + "]");
    }

    static PhaseAngle make_phase(const std::string& value, const KeyContext& ctx) {
        const double x = parse_double(value, ctx);
        if (!std::isfinite(x)) ctx.fail("phase must be finite");
        return PhaseAngle(x);
    }

    static FieldAmplitude make_amplitude(const std::string& value, const KeyContext& ctx) {
        const double x = parse_double(value, ctx);
        if (!(std::isfinite(x) && x >= 0.0)) ctx.fail("amplitude must be finite and >= 0");
        return FieldAmplitude(x);
    }
};

void validate_run_config(const RunConfig& cfg) {
    try {
        cfg.experiment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config validation: ") + e.what());
    }
    if (cfg.n_trials < 1) throw ConfigError("config validation: n_trials must be >= 1");
    if (cfg.n_threads < 1) throw ConfigError("config validation: n_threads must be >= 1");
    if (cfg.scan.steps < 2) throw ConfigError("config validation: scan steps must be >= 2");
    if (!(std::isfinite(cfg.scan.start) && std::isfinite(cfg.scan.end)))
        throw ConfigError("config validation: scan range must be finite");
    if (cfg.curves.grid_steps < 1)
        throw ConfigError("config validation: curves grid_steps must be >= 1");
    if (cfg.hist.bins < 2) throw ConfigError("config validation: hist bins must be >= 2");
    for (double g : cfg.sweep.grid)
        if (!std::isfinite(g)) throw ConfigError("config validation: sweep grid must be finite");
    if (cfg.out_dir.empty()) throw ConfigError("config validation: out_dir must not be empty");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    Parser parser;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("config line " + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line) + ": key before any [section]");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = s.substr(eq + 1);
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line) + ": empty key");
        parser.assign(section, key, value, line);
    }

    if (!parser.seed_seen)
        throw ConfigError("config validation: seed is mandatory ([run] seed = <u64>)");
    static const char* theta_names[4] = {"a_theta", "a_prime_theta", "b_theta", "b_prime_theta"};
    for (int i = 0; i < 4; ++i)
        if (!parser.theta_seen[i])
            throw ConfigError(std::string("config validation: [settings] ") + theta_names[i] +
                              " is mandatory");

    validate_run_config(parser.cfg);
    return parser.cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    const auto d = [](double x) { return format_g17(x); };

    out << "[run]\n";
    out << "seed = " << cfg.seed << "\n";
    out << "n_trials = " << cfg.n_trials << "\n";
    out << "n_threads = " << cfg.n_threads << "\n";
    out << "chsh_subtract = " << subtract_name(cfg.chsh_subtract) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";

    const SourceConfig& s = cfg.experiment.source;
    out << "\n[source]\n";
    out << "omega0 = " << d(s.omega0) << "\n";
    out << "sigma_omega = " << d(s.sigma_omega) << "\n";
    out << "amplitude_scale = " << d(s.amplitude_scale) << "\n";
    out << "amplitude_mode = " << amplitude_mode_name(s.amplitude_mode) << "\n";
    out << "alpha_mode = " << alpha_mode_name(s.alpha_mode) << "\n";
    out << "alpha_fixed = " << d(s.alpha_fixed.radians()) << "\n";
    out << "tap_reflectance = " << d(s.tap_reflectance) << "\n";
    out << "pd_threshold = " << d(s.pd_threshold) << "\n";
    out << "pd_efficiency = " << d(s.pd_efficiency) << "\n";

    const auto emit_detector = [&](const char* name, const DetectorConfig& det) {
        out << "\n[" << name << "]\n";
        out << "gain = " << d(det.gain) << "\n";
        out << "noise_sigma = " << d(det.noise_sigma) << "\n";
        out << "discriminator_threshold = "
            << (det.discriminator_threshold ? d(*det.discriminator_threshold) : "none") << "\n";
        out << "subtract_pedestal = " << (det.subtract_pedestal ? "true" : "false") << "\n";
    };
    emit_detector("detector_a", cfg.experiment.detector_a);
    emit_detector("detector_b", cfg.experiment.detector_b);

    const SettingsSchedule& sch = cfg.experiment.settings;
    out << "\n[settings]\n";
    out << "selection = " << (sch.selection == SelectionMode::RandomPerTrial ? "random" : "fixed")
        << "\n";
    out << "fixed_a = " << sch.fixed_a << "\n";
    out << "fixed_b = " << sch.fixed_b << "\n";
    const auto emit_channel = [&](const char* prefix, const ChannelSetting& ch) {
        out << prefix << "_theta = " << d(ch.theta_set.radians()) << "\n";
        out << prefix << "_path_delay = " << d(ch.path_delay) << "\n";
        out << prefix << "_lo_amplitude = " << d(ch.lo_amplitude.value()) << "\n";
        out << prefix << "_drift_rate = " << d(ch.drift_rate) << "\n";
    };
    emit_channel("a", sch.a);
    emit_channel("a_prime", sch.a_prime);
    emit_channel("b", sch.b);
    emit_channel("b_prime", sch.b_prime);

    out << "\n[scan]\n";
    out << "channel = " << (cfg.scan.channel == Channel::A ? "A" : "B") << "\n";
    out << "start = " << d(cfg.scan.start) << "\n";
    out << "end = " << d(cfg.scan.end) << "\n";
    out << "steps = " << cfg.scan.steps << "\n";

    out << "\n[sweep]\n";
    out << "parameter = " << sweep_parameter_name(cfg.sweep.parameter) << "\n";
    out << "grid = ";
    for (std::size_t i = 0; i < cfg.sweep.grid.size(); ++i) {
        if (i) out << ",";
        out << d(cfg.sweep.grid[i]);
    }
    out << "\n";

    out << "\n[curves]\n";
    out << "theta_a = " << (cfg.curves.theta_a ? d(*cfg.curves.theta_a) : "default") << "\n";
    out << "grid_start = " << d(cfg.curves.grid_start) << "\n";
    out << "grid_end = " << d(cfg.curves.grid_end) << "\n";
    out << "grid_steps = " << cfg.curves.grid_steps << "\n";

    out << "\n[hist]\n";
    out << "bins = " << cfg.hist.bins << "\n";
    return out.str();
}

}  // namespace bellsim
