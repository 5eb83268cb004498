#include "tripod/config.hpp"

#include "tripod/csv.hpp"
#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

namespace tripod {

Preset parse_preset(std::string_view name) {
    if (name == "paper") return Preset::Paper;
    if (name == "desk") return Preset::Desk;
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

std::string_view to_string(Preset p) { return p == Preset::Paper ? "paper" : "desk"; }

RunConfig preset_defaults(Preset p) {
    RunConfig c;
    c.preset = p;
    if (p == Preset::Paper) {
        c.gamma = units::rb_d1_linewidth;
        c.omega_c = 25.0;
        // v_g = 1.7 mm/us at the default control.
        c.coupling_density = 2.0 * c.omega_c * c.omega_c * (units::speed_of_light / 1.7 - 1.0);
        c.signal_amplitude = 0.05 * c.omega_c;
        c.nz = 400;
        c.write_delay = 1.5;
        c.sweep_omega_c = 12.0;
        c.sweep_ramp = 1.5;
        c.sweep_pulse_length = 0.7;
        c.sweep_pulse_edge = 0.4;
        c.sweep_read_scale = 0.05;
        c.sweep_read_time = 260.0;
        c.sweep_nz = 80;
        c.omega_values = {20, 22, 24, 26, 28, 30, 32, 34, 36, 38};
        c.slow_nz = 400;
    } else {
        c.gamma = 6.0;
        c.omega_c = 14.0;
        c.coupling_density = coupling_density_for_delay(28.0, c.omega_c, c.length);
        c.signal_amplitude = 0.05 * c.omega_c;
        c.nz = 250;
        c.write_delay = 1.5;
        c.sweep_omega_c = 7.0;
        c.sweep_ramp = 1.5;
        c.sweep_pulse_length = 0.7;
        c.sweep_pulse_edge = 0.4;
        c.sweep_read_scale = 0.05;
        c.sweep_read_time = 260.0;
        c.sweep_nz = 60;
        c.omega_values = {14.0, 15.5, 17.0, 18.5, 20.0, 21.5, 23.0, 24.5, 26.0, 28.0};
        c.slow_nz = 250;
    }
    c.b_values = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    return c;
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using Field = std::variant<double RunConfig::*, int RunConfig::*, bool RunConfig::*, std::string RunConfig::*,
                           std::vector<double> RunConfig::*, SchemeVariant RunConfig::*, PulseShape RunConfig::*>;

enum class Bound { None, Positive, NonNegative, Unit };

struct KeySpec {
    std::string_view section;
    std::string_view name;
    Field field;
    Bound bound = Bound::None;
    double max = inf;
};

const std::vector<KeySpec>& keys() {
    using R = RunConfig;
    static const std::vector<KeySpec> table = {
        {"scheme", "variant", &R::variant},
        {"scheme", "gamma", &R::gamma, Bound::Positive},
        {"scheme", "leakage", &R::leakage},
        {"medium", "coupling_density", &R::coupling_density, Bound::NonNegative},
        {"medium", "gamma_ground", &R::gamma_ground, Bound::NonNegative},
        {"medium", "length", &R::length, Bound::Positive},
        {"drive", "omega_c", &R::omega_c, Bound::Positive},
        {"drive", "detuning", &R::detuning},
        {"drive", "delta1", &R::delta1},
        {"drive", "delta2", &R::delta2},
        {"drive", "b_field", &R::b_field, Bound::NonNegative},
        {"drive", "g_factor", &R::g_factor, Bound::Positive},
        {"schedule", "pulse_shape", &R::pulse_shape},
        {"schedule", "pulse_start", &R::pulse_start, Bound::NonNegative},
        {"schedule", "pulse_length", &R::pulse_length, Bound::Positive},
        {"schedule", "pulse_edge", &R::pulse_edge, Bound::Positive},
        {"schedule", "signal_amplitude", &R::signal_amplitude, Bound::Positive},
        {"schedule", "alpha", &R::alpha, Bound::NonNegative},
        {"schedule", "beta", &R::beta, Bound::NonNegative},
        {"schedule", "phase", &R::phase},
        {"schedule", "ramp", &R::ramp, Bound::Positive},
        {"schedule", "t_dark", &R::t_dark, Bound::NonNegative},
        {"schedule", "read_scale", &R::read_scale, Bound::Positive},
        {"grid", "nz", &R::nz, Bound::Positive},
        {"grid", "read_time", &R::read_time, Bound::NonNegative},
        {"sweep", "b_values", &R::b_values, Bound::NonNegative},
        {"sweep", "difference_mhz", &R::difference_mhz, Bound::NonNegative},
        {"sweep", "write_delay", &R::write_delay, Bound::Positive},
        {"sweep", "omega_c", &R::sweep_omega_c, Bound::Positive},
        {"sweep", "ramp", &R::sweep_ramp, Bound::Positive},
        {"sweep", "pulse_length", &R::sweep_pulse_length, Bound::Positive},
        {"sweep", "pulse_edge", &R::sweep_pulse_edge, Bound::Positive},
        {"sweep", "read_scale", &R::sweep_read_scale, Bound::Positive},
        {"sweep", "read_time", &R::sweep_read_time, Bound::NonNegative},
        {"sweep", "nz", &R::sweep_nz, Bound::Positive},
        {"sweep", "converter_check", &R::converter_check},
        {"sweep", "converter_fraction", &R::converter_fraction, Bound::Positive, 1.0},
        {"sweep", "omega_values", &R::omega_values, Bound::Positive},
        {"sweep", "slow_pulse_fwhm", &R::slow_pulse_fwhm, Bound::Positive},
        {"sweep", "slow_nz", &R::slow_nz, Bound::Positive},
        {"sweep", "scan_points", &R::scan_points, Bound::Positive},
        {"sweep", "scan_range", &R::scan_range, Bound::NonNegative},
        {"sweep", "probe_fraction", &R::probe_fraction, Bound::Positive, 0.1},
        {"sweep", "tie_break_rate", &R::tie_break_rate, Bound::NonNegative},
        {"sweep", "crosscheck_points", &R::crosscheck_points, Bound::NonNegative, 6.0},
        {"sweep", "crosscheck_nz", &R::crosscheck_nz, Bound::Positive},
        {"sweep", "fit_gate", &R::fit_gate, Bound::Unit},
        {"sweep", "settle", &R::settle, Bound::NonNegative},
        {"output", "trace", &R::trace},
        {"output", "trace_column", &R::trace_column},
        {"output", "fit_t0", &R::fit_t0},
        {"output", "fit_t1", &R::fit_t1},
        {"output", "noise", &R::noise, Bound::NonNegative},
    };
    return table;
}

std::string key_name(const KeySpec& k) { return std::string(k.section) + "." + std::string(k.name); }

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        throw InvalidArgument("expected a finite number, got '" + std::string(s) + "'");
    return v;
}

void check_bound(const KeySpec& k, double v) {
    const auto fail = [&](const std::string& what) {
        throw InvalidArgument(key_name(k) + " = " + format_number(v) + " out of range: " + what);
    };
    switch (k.bound) {
        case Bound::Positive:
            if (!(v > 0.0)) fail("must be > 0");
            break;
        case Bound::NonNegative:
            if (!(v >= 0.0)) fail("must be >= 0");
            break;
        case Bound::Unit:
            if (!(v > 0.0 && v <= 1.0)) fail("must be in (0, 1]");
            break;
        case Bound::None: break;
    }
    if (v > k.max) fail("must be <= " + format_number(k.max));
}

void assign(RunConfig& c, const KeySpec& k, std::string_view raw) {
    const std::string_view value = trim(raw);
    std::visit(
        [&](auto member) {
            using T = std::remove_reference_t<decltype(c.*member)>;
            if constexpr (std::is_same_v<T, double>) {
                const double v = parse_number(value);
                check_bound(k, v);
                c.*member = v;
            } else if constexpr (std::is_same_v<T, int>) {
                const double v = parse_number(value);
                if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument(key_name(k) + " must be an integer");
                check_bound(k, v);
                c.*member = static_cast<int>(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                if (value == "true" || value == "1") c.*member = true;
                else if (value == "false" || value == "0") c.*member = false;
                else throw InvalidArgument(key_name(k) + " must be true or false");
            } else if constexpr (std::is_same_v<T, std::string>) {
                c.*member = std::string(value);
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                std::vector<double> out;
                std::size_t pos = 0;
                while (pos <= value.size()) {
                    const auto comma = value.find(',', pos);
                    const auto item = value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos);
                    const double v = parse_number(item);
                    check_bound(k, v);
                    out.push_back(v);
                    if (comma == std::string_view::npos) break;
                    pos = comma + 1;
                }
                c.*member = std::move(out);
            } else if constexpr (std::is_same_v<T, SchemeVariant>) {
                c.*member = parse_scheme_variant(value);
            } else {
                c.*member = parse_pulse_shape(value);
            }
        },
        k.field);
}

std::string render(const RunConfig& c, const KeySpec& k) {
    return std::visit(
        [&](auto member) -> std::string {
            using T = std::remove_cvref_t<decltype(c.*member)>;
            if constexpr (std::is_same_v<T, double>) return format_number(c.*member);
            else if constexpr (std::is_same_v<T, int>) return std::to_string(c.*member);
            else if constexpr (std::is_same_v<T, bool>) return c.*member ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return c.*member;
            else if constexpr (std::is_same_v<T, std::vector<double>>) {
                std::string s;
                for (std::size_t i = 0; i < (c.*member).size(); ++i) {
                    if (i) s += ", ";
                    s += format_number((c.*member)[i]);
                }
                return s;
            } else if constexpr (std::is_same_v<T, SchemeVariant>) return std::string(to_string(c.*member));
            else return std::string(to_string(c.*member));
        },
        k.field);
}

void cross_checks(const RunConfig& c, const std::map<std::string, int>& lines) {
    const auto line_of = [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    if (c.alpha == 0.0 && c.beta == 0.0)
        throw ConfigError(std::max(line_of("schedule.alpha"), line_of("schedule.beta")),
                          "schedule.alpha and schedule.beta cannot both be zero");
    if (c.nz < 3) throw ConfigError(line_of("grid.nz"), "grid.nz must be >= 3");
    if (c.sweep_nz < 3) throw ConfigError(line_of("sweep.nz"), "sweep.nz must be >= 3");
    if (c.slow_nz < 3) throw ConfigError(line_of("sweep.slow_nz"), "sweep.slow_nz must be >= 3");
    if (c.scan_points < 2) throw ConfigError(line_of("sweep.scan_points"), "sweep.scan_points must be >= 2");
    if (c.b_values.empty()) throw ConfigError(line_of("sweep.b_values"), "sweep.b_values is empty");
    if (c.omega_values.size() < 3)
        throw ConfigError(line_of("sweep.omega_values"), "sweep.omega_values needs at least 3 values");
    if (c.fit_t0 >= 0.0 && c.fit_t1 >= 0.0 && c.fit_t1 <= c.fit_t0)
        throw ConfigError(line_of("output.fit_t1"), "output.fit_t1 must exceed output.fit_t0");
}

}  // namespace

void validate(const RunConfig& config) {
    RunConfig scratch = config;
    for (const auto& k : keys()) {
        try {
            assign(scratch, k, render(config, k));
        } catch (const InvalidArgument& e) {
            throw ConfigError(0, e.what());
        }
    }
    cross_checks(config, {});
}

RunConfig parse_config(std::string_view text, std::optional<Preset> preset_override) {
    struct Line {
        int number;
        std::string_view section;
        std::string_view key;
        std::string_view value;
    };
    std::vector<Line> entries;
    std::optional<Preset> preset;
    std::string_view section;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(number, "malformed section header '" + std::string(line) + "'");
            section = trim(line.substr(1, line.size() - 2));
            static const std::vector<std::string_view> known = {"scheme",   "medium", "drive", "schedule",
                                                               "grid",     "sweep",  "output"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError(number, "unknown section [" + std::string(section) + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(number, "expected 'key = value', got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(number, "missing key before '='");
        if (section.empty()) {
            if (key != "preset") throw ConfigError(number, "unknown top-level key '" + std::string(key) + "'");
            try {
                preset = parse_preset(value);
            } catch (const InvalidArgument& e) {
                throw ConfigError(number, e.what());
            }
            continue;
        }
        entries.push_back({number, section, key, value});
    }

    RunConfig c = preset_defaults(preset_override.value_or(preset.value_or(Preset::Paper)));
    std::map<std::string, int> lines;
    for (const auto& e : entries) {
        const auto it = std::find_if(keys().begin(), keys().end(),
                                     [&](const KeySpec& k) { return k.section == e.section && k.name == e.key; });
        if (it == keys().end())
            throw ConfigError(e.number, "unknown key '" + std::string(e.key) + "' in [" + std::string(e.section) + "]");
        try {
            assign(c, *it, e.value);
        } catch (const InvalidArgument& ex) {
            throw ConfigError(e.number, ex.what());
        }
        lines[key_name(*it)] = e.number;
    }
    cross_checks(c, lines);
    return c;
}

std::string serialize(const RunConfig& config) {
    std::ostringstream os;
    os << "preset = " << to_string(config.preset) << "\n";
    std::string_view section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            section = k.section;
            os << "\n[" << section << "]\n";
        }
        os << k.name << " = " << render(config, k) << "\n";
    }
    return os.str();
}

LevelScheme RunConfig::scheme() const { return build_scheme(variant, gamma, leakage); }

MediumParams RunConfig::medium() const { return {coupling_density, gamma_ground}; }

DriveConfig RunConfig::drive() const {
    DriveConfig d;
    d.omega_c = omega_c;
    d.one_photon_detuning = detuning;
    d.delta1 = delta1;
    d.delta2 = delta2;
    d.b_field = b_field;
    d.g_factor = g_factor;
    return d;
}

SignalPulse RunConfig::pulse() const {
    SignalPulse p;
    p.shape = pulse_shape;
    p.start = pulse_start;
    p.length = pulse_length;
    p.edge = pulse_edge;
    p.amplitude = signal_amplitude;
    return p;
}

StorageTiming RunConfig::timing() const { return {ramp, t_dark, read_scale}; }

InputSpinor RunConfig::spinor() const { return {alpha, beta, phase}; }

StorageSetup RunConfig::storage_setup(int threads) const {
    StorageSetup s;
    s.scheme = scheme();
    s.medium = medium();
    s.drive = drive();
    s.pulse = pulse();
    s.timing = timing();
    s.spinor = spinor();
    s.nz = nz;
    s.length = length;
    s.read_time = read_time;
    s.options.threads = threads;
    s.options.fit_gate = fit_gate;
    s.options.settle = settle;
    return s;
}

StorageSetup RunConfig::sweep_setup(int threads) const {
    StorageSetup s = storage_setup(threads);
    s.drive.omega_c = sweep_omega_c;
    s.timing.ramp = sweep_ramp;
    s.medium.coupling_density = coupling_density_for_delay(write_delay, sweep_omega_c, length);
    s.pulse.shape = PulseShape::RampCos;
    s.pulse.start = 0.0;
    s.pulse.length = sweep_pulse_length;
    s.pulse.edge = sweep_pulse_edge;
    s.timing.read_scale = sweep_read_scale;
    s.nz = sweep_nz;
    s.read_time = sweep_read_time;
    return s;
}

}  // namespace tripod
