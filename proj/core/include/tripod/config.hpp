#pragma once

#include "tripod/atomic_model.hpp"
#include "tripod/protocol.hpp"
#include "tripod/schedule.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tripod {

enum class Preset { Paper, Desk };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset p);

/// Fully resolved run configuration. Rates and Rabi frequencies in rad/us,
/// times in us, lengths in mm, fields in G.
struct RunConfig {
    Preset preset = Preset::Paper;

    // [scheme]
    SchemeVariant variant = SchemeVariant::Tripod4;
    double gamma = 0.0;
    bool leakage = false;

    // [medium]
    double coupling_density = 0.0;
    double gamma_ground = 0.0;
    double length = 50.0;

    // [drive]
    double omega_c = 0.0;
    double detuning = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double b_field = 0.15;
    double g_factor = 0.5;

    // [schedule]
    PulseShape pulse_shape = PulseShape::RampCos;
    double pulse_start = 0.0;
    double pulse_length = 20.0;
    double pulse_edge = 1.0;
    double signal_amplitude = 0.0;
    double alpha = 0.7071067811865476;
    double beta = 0.7071067811865476;
    double phase = 0.0;
    double ramp = 1.0;
    double t_dark = 10.0;
    double read_scale = 1.0;

    // [grid]
    int nz = 250;
    double read_time = 0.0;

    // [sweep]
    std::vector<double> b_values;
    double difference_mhz = 0.0;
    double write_delay = 0.0;
    double sweep_omega_c = 0.0;
    double sweep_ramp = 1.0;
    double sweep_pulse_length = 0.0;
    double sweep_pulse_edge = 0.0;
    double sweep_read_scale = 1.0;
    double sweep_read_time = 0.0;
    int sweep_nz = 0;
    bool converter_check = true;
    double converter_fraction = 0.25;
    std::vector<double> omega_values;
    double slow_pulse_fwhm = 5.0;
    int slow_nz = 250;
    int scan_points = 21;
    double scan_range = 0.0;
    double probe_fraction = 1e-4;
    double tie_break_rate = 0.0;
    int crosscheck_points = 3;
    int crosscheck_nz = 120;
    double fit_gate = 0.95;
    double settle = 1.0;

    // [output]
    std::string trace;
    std::string trace_column = "I_detected_rad2_per_us2";
    double fit_t0 = -1.0;
    double fit_t1 = -1.0;
    double noise = 0.0;

    bool operator==(const RunConfig&) const = default;

    LevelScheme scheme() const;
    MediumParams medium() const;
    DriveConfig drive() const;
    SignalPulse pulse() const;
    StorageTiming timing() const;
    InputSpinor spinor() const;
    /// Storage run described by [schedule] and [grid].
    StorageSetup storage_setup(int threads) const;
    /// Storage run used by the field sweep ([sweep] overrides).
    StorageSetup sweep_setup(int threads) const;
};

RunConfig preset_defaults(Preset p);

/// INI text to config. `preset_override` replaces any `preset =` line. Throws
/// ConfigError naming the line on syntax errors, unknown keys and range errors.
RunConfig parse_config(std::string_view text, std::optional<Preset> preset_override = std::nullopt);

/// Canonical INI text listing every key.
std::string serialize(const RunConfig& config);

/// Range checks shared by the parser. Throws ConfigError(0, ...).
void validate(const RunConfig& config);

}  // namespace tripod
