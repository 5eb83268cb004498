#pragma once

#include "tripod/analysis.hpp"
#include "tripod/atomic_model.hpp"
#include "tripod/polariton.hpp"
#include "tripod/propagation.hpp"
#include "tripod/schedule.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tripod {

/// Input mode weights. |alpha|^2 + |beta|^2 = 1 after normalisation; signal 2
/// carries the relative phase.
struct InputSpinor {
    double alpha = 0.7071067811865476;
    double beta = 0.7071067811865476;
    double relative_phase = 0.0;  ///< rad
};

/// Signal envelope template. For ramp_cos, `length` is the full width at half
/// maximum and the segment spans length + edge; for gauss it is the intensity
/// FWHM and the segment spans +-4 sigma; for rect it is the duration.
struct SignalPulse {
    PulseShape shape = PulseShape::RampCos;
    double start = 0.0;
    double length = 20.0;
    double edge = 1.0;
    double amplitude = 0.7;  ///< total Rabi amplitude, rad/us

    PulseSegment segment(double amplitude_scale, double phase) const;
    double end() const;
};

struct StorageTiming {
    double ramp = 1.0;
    double t_dark = 10.0;
    double read_scale = 1.0;
};

/// Signals shaped by `pulse` and split by `spinor`, no control segments.
PulseSchedule signal_schedule(const SignalPulse& pulse, const InputSpinor& spinor);

/// Same signals plus a storage block that switches the control off at the
/// falling edge of the pulse.
PulseSchedule storage_schedule(const SignalPulse& pulse, const StorageTiming& timing, const InputSpinor& spinor);

/// L / v_g - L / c for the tripod, us.
double tripod_delay(double coupling_density, double omega_c, double length);

/// G that gives the requested tripod delay.
double coupling_density_for_delay(double delay, double omega_c, double length);

/// Grid spanning the whole storage sequence plus `read_time` after the control
/// is back on (0 selects the time for a stored excitation to cross the medium).
Grid storage_grid(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                  const PulseSchedule& schedule, int nz, double length, double read_time);

struct PolaritonSample {
    double t = 0.0;
    double theta = 0.0;
    double norm = 0.0;         ///< polariton norm over c, same units as the input energy
    double bright_norm = 0.0;  ///< bright part over c
    double photonic_fraction = 0.0;
};

struct StorageResult {
    std::vector<double> times;
    /// Per-mode intensities, their sum, and the detected photodiode signal
    /// |Omega_1 e^{-i nu_1 t} + Omega_2 e^{-i nu_2 t}|^2.
    std::vector<double> in_s1, in_s2, in_total, in_detected;
    std::vector<double> out_s1, out_s2, out_total, out_detected;

    /// Spin wave at mid-dark time.
    double t_spinwave = 0.0;
    std::vector<double> z;
    std::vector<Complex> spin1, spin2;  ///< rho_{g0,g-}, rho_{g0,g+}
    std::vector<Complex> psi_plus, psi_minus;

    std::vector<PolaritonSample> polariton;

    Spinor spinor_in, spinor_stored, spinor_out;

    FitWindow window;
    std::optional<BeatFitResult> beat;
    std::string fit_error;
    /// Fitted fringe contrast when the fit is accepted, otherwise the projection
    /// onto the expected Delta m = 2 frequency.
    double visibility = 0.0;
    double visibility_projected = 0.0;
    double expected_beat_mhz = 0.0;

    double input_energy = 0.0;      ///< int |Omega_in|^2 dt summed over modes
    double leaked_energy = 0.0;     ///< output energy before the control returns
    double stored_energy = 0.0;     ///< 2G int |rho|^2 dz / c at mid-dark
    double retrieved_energy = 0.0;  ///< output energy after the control returns
    double efficiency = 0.0;        ///< retrieved / stored
    double total_efficiency = 0.0;  ///< retrieved / input
    double dark_field_ratio = 0.0;  ///< max in-medium signal during the dark time over peak input
    /// Same at mid-dark, after the excited-state coherence left by the ramp has decayed.
    double dark_field_mid_ratio = 0.0;

    double min_eigenvalue = 0.0;
    double max_trace_error = 0.0;
    std::vector<std::string> warnings;
};

struct StorageOptions {
    int threads = 1;
    /// Fit window: where the retrieved per-mode intensity sum is above this
    /// fraction of its maximum, starting no earlier than read-out + settle.
    double fit_gate = 0.95;
    double settle = 1.0;
};

/// Storage and retrieval of the pulse template on signal 1 of `schedule`, split
/// into the two modes by `spinor`. Throws InvalidArgument when the schedule has
/// no storage block or the pulse does not fit inside the medium.
StorageResult run_storage(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                          const PulseSchedule& schedule, const Grid& grid, const InputSpinor& spinor,
                          const StorageOptions& options = {});

/// Steady-state weak-probe transmission (Beer law over the medium length).
struct SteadyTransmission {
    double t1 = 0.0;
    double t2 = 0.0;
    double total = 0.0;
};

SteadyTransmission steady_transmission(const LevelScheme& scheme, const MediumParams& medium,
                                       const DriveConfig& drive, double probe, double length,
                                       double tie_break_rate);

/// Two-photon detuning at which the single-mode steady transmission falls to
/// half its resonant value, rad/us.
double eit_half_width(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive, double length,
                      double probe, double tie_break_rate);

struct ScanOptions {
    int points = 21;
    double range = 0.0;  ///< half range of both detuning axes, rad/us; 0 = 3 EIT half widths
    double probe_fraction = 1e-4;  ///< probe Rabi frequency over Omega_C
    double tie_break_rate = 0.0;   ///< 0 = max(gamma_ground, 1e-6 Gamma)
    int threads = 1;
    int crosscheck_points = 3;
    int crosscheck_nz = 120;
};

struct ScanPoint {
    double delta1 = 0.0;
    double delta2 = 0.0;
    SteadyTransmission t;
    bool ok = false;
    std::string error;
};

struct CrossCheck {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double steady_total = 0.0;
    double propagated_total = 0.0;
};

struct TransmissionMap {
    std::vector<double> axis;  ///< shared by delta1 and delta2
    std::vector<ScanPoint> points;  ///< row-major, index i1 * n + i2
    std::vector<CrossCheck> checks;
    double eit_half_width = 0.0;
    double probe = 0.0;
    double tie_break_rate = 0.0;

    const ScanPoint& at(int i1, int i2) const { return points[static_cast<std::size_t>(i1) * axis.size() + i2]; }
};

TransmissionMap scan_transmission(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive_base,
                                  double length, const ScanOptions& options);

struct StorageSetup {
    LevelScheme scheme;
    MediumParams medium;
    DriveConfig drive;
    SignalPulse pulse;
    StorageTiming timing;
    InputSpinor spinor;
    int nz = 250;
    double length = 50.0;
    double read_time = 0.0;
    StorageOptions options;
};

StorageResult run_storage(const StorageSetup& setup);

struct SweepOptions {
    std::vector<double> b_values;
    /// Input signal difference frequency nu_1 - nu_2, MHz. The common two-photon
    /// detuning is zero: delta_1 = -delta_2 = Z - pi * difference.
    double difference_mhz = 0.0;
    /// Transparency bound for the detunings, rad/us (0 skips the check).
    double eit_half_width = 0.0;
    int threads = 1;
};

struct SweepPoint {
    double b = 0.0;
    double difference_mhz = 0.0;
    double expected_mhz = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::optional<BeatFitResult> fit;
    std::string error;
    double efficiency = 0.0;
    double visibility = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<LinFit> linfit;
    std::string linfit_error;
    double difference_mhz = 0.0;
};

/// Storage at each field with unchanged input frequencies; fits every retrieved
/// beat and the beat-versus-field line. Per-point failures are recorded.
SweepResult sweep_field(const StorageSetup& base, const SweepOptions& options);

/// Storage at a single field for several input difference frequencies, MHz.
std::vector<SweepPoint> converter_scan(const StorageSetup& base, double b, const std::vector<double>& difference_mhz,
                                       int threads);

struct SlowLightPoint {
    double omega_c = 0.0;
    double delay = 0.0;
    double delay_s1 = 0.0;
    double delay_s2 = 0.0;
    double predicted = 0.0;         ///< tripod: G L / (2 c Omega_C^2)
    double predicted_lambda = 0.0;  ///< single Lambda system: G L / (c Omega_C^2)
    double transmission = 0.0;
};

struct SlowLightResult {
    std::vector<SlowLightPoint> points;
    /// delay versus 1 / Omega_C^2.
    LinFit fit;
    double predicted_slope = 0.0;
    double lambda_slope = 0.0;
    /// (lambda_slope - fitted slope) / slope error.
    double lambda_separation_sigma = 0.0;
};

SlowLightResult slowlight_sweep(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                                const SignalPulse& pulse, const InputSpinor& spinor,
                                const std::vector<double>& omega_values, int nz, double length, int threads);

/// Runs jobs [0, count) on up to `threads` workers; results are indexed, so the
/// output order never depends on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

}  // namespace tripod
