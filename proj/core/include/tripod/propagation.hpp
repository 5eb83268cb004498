#pragma once

#include "tripod/atomic_model.hpp"
#include "tripod/dynamics.hpp"
#include "tripod/schedule.hpp"

#include <array>
#include <vector>

namespace tripod {

/// Co-moving (retarded time) grid: z in [0, length], tau in [0, t_max].
struct Grid {
    int nz = 2;
    double length = 50.0;  ///< mm
    int nt = 2;
    double t_max = 1.0;  ///< us

    double dz() const { return length / (nz - 1); }
    double dt() const { return t_max / (nt - 1); }
    double time(int n) const { return n * dt(); }
    double position(int k) const { return k * dz(); }
    void validate() const;
};

struct MediumParams {
    double coupling_density = 0.0;  ///< G = g^2 N, rad^2/us^2 (only the product enters propagation)
    double gamma_ground = 0.0;      ///< ground-state dephasing, rad/us
};

struct PropagateOptions {
    int threads = 1;
    /// Record all signal fields along z every `history_stride` steps (0 = never).
    int history_stride = 0;
    /// Record per-cell density matrices at these times (nearest grid step).
    std::vector<double> snapshot_times;
    /// Full positivity / trace audit every this many steps.
    int audit_stride = 256;
    /// Relative field change per z-step that triggers rejection.
    double cfl_limit = 0.2;
    /// Enforce dt * max(|H|, Gamma) <= step_bound and >= 20 steps per ramp.
    double step_bound = 0.05;
    bool check_preconditions = true;
    /// Track the largest signal magnitude anywhere in the medium over [watch_t0, watch_t1].
    double watch_t0 = -1.0;
    double watch_t1 = -1.0;
};

struct FieldProfile {
    double t = 0.0;
    Complex control{};
    std::vector<Complex> s1, s2;
};

struct AtomSnapshot {
    double t = 0.0;
    Complex control{};
    std::vector<Complex> s1, s2;
    std::vector<DensityMatrix> rho;
};

struct FieldRecord {
    Grid grid;
    double coupling_density = 0.0;
    std::vector<double> times;
    /// Signal envelopes at z = 0 and z = L, indexed [signal 0/1][time].
    std::array<std::vector<Complex>, 2> input, output;
    std::vector<Complex> control;
    std::vector<FieldProfile> history;
    std::vector<AtomSnapshot> snapshots;
    double min_eigenvalue = 0.0;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    /// Largest |Omega_1|, |Omega_2| over all cells inside the watch interval.
    double watch_max_field = 0.0;
};

enum class SignalSelect { S1, S2, Total };

/// Signal envelopes obtained by marching in tau: every cell's density matrix is
/// advanced one RK4 step with the local fields, then the signals are integrated
/// along z with d Omega_i / dz = i (G / c) rho_{e, g_i} (trapezoidal rule).
/// The control is imposed, undepleted.
FieldRecord propagate(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                      const PulseSchedule& schedule, const Grid& grid, const PropagateOptions& options = {});

/// Largest spectral norm of the rotating-frame Hamiltonian over the peak drive values.
double peak_hamiltonian_norm(const LevelScheme& scheme, const DriveConfig& drive, const PulseSchedule& schedule);

/// Smallest nt that satisfies the step bound and resolves every ramp with 20 steps.
int required_time_steps(const LevelScheme& scheme, const DriveConfig& drive, const PulseSchedule& schedule,
                        double t_max, double step_bound = 0.05);

/// Output intensity centroid minus input intensity centroid, us.
double measure_delay(const FieldRecord& record, SignalSelect which);

/// Output energy over input energy.
double transmission(const FieldRecord& record, SignalSelect which);

/// Intensity trace |Omega|^2 of the selected signal(s) at the input or output face.
std::vector<double> intensity(const FieldRecord& record, SignalSelect which, bool output);

}  // namespace tripod
