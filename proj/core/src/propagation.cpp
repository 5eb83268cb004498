#include "tripod/propagation.hpp"

#include "tripod/errors.hpp"
#include "tripod/lindblad_kernel.hpp"
#include "tripod/units.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace tripod {

void Grid::validate() const {
    if (nz < 2) throw InvalidArgument("grid needs nz >= 2");
    if (nt < 2) throw InvalidArgument("grid needs nt >= 2");
    if (!(length > 0.0)) throw InvalidArgument("grid length must be positive");
    if (!(t_max > 0.0)) throw InvalidArgument("grid t_max must be positive");
}

namespace {

struct StaticCoupling {
    int upper;
    int lower;
    int field;
    double weight;
    double residual;
    bool source;
};

// Per-stage coefficients shared by every cell: coupling = factor * field value,
// with the control value already folded in.
struct StageFactors {
    std::array<Complex, kMaxCouplings> factor{};
};

double hermitian_norm(const HamiltonianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<HamiltonianMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double peak_hamiltonian_norm(const LevelScheme& scheme, const DriveConfig& drive, const PulseSchedule& schedule) {
    DriveConfig d = drive;
    d.omega_c = schedule.field(FieldId::Control).empty() ? std::abs(drive.omega_c)
                                                         : schedule.peak_amplitude(FieldId::Control);
    if (schedule.storage) d.omega_c *= std::max(1.0, schedule.storage->read_scale);
    SignalRabi s{schedule.peak_amplitude(FieldId::Signal1), schedule.peak_amplitude(FieldId::Signal2)};
    return hermitian_norm(build_hamiltonian(scheme, d, s));
}

int required_time_steps(const LevelScheme& scheme, const DriveConfig& drive, const PulseSchedule& schedule,
                        double t_max, double step_bound) {
    const double rate = std::max(peak_hamiltonian_norm(scheme, drive, schedule), scheme.decay_rate);
    double dt = step_bound / rate;
    const double ramp = schedule.shortest_ramp();
    if (std::isfinite(ramp)) dt = std::min(dt, ramp / 20.0);
    return static_cast<int>(std::ceil(t_max / dt)) + 1;
}

FieldRecord propagate(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                      const PulseSchedule& schedule, const Grid& grid, const PropagateOptions& options) {
    grid.validate();
    schedule.validate();
    if (medium.coupling_density < 0.0) throw InvalidArgument("coupling density must be nonnegative");
    if (options.threads < 1) throw InvalidArgument("threads must be >= 1");
    const int dim = scheme.size();
    if (dim > kMaxLevels) throw InvalidArgument("scheme too large for the propagation kernel");

    const double dt = grid.dt();
    const double dz = grid.dz();
    if (options.check_preconditions) {
        const double rate = std::max(peak_hamiltonian_norm(scheme, drive, schedule), scheme.decay_rate);
        if (dt * rate > options.step_bound * (1.0 + 1e-9))
            throw InvalidArgument("time step too large: dt * max(|H|, Gamma) = " + std::to_string(dt * rate) +
                                  " exceeds " + std::to_string(options.step_bound) + "; need nt >= " +
                                  std::to_string(required_time_steps(scheme, drive, schedule, grid.t_max,
                                                                     options.step_bound)));
        const double ramp = schedule.shortest_ramp();
        if (std::isfinite(ramp) && ramp / dt < 20.0 * (1.0 - 1e-9))
            throw InvalidArgument("time grid resolves the shortest ramp with fewer than 20 steps");
    }

    // Control segments, when present, replace the constant drive.omega_c.
    const bool control_from_schedule = !schedule.field(FieldId::Control).empty();
    const auto control_at = [&](double t) -> Complex {
        if (control_from_schedule) return schedule.value(FieldId::Control, t);
        Complex c{drive.omega_c, 0.0};
        if (schedule.storage) c *= schedule.storage->factor(t);
        return c;
    };

    const auto frame = rotating_frame(scheme, drive);
    std::vector<StaticCoupling> couplings;
    for (std::size_t i = 0; i < scheme.transitions.size(); ++i) {
        const auto& tr = scheme.transitions[i];
        if (tr.weight == 0.0) continue;
        couplings.push_back({tr.upper, tr.lower, static_cast<int>(tr.field), tr.weight, frame.residual[i],
                             !tr.leakage && tr.field != FieldId::Control});
    }
    if (static_cast<int>(couplings.size()) > kMaxCouplings) throw InvalidArgument("too many couplings");
    const int nc = static_cast<int>(couplings.size());

    const auto jumps = lindblad_dissipators(scheme, medium.gamma_ground);
    const LindbladKernel kernel(dim, jumps);

    const int nz = grid.nz;
    const int nt = grid.nt;
    const int d2 = dim * dim;
    std::vector<Complex> rho(static_cast<std::size_t>(nz) * d2);
    {
        const DensityMatrix vac = polariton_vacuum(scheme);
        for (int k = 0; k < nz; ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) rho[static_cast<std::size_t>(k) * d2 + i * dim + j] = vac(i, j);
    }

    // Signal envelopes along z at the current step; index [signal][k].
    std::array<std::vector<Complex>, 2> field{std::vector<Complex>(nz), std::vector<Complex>(nz)};
    std::array<std::vector<Complex>, 2> source{std::vector<Complex>(nz), std::vector<Complex>(nz)};
    const double kappa = medium.coupling_density / units::speed_of_light;

    const double peak_signal =
        std::max(schedule.peak_amplitude(FieldId::Signal1), schedule.peak_amplitude(FieldId::Signal2));

    FieldRecord rec;
    rec.grid = grid;
    rec.coupling_density = medium.coupling_density;
    rec.times.resize(nt);
    for (auto& v : rec.input) v.resize(nt);
    for (auto& v : rec.output) v.resize(nt);
    rec.control.resize(nt);

    std::vector<int> snapshot_steps;
    for (double ts : options.snapshot_times) {
        if (ts < 0.0 || ts > grid.t_max) throw InvalidArgument("snapshot time outside the grid");
        snapshot_steps.push_back(static_cast<int>(std::lround(ts / dt)));
    }

    const auto boundary = [&](double t) {
        return std::array<Complex, 2>{schedule.value(FieldId::Signal1, t), schedule.value(FieldId::Signal2, t)};
    };

    const auto stage_factors = [&](double t) {
        StageFactors s;
        const Complex c = control_at(t);
        for (int i = 0; i < nc; ++i) {
            const auto& cp = couplings[i];
            Complex f = -cp.weight * std::polar(1.0, -cp.residual * t);
            if (cp.field == 0) f *= c;
            s.factor[i] = f;
        }
        return s;
    };

    const auto build = [&](const StageFactors& s, Complex s1, Complex s2) {
        SparseHamiltonian h;
        h.dim = dim;
        for (int i = 0; i < dim; ++i) h.diagonal[i] = frame.diagonal[i];
        for (int i = 0; i < nc; ++i) {
            const auto& cp = couplings[i];
            const Complex v = cp.field == 0 ? s.factor[i] : s.factor[i] * (cp.field == 1 ? s1 : s2);
            h.couplings[h.coupling_count++] = {cp.upper, cp.lower, v};
        }
        return h;
    };

    // Phases e^{+i r t} that bring the coherences back to each field's frame.
    const auto compute_sources = [&](int k, double t) {
        const Complex* r = &rho[static_cast<std::size_t>(k) * d2];
        Complex acc[2] = {};
        for (int i = 0; i < nc; ++i) {
            const auto& cp = couplings[i];
            if (!cp.source) continue;
            Complex v = cp.weight * r[cp.upper * dim + cp.lower];
            if (cp.residual != 0.0) v *= std::polar(1.0, cp.residual * t);
            acc[cp.field - 1] += v;
        }
        source[0][k] = Complex(0.0, kappa) * acc[0];
        source[1][k] = Complex(0.0, kappa) * acc[1];
    };

    const auto record_step = [&](int n) {
        const double t = grid.time(n);
        rec.times[n] = t;
        rec.control[n] = control_at(t);
        for (int s = 0; s < 2; ++s) {
            rec.input[s][n] = field[s][0];
            rec.output[s][n] = field[s][nz - 1];
        }
        if (options.history_stride > 0 && n % options.history_stride == 0)
            rec.history.push_back({t, rec.control[n], field[0], field[1]});
        for (int ss : snapshot_steps) {
            if (ss != n) continue;
            AtomSnapshot snap{t, rec.control[n], field[0], field[1], {}};
            snap.rho.reserve(nz);
            for (int k = 0; k < nz; ++k) {
                DensityMatrix m(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) m(i, j) = rho[static_cast<std::size_t>(k) * d2 + i * dim + j];
                snap.rho.push_back(std::move(m));
            }
            rec.snapshots.push_back(std::move(snap));
        }
    };

    double min_eig = 1.0;
    double max_trace = 0.0;
    double max_herm = 0.0;
    const auto audit = [&](int n) {
        for (int k = 0; k < nz; ++k) {
            DensityMatrix m(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) m(i, j) = rho[static_cast<std::size_t>(k) * d2 + i * dim + j];
            const double lo = min_eigenvalue(m);
            min_eig = std::min(min_eig, lo);
            max_trace = std::max(max_trace, std::abs(m.trace() - 1.0));
            max_herm = std::max(max_herm, hermiticity_error(m));
            if (lo < -1e-6 || !std::isfinite(lo))
                throw NumericalError("density matrix lost positivity at cell " + std::to_string(k) + ", t = " +
                                     std::to_string(grid.time(n)) + " us (eigenvalue " + std::to_string(lo) + ")");
        }
    };

    // Fields at z for the current step from the sources: trapezoidal march in a fixed order.
    const auto integrate_fields = [&](int n) {
        const auto b = boundary(grid.time(n));
        for (int s = 0; s < 2; ++s) {
            field[s][0] = b[s];
            for (int k = 1; k < nz; ++k) {
                const Complex delta = 0.5 * dz * (source[s][k - 1] + source[s][k]);
                if (peak_signal > 0.0 && std::abs(delta) > options.cfl_limit * peak_signal)
                    throw NumericalError("field change per z-step exceeds " +
                                         std::to_string(options.cfl_limit) +
                                         " of the peak signal amplitude; increase nz (t = " +
                                         std::to_string(grid.time(n)) + " us)");
                field[s][k] = field[s][k - 1] + delta;
            }
            for (int k = 0; k < nz; ++k)
                if (!std::isfinite(field[s][k].real()) || !std::isfinite(field[s][k].imag()))
                    throw NumericalError("non-finite signal field at t = " + std::to_string(grid.time(n)) + " us");
        }
    };

    // Initial fields: atoms in the vacuum have no optical coherence.
    for (int k = 0; k < nz; ++k) compute_sources(k, 0.0);
    integrate_fields(0);
    record_step(0);

    StageFactors st0, st1, st2;
    const auto advance_cells = [&](int n, int k_begin, int k_end) {
        const double t = grid.time(n);
        for (int k = k_begin; k < k_end; ++k) {
            Complex* r = &rho[static_cast<std::size_t>(k) * d2];
            if (k == 0) {
                const auto b0 = boundary(t);
                const auto b1 = boundary(t + 0.5 * dt);
                const auto b2 = boundary(t + dt);
                kernel.rk4_step(r, build(st0, b0[0], b0[1]), build(st1, b1[0], b1[1]), build(st2, b2[0], b2[1]),
                                dt);
            } else {
                const Complex s1 = field[0][k];
                const Complex s2 = field[1][k];
                kernel.rk4_step(r, build(st0, s1, s2), build(st1, s1, s2), build(st2, s1, s2), dt);
            }
            compute_sources(k, t + dt);
        }
    };
    const auto serial_phase = [&](int n) {
        integrate_fields(n + 1);
        const double t_next = grid.time(n + 1);
        if (t_next >= options.watch_t0 && t_next <= options.watch_t1)
            for (int s = 0; s < 2; ++s)
                for (int k = 0; k < nz; ++k) rec.watch_max_field = std::max(rec.watch_max_field, std::abs(field[s][k]));
        record_step(n + 1);
        if (options.audit_stride > 0 && ((n + 1) % options.audit_stride == 0 || n + 1 == nt - 1)) audit(n + 1);
    };
    const auto prepare = [&](int n) {
        const double t = grid.time(n);
        st0 = stage_factors(t);
        st1 = stage_factors(t + 0.5 * dt);
        st2 = stage_factors(t + dt);
    };

    const int threads = std::min(options.threads, nz);
    if (threads == 1) {
        for (int n = 0; n + 1 < nt; ++n) {
            prepare(n);
            advance_cells(n, 0, nz);
            serial_phase(n);
        }
    } else {
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        const auto capture = [&] {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
        };
        std::barrier sync(threads);
        const auto worker = [&](int w) {
            const int k_begin = static_cast<int>(static_cast<long long>(nz) * w / threads);
            const int k_end = static_cast<int>(static_cast<long long>(nz) * (w + 1) / threads);
            for (int n = 0; n + 1 < nt; ++n) {
                if (w == 0 && !failed.load()) {
                    try {
                        prepare(n);
                    } catch (...) {
                        capture();
                    }
                }
                sync.arrive_and_wait();
                if (failed.load()) return;
                try {
                    advance_cells(n, k_begin, k_end);
                } catch (...) {
                    capture();
                }
                sync.arrive_and_wait();
                if (failed.load()) return;
                if (w == 0) {
                    try {
                        serial_phase(n);
                    } catch (...) {
                        capture();
                    }
                }
            }
        };
        std::vector<std::jthread> pool;
        for (int w = 1; w < threads; ++w) pool.emplace_back(worker, w);
        worker(0);
        pool.clear();
        if (error) std::rethrow_exception(error);
    }

    rec.min_eigenvalue = min_eig;
    rec.max_trace_error = max_trace;
    rec.max_hermiticity_error = max_herm;
    return rec;
}

namespace {

std::vector<double> intensity_of(const std::array<std::vector<Complex>, 2>& tr, SignalSelect which) {
    const std::size_t n = tr[0].size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (which) {
            case SignalSelect::S1: out[i] = std::norm(tr[0][i]); break;
            case SignalSelect::S2: out[i] = std::norm(tr[1][i]); break;
            case SignalSelect::Total: out[i] = std::norm(tr[0][i]) + std::norm(tr[1][i]); break;
        }
    }
    return out;
}

double trapezoid(const std::vector<double>& y, double dt) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * dt;
}

double first_moment(const std::vector<double>& y, const std::vector<double>& t) {
    double s = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double w = (i == 0 || i + 1 == y.size()) ? 0.5 : 1.0;
        s += w * y[i];
        m += w * y[i] * t[i];
    }
    return m / s;
}

}  // namespace

std::vector<double> intensity(const FieldRecord& record, SignalSelect which, bool output) {
    return intensity_of(output ? record.output : record.input, which);
}

double measure_delay(const FieldRecord& record, SignalSelect which) {
    const auto in = intensity(record, which, false);
    const auto out = intensity(record, which, true);
    const double dt = record.grid.dt();
    const double e_in = trapezoid(in, dt);
    const double e_out = trapezoid(out, dt);
    if (!(e_in > 0.0)) throw InvalidArgument("no input pulse: zero input energy");
    if (!(e_out > 1e-12 * e_in)) throw NumericalError("no output pulse found: energy below threshold");
    return first_moment(out, record.times) - first_moment(in, record.times);
}

double transmission(const FieldRecord& record, SignalSelect which) {
    const double dt = record.grid.dt();
    const double e_in = trapezoid(intensity(record, which, false), dt);
    if (!(e_in > 0.0)) throw InvalidArgument("zero input energy");
    return trapezoid(intensity(record, which, true), dt) / e_in;
}

}  // namespace tripod
