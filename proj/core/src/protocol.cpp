#include "tripod/protocol.hpp"

#include "tripod/dynamics.hpp"
#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace tripod {

namespace {

double trapezoid(const std::vector<double>& y, double h, std::size_t begin, std::size_t end) {
    if (end <= begin + 1) return 0.0;
    double s = 0.5 * (y[begin] + y[end - 1]);
    for (std::size_t i = begin + 1; i + 1 < end; ++i) s += y[i];
    return s * h;
}

double trapezoid(const std::vector<double>& y, double h) { return trapezoid(y, h, 0, y.size()); }

double gauss_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(std::log(2.0))); }

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
    if (count <= 0) return;
    const int workers = std::clamp(threads, 1, count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<int> next{0};
        const auto run = [&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(run);
        run();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

PulseSegment SignalPulse::segment(double amplitude_scale, double phase) const {
    PulseSegment seg;
    seg.shape = shape;
    seg.t_start = start;
    seg.t_end = end();
    seg.amplitude = amplitude * amplitude_scale;
    seg.phase = phase;
    seg.width = shape == PulseShape::Gauss ? gauss_sigma(length) : edge;
    return seg;
}

double SignalPulse::end() const {
    switch (shape) {
        case PulseShape::RampCos: return start + length + edge;
        case PulseShape::Gauss: return start + 8.0 * gauss_sigma(length);
        case PulseShape::Rect: return start + length;
    }
    return start + length;
}

namespace {

std::pair<double, double> normalised(const InputSpinor& s) {
    const double n = std::hypot(s.alpha, s.beta);
    if (!(n > 0.0) || s.alpha < 0.0 || s.beta < 0.0)
        throw InvalidArgument("input spinor needs nonnegative alpha, beta with alpha^2 + beta^2 > 0");
    return {s.alpha / n, s.beta / n};
}

}  // namespace

PulseSchedule signal_schedule(const SignalPulse& pulse, const InputSpinor& spinor) {
    const auto [a, b] = normalised(spinor);
    PulseSchedule s;
    if (a > 0.0) s.field(FieldId::Signal1).push_back(pulse.segment(a, 0.0));
    if (b > 0.0) s.field(FieldId::Signal2).push_back(pulse.segment(b, spinor.relative_phase));
    return s;
}

PulseSchedule storage_schedule(const SignalPulse& pulse, const StorageTiming& timing, const InputSpinor& spinor) {
    PulseSchedule s = signal_schedule(pulse, spinor);
    s.storage = StorageBlock{pulse.end(), timing.ramp, timing.t_dark, timing.read_scale};
    return s;
}

double tripod_delay(double coupling_density, double omega_c, double length) {
    if (!(omega_c > 0.0)) throw InvalidArgument("control Rabi frequency must be positive");
    return coupling_density * length / (2.0 * units::speed_of_light * omega_c * omega_c);
}

double coupling_density_for_delay(double delay, double omega_c, double length) {
    if (!(length > 0.0)) throw InvalidArgument("medium length must be positive");
    return 2.0 * units::speed_of_light * omega_c * omega_c * delay / length;
}

Grid storage_grid(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                  const PulseSchedule& schedule, int nz, double length, double read_time) {
    if (!schedule.storage) throw InvalidArgument("storage grid needs a storage block");
    const auto& sb = *schedule.storage;
    if (read_time <= 0.0)
        read_time = tripod_delay(medium.coupling_density, drive.omega_c * sb.read_scale, length) + 2.0 * sb.ramp_dur;
    Grid g;
    g.nz = nz;
    g.length = length;
    g.t_max = sb.read_start() + read_time;
    g.nt = required_time_steps(scheme, drive, schedule, g.t_max);
    return g;
}

StorageResult run_storage(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                          const PulseSchedule& schedule_in, const Grid& grid, const InputSpinor& spinor,
                          const StorageOptions& options) {
    if (!schedule_in.storage) throw InvalidArgument("run_storage needs a schedule with a storage block");
    const auto& tmpl = schedule_in.field(FieldId::Signal1);
    if (tmpl.empty()) throw InvalidArgument("run_storage needs a signal template on signal 1");
    if (!schedule_in.field(FieldId::Signal2).empty())
        throw InvalidArgument("run_storage builds signal 2 from the spinor; leave it empty");
    const auto& sb = *schedule_in.storage;

    const auto [a, b] = normalised(spinor);
    PulseSchedule schedule;
    schedule.storage = sb;
    schedule.field(FieldId::Control) = schedule_in.field(FieldId::Control);
    double p_start = tmpl.front().t_start, p_end = tmpl.front().t_end;
    for (const auto& seg : tmpl) {
        p_start = std::min(p_start, seg.t_start);
        p_end = std::max(p_end, seg.t_end);
        PulseSegment s1 = seg, s2 = seg;
        s1.amplitude *= a;
        s2.amplitude *= b;
        s2.phase += spinor.relative_phase;
        if (a > 0.0) schedule.field(FieldId::Signal1).push_back(s1);
        if (b > 0.0) schedule.field(FieldId::Signal2).push_back(s2);
    }
    if (p_end > sb.t_off + 1e-9) throw InvalidArgument("signal pulse extends past the control switch-off");

    StorageResult res;
    const double vg = group_velocity(medium.coupling_density, drive.omega_c);
    const double extent = vg * (p_end - p_start);
    if (extent > grid.length) {
        const double needed =
            2.0 * drive.omega_c * drive.omega_c * (units::speed_of_light * (p_end - p_start) / grid.length - 1.0);
        throw InvalidArgument("signal pulse does not fit in the medium: spatial extent " + format_double(extent) +
                              " mm exceeds " + format_double(grid.length) + " mm; compress by " +
                              format_double(extent / grid.length) + " (coupling_density >= " + format_double(needed) +
                              ")");
    }
    if (sb.ramp_dur * std::abs(drive.omega_c) < 10.0)
        res.warnings.push_back("non-adiabatic ramp: ramp_dur * omega_c = " +
                               format_double(sb.ramp_dur * std::abs(drive.omega_c)) + " < 10");
    if (grid.t_max <= sb.read_start()) throw InvalidArgument("grid ends before the read-out");

    const double t_mid = 0.5 * (sb.dark_start() + sb.t_on());
    PropagateOptions po;
    po.threads = options.threads;
    po.snapshot_times = {sb.t_off, sb.t_off + 0.5 * sb.ramp_dur, sb.dark_start(), t_mid, sb.t_on()};
    po.watch_t0 = sb.dark_start();
    po.watch_t1 = sb.t_on();
    const FieldRecord rec = propagate(scheme, medium, drive, schedule, grid, po);
    res.min_eigenvalue = rec.min_eigenvalue;
    res.max_trace_error = rec.max_trace_error;

    const auto offsets = drive.field_offsets();
    const std::size_t nt = rec.times.size();
    const double dt = grid.dt();
    res.times = rec.times;
    res.in_s1 = intensity(rec, SignalSelect::S1, false);
    res.in_s2 = intensity(rec, SignalSelect::S2, false);
    res.in_total = intensity(rec, SignalSelect::Total, false);
    res.out_s1 = intensity(rec, SignalSelect::S1, true);
    res.out_s2 = intensity(rec, SignalSelect::S2, true);
    res.out_total = intensity(rec, SignalSelect::Total, true);
    res.in_detected.resize(nt);
    res.out_detected.resize(nt);
    for (std::size_t n = 0; n < nt; ++n) {
        const double t = rec.times[n];
        const Complex p1 = std::polar(1.0, -offsets[1] * t);
        const Complex p2 = std::polar(1.0, -offsets[2] * t);
        res.in_detected[n] = std::norm(rec.input[0][n] * p1 + rec.input[1][n] * p2);
        res.out_detected[n] = std::norm(rec.output[0][n] * p1 + rec.output[1][n] * p2);
    }

    std::size_t n_on = 0;
    while (n_on < nt && rec.times[n_on] < sb.t_on()) ++n_on;
    res.input_energy = trapezoid(res.in_total, dt);
    res.leaked_energy = trapezoid(res.out_total, dt, 0, std::min(n_on + 1, nt));
    res.retrieved_energy = trapezoid(res.out_total, dt, n_on, nt);

    const double c = units::speed_of_light;
    const double dz = grid.dz();
    for (const auto& snap : rec.snapshots) {
        const double theta = mixing_angle_from_density(medium.coupling_density, std::abs(snap.control)).theta;
        const FieldSpinPair fs = field_spin_pair(scheme, snap, medium.coupling_density);
        const PolaritonModes modes = decompose(fs, theta);
        PolaritonSample ps;
        ps.t = snap.t;
        ps.theta = theta;
        ps.norm = polariton_norm(modes, dz) / c;
        ps.bright_norm = bright_norm(modes, dz) / c;
        FieldSpinPair photonic = fs;
        std::fill(photonic.spin1.begin(), photonic.spin1.end(), Complex{});
        std::fill(photonic.spin2.begin(), photonic.spin2.end(), Complex{});
        const double field_part = polariton_norm(decompose(photonic, 0.0), dz);
        FieldSpinPair spin = fs;
        std::fill(spin.field1.begin(), spin.field1.end(), Complex{});
        std::fill(spin.field2.begin(), spin.field2.end(), Complex{});
        const double spin_part = polariton_norm(decompose(spin, units::pi / 2), dz);
        ps.photonic_fraction = field_part + spin_part > 0.0 ? field_part / (field_part + spin_part) : 0.0;
        res.polariton.push_back(ps);

        if (std::abs(snap.t - t_mid) <= 0.5 * dt + 1e-12) {
            res.t_spinwave = snap.t;
            res.z.resize(snap.rho.size());
            for (std::size_t k = 0; k < res.z.size(); ++k) res.z[k] = grid.position(static_cast<int>(k));
            const double scale = medium.coupling_density > 0.0 ? 1.0 / std::sqrt(2.0 * medium.coupling_density) : 0.0;
            res.spin1.resize(fs.spin1.size());
            res.spin2.resize(fs.spin2.size());
            for (std::size_t k = 0; k < fs.spin1.size(); ++k) {
                res.spin1[k] = fs.spin1[k] * scale;
                res.spin2[k] = fs.spin2[k] * scale;
            }
            res.psi_plus = modes.psi_plus;
            res.psi_minus = modes.psi_minus;
            res.stored_energy = spin_part / c;
            if (spin_part > 0.0) res.spinor_stored = spinor_amplitudes(modes.psi_plus, modes.psi_minus, dz);
        }
    }
    res.efficiency = res.stored_energy > 0.0 ? res.retrieved_energy / res.stored_energy : 0.0;
    res.total_efficiency = res.input_energy > 0.0 ? res.retrieved_energy / res.input_energy : 0.0;

    double peak_in = 0.0;
    for (std::size_t n = 0; n < nt; ++n)
        peak_in = std::max({peak_in, std::abs(rec.input[0][n]), std::abs(rec.input[1][n])});
    res.dark_field_ratio = peak_in > 0.0 ? rec.watch_max_field / peak_in : 0.0;
    for (const auto& snap : rec.snapshots) {
        if (std::abs(snap.t - t_mid) > 0.5 * dt + 1e-12 || !(peak_in > 0.0)) continue;
        double m = 0.0;
        for (std::size_t k = 0; k < snap.s1.size(); ++k) m = std::max({m, std::abs(snap.s1[k]), std::abs(snap.s2[k])});
        res.dark_field_mid_ratio = m / peak_in;
    }

    if (res.input_energy > 0.0) res.spinor_in = spinor_amplitudes(rec.input[0], rec.input[1], dt);
    if (res.retrieved_energy > 0.0) {
        const std::vector<Complex> o1(rec.output[0].begin() + static_cast<std::ptrdiff_t>(n_on), rec.output[0].end());
        const std::vector<Complex> o2(rec.output[1].begin() + static_cast<std::ptrdiff_t>(n_on), rec.output[1].end());
        res.spinor_out = spinor_amplitudes(o1, o2, dt);
    }

    res.expected_beat_mhz = units::delta_m2_beat_mhz(drive.b_field, drive.g_factor);
    double env_max = 0.0;
    for (std::size_t n = 0; n < nt; ++n)
        if (rec.times[n] >= sb.read_start()) env_max = std::max(env_max, res.out_total[n]);
    double w0 = -1.0, w1 = -1.0;
    for (std::size_t n = 0; n < nt; ++n) {
        if (rec.times[n] < sb.read_start() + options.settle) continue;
        if (res.out_total[n] >= options.fit_gate * env_max && env_max > 0.0) {
            if (w0 < 0.0) w0 = rec.times[n];
            w1 = rec.times[n];
        }
    }
    if (w0 < 0.0 || !(w1 > w0)) {
        res.fit_error = "no retrieved pulse above the fit gate";
        return res;
    }
    res.window = {w0, w1};
    try {
        res.beat = fit_beat(res.times, res.out_detected, res.window);
    } catch (const FitError& e) {
        res.fit_error = e.what();
    }
    if (res.expected_beat_mhz > 0.0) {
        try {
            res.visibility_projected = beat_visibility_at(res.times, res.out_detected, res.window, res.expected_beat_mhz);
        } catch (const FitError&) {
            res.visibility_projected = 0.0;
        }
    }
    res.visibility = res.beat && res.beat->accepted ? res.beat->visibility : res.visibility_projected;
    return res;
}

StorageResult run_storage(const StorageSetup& s) {
    SignalPulse tmpl = s.pulse;
    PulseSchedule schedule;
    schedule.field(FieldId::Signal1).push_back(tmpl.segment(1.0, 0.0));
    schedule.storage = StorageBlock{tmpl.end(), s.timing.ramp, s.timing.t_dark, s.timing.read_scale};
    const Grid grid = storage_grid(s.scheme, s.medium, s.drive, schedule, s.nz, s.length, s.read_time);
    return run_storage(s.scheme, s.medium, s.drive, schedule, grid, s.spinor, s.options);
}

SteadyTransmission steady_transmission(const LevelScheme& scheme, const MediumParams& medium,
                                       const DriveConfig& drive, double probe, double length,
                                       double tie_break_rate) {
    if (!(probe > 0.0)) throw InvalidArgument("probe amplitude must be positive");
    const auto frame = rotating_frame(scheme, drive);
    for (std::size_t i = 0; i < scheme.transitions.size(); ++i)
        if (frame.residual[i] != 0.0 && scheme.transitions[i].weight != 0.0)
            throw InvalidArgument("cw steady state undefined with oscillating leakage couplings; disable leakage");
    const HamiltonianMatrix h = build_hamiltonian(scheme, drive, SignalRabi{probe, probe});
    const auto jumps = lindblad_dissipators(scheme, medium.gamma_ground);
    const DensityMatrix rho = steady_state(scheme, h, jumps, tie_break_rate);
    const double kappa = medium.coupling_density / units::speed_of_light;
    Complex acc[2] = {};
    for (const auto& tr : scheme.transitions) {
        if (tr.leakage || tr.field == FieldId::Control) continue;
        acc[static_cast<int>(tr.field) - 1] += tr.weight * rho(tr.upper, tr.lower);
    }
    SteadyTransmission t;
    const Complex chi1 = Complex(0.0, kappa) * acc[0] / probe;
    const Complex chi2 = Complex(0.0, kappa) * acc[1] / probe;
    t.t1 = std::exp(2.0 * chi1.real() * length);
    t.t2 = std::exp(2.0 * chi2.real() * length);
    t.total = 0.5 * (t.t1 + t.t2);
    return t;
}

double eit_half_width(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive, double length,
                      double probe, double tie_break_rate) {
    DriveConfig d = drive;
    d.delta1 = 0.0;
    d.delta2 = 0.0;
    const double peak = steady_transmission(scheme, medium, d, probe, length, tie_break_rate).t1;
    const auto excess = [&](double delta) {
        d.delta1 = delta;
        return steady_transmission(scheme, medium, d, probe, length, tie_break_rate).t1 - 0.5 * peak;
    };
    double lo = 0.0;
    double hi = 1e-3 * std::max(std::abs(drive.omega_c), 1e-3);
    int grow = 0;
    while (excess(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 80) throw NumericalError("transparency window half width not bracketed");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TransmissionMap scan_transmission(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive_base,
                                  double length, const ScanOptions& options) {
    if (options.points < 2) throw InvalidArgument("scan needs at least 2 points per axis");
    TransmissionMap map;
    map.probe = options.probe_fraction * std::abs(drive_base.omega_c);
    map.tie_break_rate = options.tie_break_rate > 0.0
                             ? options.tie_break_rate
                             : std::max(medium.gamma_ground, 1e-6 * scheme.decay_rate);
    map.eit_half_width = eit_half_width(scheme, medium, drive_base, length, map.probe, map.tie_break_rate);
    const double range = options.range > 0.0 ? options.range : 3.0 * map.eit_half_width;
    const int n = options.points;
    map.axis.resize(n);
    for (int i = 0; i < n; ++i) map.axis[i] = range * (2.0 * i / (n - 1) - 1.0);
    map.points.resize(static_cast<std::size_t>(n) * n);

    parallel_for(n * n, options.threads, [&](int idx) {
        ScanPoint& p = map.points[static_cast<std::size_t>(idx)];
        DriveConfig d = drive_base;
        d.delta1 = map.axis[idx / n];
        d.delta2 = map.axis[idx % n];
        p.delta1 = d.delta1;
        p.delta2 = d.delta2;
        try {
            p.t = steady_transmission(scheme, medium, d, map.probe, length, map.tie_break_rate);
            p.ok = true;
        } catch (const NumericalError& e) {
            p.error = e.what();
        }
    });

    // Cross-check a few points inside the window against the full solver.
    int h_index = n / 2;
    for (int i = n / 2; i < n; ++i)
        if (std::abs(map.axis[i] - 0.5 * map.eit_half_width) <
            std::abs(map.axis[h_index] - 0.5 * map.eit_half_width))
            h_index = i;
    const double h = map.axis[h_index];
    const std::vector<std::pair<double, double>> candidates = {{0.0, 0.0}, {h, 0.0}, {h, h},
                                                              {0.0, h},   {-h, 0.0}, {-h, -h}};
    const int nc = std::min<int>(options.crosscheck_points, static_cast<int>(candidates.size()));
    map.checks.resize(std::max(nc, 0));
    parallel_for(nc, options.threads, [&](int i) {
        DriveConfig d = drive_base;
        d.delta1 = candidates[i].first;
        d.delta2 = candidates[i].second;
        SignalPulse cw;
        cw.shape = PulseShape::RampCos;
        cw.edge = 5.0;
        const double delay = tripod_delay(medium.coupling_density, drive_base.omega_c, length);
        const double t_max = cw.edge + 3.0 * delay + 10.0;
        cw.length = t_max + cw.edge;
        cw.amplitude = map.probe * std::sqrt(2.0);
        const PulseSchedule sch = signal_schedule(cw, InputSpinor{});
        Grid g;
        g.nz = options.crosscheck_nz;
        g.length = length;
        g.t_max = t_max;
        g.nt = required_time_steps(scheme, d, sch, t_max);
        const FieldRecord rec = propagate(scheme, medium, d, sch, g);
        const std::size_t last = rec.times.size() - 1;
        const double in = std::norm(rec.input[0][last]) + std::norm(rec.input[1][last]);
        const double out = std::norm(rec.output[0][last]) + std::norm(rec.output[1][last]);
        CrossCheck& c = map.checks[i];
        c.delta1 = d.delta1;
        c.delta2 = d.delta2;
        c.steady_total = steady_transmission(scheme, medium, d, map.probe, length, map.tie_break_rate).total;
        c.propagated_total = in > 0.0 ? out / in : 0.0;
    });
    return map;
}

namespace {

SweepPoint sweep_point(const StorageSetup& base, double b, double difference_mhz) {
    SweepPoint p;
    p.b = b;
    p.difference_mhz = difference_mhz;
    const double z = units::zeeman_step(b, base.drive.g_factor);
    p.delta1 = z - 0.5 * units::mhz_to_rad_per_us(difference_mhz);
    p.delta2 = -p.delta1;
    p.expected_mhz = units::delta_m2_beat_mhz(b, base.drive.g_factor);
    return p;
}

void run_sweep_point(const StorageSetup& base, SweepPoint& p) {
    StorageSetup s = base;
    s.drive.b_field = p.b;
    s.drive.delta1 = p.delta1;
    s.drive.delta2 = p.delta2;
    s.options.threads = 1;
    try {
        const StorageResult r = run_storage(s);
        p.efficiency = r.efficiency;
        p.visibility = r.visibility;
        if (r.beat) p.fit = r.beat;
        else p.error = r.fit_error;
    } catch (const NumericalError& e) {
        p.error = e.what();
    }
}

}  // namespace

SweepResult sweep_field(const StorageSetup& base, const SweepOptions& options) {
    if (options.b_values.empty()) throw InvalidArgument("sweep needs at least one field value");
    SweepResult res;
    double mean_b = 0.0;
    for (double b : options.b_values) mean_b += b;
    mean_b /= static_cast<double>(options.b_values.size());
    res.difference_mhz = options.difference_mhz != 0.0 ? options.difference_mhz
                                                       : units::delta_m2_beat_mhz(mean_b, base.drive.g_factor);

    const std::size_t np = options.b_values.size();
    res.points.resize(np);
    for (std::size_t i = 0; i < np; ++i) {
        res.points[i] = sweep_point(base, options.b_values[i], res.difference_mhz);
        const SweepPoint& p = res.points[i];
        if (options.eit_half_width > 0.0 && std::abs(p.delta1) > options.eit_half_width)
            throw InvalidArgument("B = " + format_double(p.b) + " G puts the two-photon detuning " +
                                  format_double(p.delta1) + " rad/us outside the transparency half width " +
                                  format_double(options.eit_half_width) + " rad/us");
    }
    parallel_for(static_cast<int>(np), options.threads,
                 [&](int i) { run_sweep_point(base, res.points[static_cast<std::size_t>(i)]); });

    std::vector<double> x, y, sig;
    for (const auto& p : res.points) {
        if (!p.fit) continue;
        x.push_back(p.b);
        y.push_back(p.fit->f_mhz);
        sig.push_back(p.fit->f_err);
    }
    try {
        res.linfit = fit_linear(x, y, sig);
    } catch (const FitError& e) {
        res.linfit_error = e.what();
    }
    return res;
}

std::vector<SweepPoint> converter_scan(const StorageSetup& base, double b, const std::vector<double>& difference_mhz,
                                       int threads) {
    std::vector<SweepPoint> points;
    for (double d : difference_mhz) points.push_back(sweep_point(base, b, d));
    parallel_for(static_cast<int>(points.size()), threads,
                 [&](int i) { run_sweep_point(base, points[static_cast<std::size_t>(i)]); });
    return points;
}

SlowLightResult slowlight_sweep(const LevelScheme& scheme, const MediumParams& medium, const DriveConfig& drive,
                                const SignalPulse& pulse, const InputSpinor& spinor,
                                const std::vector<double>& omega_values, int nz, double length, int threads) {
    if (omega_values.size() < 3) throw InvalidArgument("slow-light sweep needs at least 3 control values");
    SlowLightResult res;
    res.points.resize(omega_values.size());
    std::vector<double> sigma(omega_values.size());
    const PulseSchedule sch = signal_schedule(pulse, spinor);

    parallel_for(static_cast<int>(omega_values.size()), threads, [&](int i) {
        SlowLightPoint& p = res.points[static_cast<std::size_t>(i)];
        DriveConfig d = drive;
        d.omega_c = omega_values[static_cast<std::size_t>(i)];
        p.omega_c = d.omega_c;
        p.predicted = tripod_delay(medium.coupling_density, d.omega_c, length);
        p.predicted_lambda = 2.0 * p.predicted;
        Grid g;
        g.nz = nz;
        g.length = length;
        g.t_max = pulse.end() + 1.5 * p.predicted + 0.5 * (pulse.end() - pulse.start);
        g.nt = required_time_steps(scheme, d, sch, g.t_max);
        const FieldRecord rec = propagate(scheme, medium, d, sch, g);
        p.delay = measure_delay(rec, SignalSelect::Total);
        p.delay_s1 = spinor.alpha > 0.0 ? measure_delay(rec, SignalSelect::S1) : p.delay;
        p.delay_s2 = spinor.beta > 0.0 ? measure_delay(rec, SignalSelect::S2) : p.delay;
        p.transmission = transmission(rec, SignalSelect::Total);
        sigma[static_cast<std::size_t>(i)] = g.dt();
    });

    std::vector<double> x, y;
    for (const auto& p : res.points) {
        x.push_back(1.0 / (p.omega_c * p.omega_c));
        y.push_back(p.delay);
    }
    res.fit = fit_linear(x, y, sigma);
    res.predicted_slope = medium.coupling_density * length / (2.0 * units::speed_of_light);
    res.lambda_slope = 2.0 * res.predicted_slope;
    res.lambda_separation_sigma = (res.lambda_slope - res.fit.slope) / res.fit.slope_err;
    return res;
}

}  // namespace tripod
