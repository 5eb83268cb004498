#include "tripod/runner.hpp"

#include "tripod/analysis.hpp"
#include "tripod/csv.hpp"
#include "tripod/errors.hpp"
#include "tripod/protocol.hpp"
#include "tripod/units.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#ifndef TRIPOD_VERSION_STRING
#define TRIPOD_VERSION_STRING "unknown"
#endif

namespace tripod {

namespace {

constexpr const char* kIntensity = "rad2_per_us2";
constexpr std::size_t kMaxTraceRows = 5000;

struct Context {
    Subcommand sub;
    const RunConfig& config;
    std::filesystem::path dir;
    RunOptions options;
    RunOutcome& outcome;

    CsvTable table(std::vector<std::string> columns) const {
        CsvTable t(std::move(columns));
        t.meta("subcommand", std::string(to_string(sub)));
        t.meta("preset", std::string(to_string(config.preset)));
        t.meta("scheme", std::string(to_string(config.variant)));
        t.meta("seed", std::to_string(options.seed));
        return t;
    }

    void write(const CsvTable& t, const std::string& name) const {
        t.write(dir / name);
        outcome.files.push_back(name);
    }
};

std::string col(const std::string& name) { return name + "_" + kIntensity; }

std::vector<std::string> beat_columns() {
    return {"status",         "f_beat_MHz",         "f_err_MHz",         "phase_rad",    "phase_err_rad",
            "visibility",     "visibility_err",     "tau_us",            "tau_err_us",   col("offset"),
            col("amplitude"), col("residual_rms"),  "t0_us",             "t1_us",        "samples",
            "iterations",     "accepted",           "expected_MHz",      "visibility_projected"};
}

void beat_row(CsvTable& t, const std::optional<BeatFitResult>& fit, const std::string& error, FitWindow w,
              double expected, double projected) {
    auto r = t.row();
    if (fit) {
        r << "ok" << fit->f_mhz << fit->f_err << fit->phase << fit->phase_err << fit->visibility
          << fit->visibility_err << fit->tau_us << fit->tau_err << fit->offset << fit->amplitude << fit->residual_rms
          << w.t0 << w.t1 << fit->samples << fit->iterations << (fit->accepted ? 1 : 0);
    } else {
        const double nan = std::nan("");
        r << (error.empty() ? std::string("no_fit") : error) << nan << nan << nan << nan << nan << nan << nan << nan
          << nan << nan << nan << w.t0 << w.t1 << 0 << 0 << 0;
    }
    r << expected << projected;
}

void trace_table(const Context& ctx, const StorageResult& r, bool output, const std::string& name) {
    CsvTable t = ctx.table({"t_us", col("I_s1"), col("I_s2"), col("I_total"), col("I_detected")});
    const std::size_t n = r.times.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxTraceRows - 1) / kMaxTraceRows);
    t.meta("stride", static_cast<double>(stride));
    const auto& s1 = output ? r.out_s1 : r.in_s1;
    const auto& s2 = output ? r.out_s2 : r.in_s2;
    const auto& tot = output ? r.out_total : r.in_total;
    const auto& det = output ? r.out_detected : r.in_detected;
    for (std::size_t i = 0; i < n; i += stride) t.row() << r.times[i] << s1[i] << s2[i] << tot[i] << det[i];
    ctx.write(t, name);
}

void run_darkstates(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const LevelScheme scheme = c.scheme();
    const DriveConfig drive = c.drive();
    const double n = std::hypot(c.alpha, c.beta);
    const Complex s1 = c.signal_amplitude * c.alpha / n;
    const Complex s2 = std::polar(c.signal_amplitude * c.beta / n, c.phase);
    struct Case {
        const char* name;
        double omega_c;
        Complex s1, s2;
    };
    const std::vector<Case> cases = {
        {"configured", drive.omega_c, s1, s2},
        {"tripod", drive.omega_c, c.signal_amplitude, c.signal_amplitude},
        {"lambda", drive.omega_c, c.signal_amplitude, 0.0},
        {"control_only", drive.omega_c, 0.0, 0.0},
    };
    CsvTable t = ctx.table({"case", "omega_c_rad_per_us", "omega_s1_rad_per_us", "omega_s2_rad_per_us",
                            "dark_dimension", "driven", "spectator"});
    for (const auto& cs : cases) {
        DriveConfig d = drive;
        d.omega_c = cs.omega_c;
        const DarkSubspace ds = dark_states(scheme, d, SignalRabi{cs.s1, cs.s2});
        t.row() << cs.name << cs.omega_c << std::abs(cs.s1) << std::abs(cs.s2) << ds.dimension() << ds.driven
                << ds.spectator;
    }
    ctx.write(t, "darkstates.csv");
}

void run_slowlight(const Context& ctx) {
    const RunConfig& c = ctx.config;
    SignalPulse pulse;
    pulse.shape = PulseShape::Gauss;
    pulse.length = c.slow_pulse_fwhm;
    pulse.amplitude = c.signal_amplitude;
    const SlowLightResult r = slowlight_sweep(c.scheme(), c.medium(), c.drive(), pulse, c.spinor(), c.omega_values,
                                              c.slow_nz, c.length, ctx.options.threads);
    CsvTable t = ctx.table({"omega_c_rad_per_us", "inv_omega_c2_us2", "delay_us", "delay_s1_us", "delay_s2_us",
                            "predicted_delay_us", "predicted_lambda_delay_us", "transmission"});
    t.meta("coupling_density_rad2_per_us2", c.coupling_density).meta("length_mm", c.length);
    for (const auto& p : r.points)
        t.row() << p.omega_c << 1.0 / (p.omega_c * p.omega_c) << p.delay << p.delay_s1 << p.delay_s2 << p.predicted
                << p.predicted_lambda << p.transmission;
    ctx.write(t, "slowlight.csv");

    CsvTable f = ctx.table({"slope_us3", "slope_err_us3", "intercept_us", "intercept_err_us", "r_squared",
                            "predicted_slope_us3", "lambda_slope_us3", "lambda_separation_sigma"});
    f.row() << r.fit.slope << r.fit.slope_err << r.fit.intercept << r.fit.intercept_err << r.fit.r_squared
            << r.predicted_slope << r.lambda_slope << r.lambda_separation_sigma;
    ctx.write(f, "slowfit.csv");
}

void write_storage(const Context& ctx, const StorageResult& r) {
    trace_table(ctx, r, false, "trace_in.csv");
    trace_table(ctx, r, true, "trace_out.csv");

    CsvTable sw = ctx.table({"z_mm", "re_rho1", "im_rho1", "re_rho2", "im_rho2", "re_psi_plus_rad_per_us",
                             "im_psi_plus_rad_per_us", "re_psi_minus_rad_per_us", "im_psi_minus_rad_per_us"});
    sw.meta("t_us", r.t_spinwave);
    for (std::size_t k = 0; k < r.z.size(); ++k)
        sw.row() << r.z[k] << r.spin1[k].real() << r.spin1[k].imag() << r.spin2[k].real() << r.spin2[k].imag()
                 << r.psi_plus[k].real() << r.psi_plus[k].imag() << r.psi_minus[k].real() << r.psi_minus[k].imag();
    ctx.write(sw, "spinwave.csv");

    CsvTable bf = ctx.table(beat_columns());
    beat_row(bf, r.beat, r.fit_error, r.window, r.expected_beat_mhz, r.visibility_projected);
    ctx.write(bf, "beatfit.csv");

    CsvTable pol = ctx.table({"t_us", "theta_rad", "norm_rad2_per_us", "bright_norm_rad2_per_us", "photonic_fraction"});
    for (const auto& p : r.polariton) pol.row() << p.t << p.theta << p.norm << p.bright_norm << p.photonic_fraction;
    ctx.write(pol, "polariton.csv");

    CsvTable st = ctx.table({"input_energy_rad2_per_us", "leaked_energy_rad2_per_us", "stored_energy_rad2_per_us",
                             "retrieved_energy_rad2_per_us", "efficiency", "total_efficiency", "visibility",
                             "dark_field_ratio", "dark_field_mid_ratio", "min_eigenvalue", "max_trace_error", "spinor_in_beta",
                             "spinor_in_phase_rad", "spinor_stored_beta", "spinor_stored_phase_rad",
                             "spinor_out_beta", "spinor_out_phase_rad"});
    for (const auto& w : r.warnings) st.meta("warning", w);
    st.row() << r.input_energy << r.leaked_energy << r.stored_energy << r.retrieved_energy << r.efficiency
             << r.total_efficiency << r.visibility << r.dark_field_ratio << r.dark_field_mid_ratio << r.min_eigenvalue << r.max_trace_error
             << std::abs(r.spinor_in.beta) << std::arg(r.spinor_in.beta) << std::abs(r.spinor_stored.beta)
             << std::arg(r.spinor_stored.beta) << std::abs(r.spinor_out.beta) << std::arg(r.spinor_out.beta);
    ctx.write(st, "storage.csv");
    for (const auto& w : r.warnings) ctx.outcome.warnings.push_back(w);
}

void run_store(const Context& ctx) { write_storage(ctx, run_storage(ctx.config.storage_setup(ctx.options.threads))); }

double default_tie_break(const RunConfig& c) {
    return c.tie_break_rate > 0.0 ? c.tie_break_rate : std::max(c.gamma_ground, 1e-6 * c.gamma);
}

void run_scan(const Context& ctx) {
    const RunConfig& c = ctx.config;
    ScanOptions o;
    o.points = c.scan_points;
    o.range = c.scan_range;
    o.probe_fraction = c.probe_fraction;
    o.tie_break_rate = c.tie_break_rate;
    o.threads = ctx.options.threads;
    o.crosscheck_points = c.crosscheck_points;
    o.crosscheck_nz = c.crosscheck_nz;
    const TransmissionMap m = scan_transmission(c.scheme(), c.medium(), c.drive(), c.length, o);

    CsvTable t = ctx.table({"delta1_rad_per_us", "delta2_rad_per_us", "T1", "T2", "T_total", "ok"});
    t.meta("eit_half_width_rad_per_us", m.eit_half_width)
        .meta("probe_rad_per_us", m.probe)
        .meta("tie_break_rate_rad_per_us", m.tie_break_rate);
    const double nan = std::nan("");
    for (const auto& p : m.points) {
        if (p.ok) t.row() << p.delta1 << p.delta2 << p.t.t1 << p.t.t2 << p.t.total << 1;
        else t.row() << p.delta1 << p.delta2 << nan << nan << nan << 0;
    }
    ctx.write(t, "transmission.csv");

    CsvTable x = ctx.table({"delta1_rad_per_us", "delta2_rad_per_us", "T_steady", "T_propagated"});
    for (const auto& k : m.checks) x.row() << k.delta1 << k.delta2 << k.steady_total << k.propagated_total;
    ctx.write(x, "crosscheck.csv");
}

void sweep_rows(CsvTable& t, const std::vector<SweepPoint>& points) {
    const double nan = std::nan("");
    for (const auto& p : points) {
        auto r = t.row();
        r << p.b << p.difference_mhz << p.delta1 << p.delta2 << p.expected_mhz;
        if (p.fit) r << p.fit->f_mhz << p.fit->f_err << p.fit->phase << p.fit->visibility << (p.fit->accepted ? 1 : 0);
        else r << nan << nan << nan << nan << 0;
        r << p.efficiency << (p.fit ? std::string("ok") : p.error);
    }
}

std::vector<std::string> sweep_columns() {
    return {"B_G",        "difference_MHz", "delta1_rad_per_us", "delta2_rad_per_us", "expected_MHz", "f_beat_MHz",
            "f_err_MHz",  "phase_rad",      "visibility",        "accepted",          "efficiency",   "status"};
}

void run_sweep(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const StorageSetup base = c.sweep_setup(1);
    double hw = 0.0;
    if (!c.leakage)
        hw = eit_half_width(base.scheme, base.medium, base.drive, base.length, c.probe_fraction * c.omega_c,
                            default_tie_break(c));
    SweepOptions o;
    o.b_values = c.b_values;
    o.difference_mhz = c.difference_mhz;
    o.eit_half_width = hw;
    o.threads = ctx.options.threads;
    const SweepResult r = sweep_field(base, o);

    CsvTable t = ctx.table(sweep_columns());
    t.meta("eit_half_width_rad_per_us", hw).meta("difference_MHz", r.difference_mhz);
    sweep_rows(t, r.points);
    ctx.write(t, "sweep.csv");

    CsvTable lf = ctx.table({"status", "slope_MHz_per_G", "slope_err_MHz_per_G", "intercept_MHz", "intercept_err_MHz",
                             "r_squared", "chi_squared", "expected_slope_MHz_per_G"});
    const double expected = units::delta_m2_beat_mhz(1.0, c.g_factor);
    if (r.linfit)
        lf.row() << "ok" << r.linfit->slope << r.linfit->slope_err << r.linfit->intercept << r.linfit->intercept_err
                 << r.linfit->r_squared << r.linfit->chi_squared << expected;
    else {
        const double nan = std::nan("");
        lf.row() << r.linfit_error << nan << nan << nan << nan << nan << nan << expected;
    }
    ctx.write(lf, "linfit.csv");

    if (c.converter_check && hw > 0.0) {
        double mid = 0.0;
        for (double b : c.b_values) mid += b;
        mid /= static_cast<double>(c.b_values.size());
        // A two-photon offset x on signal 1 (and -x on signal 2) moves the
        // difference frequency by 2x.
        const double step = units::rad_per_us_to_mhz(2.0 * c.converter_fraction * 2.0 * hw);
        const std::vector<double> diffs = {r.difference_mhz + step, r.difference_mhz, r.difference_mhz - step};
        const auto pts = converter_scan(base, mid, diffs, ctx.options.threads);
        CsvTable cv = ctx.table(sweep_columns());
        cv.meta("eit_half_width_rad_per_us", hw).meta("offset_fraction_of_width", c.converter_fraction);
        sweep_rows(cv, pts);
        ctx.write(cv, "converter.csv");
    }
    if (!r.linfit)
        throw FitError(FitError::Kind::Degenerate, "beat-versus-field fit failed: " + r.linfit_error);
}

void run_fit_beat(const Context& ctx) {
    const RunConfig& c = ctx.config;
    std::vector<double> t, y;
    FitWindow w{c.fit_t0, c.fit_t1};
    double expected = 0.0;
    if (!c.trace.empty()) {
        const CsvData d = read_csv(c.trace);
        const std::size_t it = d.column("t_us"), iy = d.column(c.trace_column);
        for (const auto& row : d.rows) {
            if (!std::isfinite(row[it]) || !std::isfinite(row[iy]))
                throw InvalidArgument("trace " + c.trace + " has a non-numeric or non-finite cell");
            t.push_back(row[it]);
            y.push_back(row[iy]);
        }
        if (t.empty()) throw InvalidArgument("trace " + c.trace + " has no rows");
        if (w.t0 < 0.0) w.t0 = t.front();
        if (w.t1 < 0.0) w.t1 = t.back();
    } else {
        const StorageResult r = run_storage(c.storage_setup(ctx.options.threads));
        t = r.times;
        y = r.out_detected;
        expected = r.expected_beat_mhz;
        if (w.t0 < 0.0) w.t0 = r.window.t0;
        if (w.t1 < 0.0) w.t1 = r.window.t1;
    }
    if (c.noise > 0.0) {
        double peak = 0.0;
        for (double v : y) peak = std::max(peak, std::abs(v));
        std::mt19937_64 rng(ctx.options.seed);
        std::normal_distribution<double> gauss(0.0, c.noise * peak);
        for (double& v : y) v += gauss(rng);
    }
    CsvTable bf = ctx.table(beat_columns());
    bf.meta("noise_fraction", c.noise);
    std::optional<BeatFitResult> fit;
    std::string error;
    try {
        fit = fit_beat(t, y, w);
    } catch (const FitError& e) {
        error = e.what();
    }
    double projected = 0.0;
    if (expected > 0.0) {
        try {
            projected = beat_visibility_at(t, y, w, expected);
        } catch (const FitError&) {
        }
    }
    beat_row(bf, fit, error, w, expected, projected);
    ctx.write(bf, "beatfit.csv");
    if (!fit) throw FitError(FitError::Kind::NoBeat, error);
}

void write_manifest(const std::filesystem::path& dir, Subcommand sub, const RunConfig& config,
                    const RunOptions& options, const RunOutcome& outcome, double wall) {
    std::ofstream f(dir / "manifest", std::ios::binary);
    if (!f) return;
    f << "# version=" << TRIPOD_VERSION_STRING << "\n";
    f << "# subcommand=" << to_string(sub) << "\n";
    f << "# seed=" << options.seed << "\n";
    f << "# threads=" << options.threads << "\n";
    f << "# wall_time_s=" << format_number(wall) << "\n";
    f << "# exit_code=" << outcome.exit_code << "\n";
    f << "# files=";
    for (std::size_t i = 0; i < outcome.files.size(); ++i) f << (i ? " " : "") << outcome.files[i];
    f << "\n";
    if (!outcome.error_line.empty()) f << "# " << outcome.error_line << "\n";
    f << serialize(config);
}

}  // namespace

Subcommand parse_subcommand(std::string_view name) {
    if (name == "darkstates") return Subcommand::DarkStates;
    if (name == "slowlight") return Subcommand::SlowLight;
    if (name == "store") return Subcommand::Store;
    if (name == "scan-transmission") return Subcommand::ScanTransmission;
    if (name == "sweep-field") return Subcommand::SweepField;
    if (name == "fit-beat") return Subcommand::FitBeat;
    throw InvalidArgument("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(Subcommand s) {
    switch (s) {
        case Subcommand::DarkStates: return "darkstates";
        case Subcommand::SlowLight: return "slowlight";
        case Subcommand::Store: return "store";
        case Subcommand::ScanTransmission: return "scan-transmission";
        case Subcommand::SweepField: return "sweep-field";
        case Subcommand::FitBeat: return "fit-beat";
    }
    return "unknown";
}

std::string error_line(int code, std::string_view kind, std::string_view message) {
    std::string m;
    for (char ch : message) {
        if (ch == '"' || ch == '\\') m += '\\';
        m += ch == '\n' ? ' ' : ch;
    }
    return "error code=" + std::to_string(code) + " kind=" + std::string(kind) + " message=\"" + m + "\"";
}

RunOutcome run(Subcommand sub, const RunConfig& config, const std::filesystem::path& out_dir,
               const RunOptions& options) {
    RunOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    const auto fail = [&](int code, std::string_view kind, std::string_view what) {
        outcome.exit_code = code;
        outcome.error_line = error_line(code, kind, what);
    };
    try {
        validate(config);
        if (options.threads < 1) throw InvalidArgument("threads must be >= 1");
        std::filesystem::create_directories(out_dir);
        const Context ctx{sub, config, out_dir, options, outcome};
        switch (sub) {
            case Subcommand::DarkStates: run_darkstates(ctx); break;
            case Subcommand::SlowLight: run_slowlight(ctx); break;
            case Subcommand::Store: run_store(ctx); break;
            case Subcommand::ScanTransmission: run_scan(ctx); break;
            case Subcommand::SweepField: run_sweep(ctx); break;
            case Subcommand::FitBeat: run_fit_beat(ctx); break;
        }
    } catch (const ConfigError& e) {
        fail(exit_code::config, "config", e.what());
    } catch (const InvalidArgument& e) {
        fail(exit_code::config, "config", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        fail(exit_code::config, "config", e.what());
    } catch (const NumericalError& e) {
        fail(exit_code::numerical, "numerical", e.what());
    } catch (const FitError& e) {
        fail(exit_code::fit, "fit", e.what());
    } catch (const std::exception& e) {
        fail(exit_code::numerical, "numerical", e.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::error_code ec;
    if (std::filesystem::is_directory(out_dir, ec)) write_manifest(out_dir, sub, config, options, outcome, wall);
    return outcome;
}

}  // namespace tripod
