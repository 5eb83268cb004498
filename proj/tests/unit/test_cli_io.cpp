#include "tripod/config.hpp"
#include "tripod/csv.hpp"
#include "tripod/errors.hpp"
#include "tripod/runner.hpp"
#include "tripod/units.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace tripod;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tripod_cli_io_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

RunConfig small_config() {
    RunConfig c = preset_defaults(Preset::Desk);
    c.gamma = 6.0;
    c.omega_c = 7.0;
    c.coupling_density = coupling_density_for_delay(6.0, 7.0, c.length);
    c.b_field = 2.0;
    c.pulse_start = 0.0;
    c.pulse_length = 4.0;
    c.pulse_edge = 2.0;
    c.signal_amplitude = 0.35;
    c.ramp = 1.5;
    c.t_dark = 2.0;
    c.read_scale = 1.0;
    c.nz = 40;
    c.read_time = 0.0;
    c.fit_gate = 0.5;
    c.settle = 0.2;
    return c;
}

}  // namespace

TEST_CASE("csv layout: metadata, header, rows") {
    CsvTable t({"t_us", "I_rad2_per_us2", "label"});
    t.meta("subcommand", "store").meta("b_G", 0.15);
    t.row() << 0.5 << 1e-300 << "a";
    t.row() << 2 << std::nan("") << "b";
    CHECK(t.str() == "# subcommand=store\n# b_G=0.15\nt_us,I_rad2_per_us2,label\n0.5,1e-300,a\n2,nan,b\n");
    CHECK(t.body() == "t_us,I_rad2_per_us2,label\n0.5,1e-300,a\n2,nan,b\n");
    CHECK_THROWS_AS((t.row() << 1.0), InvalidArgument);
}

TEST_CASE("csv numbers round trip") {
    const fs::path dir = scratch("roundtrip");
    fs::create_directories(dir);
    CsvTable t({"x", "y"});
    t.meta("k", "v");
    const std::vector<double> xs{0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0};
    for (double x : xs) t.row() << x << -x;
    t.write(dir / "a.csv");
    const auto d = read_csv(dir / "a.csv");
    REQUIRE(d.rows.size() == xs.size());
    CHECK(d.meta.at(0) == std::pair<std::string, std::string>{"k", "v"});
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(d.rows[i][d.column("x")] == xs[i]);
        CHECK(d.rows[i][d.column("y")] == -xs[i]);
    }
    CHECK_THROWS_AS(d.column("z"), InvalidArgument);
}

TEST_CASE("darkstates writes its table and a manifest that parses back") {
    const fs::path dir = scratch("dark");
    const auto c = preset_defaults(Preset::Paper);
    const auto out = run(Subcommand::DarkStates, c, dir, {1, 9});
    CHECK(out.exit_code == 0);
    CHECK(out.error_line.empty());
    const auto d = read_csv(dir / "darkstates.csv");
    CHECK(d.rows.size() >= 3);
    CHECK(d.rows.at(0)[d.column("dark_dimension")] == 2.0);
    const std::string manifest = slurp(dir / "manifest");
    CHECK(manifest.find("# seed=9\n") != std::string::npos);
    CHECK(manifest.find("# exit_code=0\n") != std::string::npos);
    CHECK(parse_config(manifest) == c);
}

TEST_CASE("invalid config maps to exit code 2 with an error line") {
    auto c = preset_defaults(Preset::Desk);
    c.t_dark = -1.0;
    const fs::path dir = scratch("bad");
    const auto out = run(Subcommand::Store, c, dir, {});
    CHECK(out.exit_code == exit_code::config);
    CHECK(out.error_line.rfind("error code=2 kind=config message=\"", 0) == 0);
    CHECK(out.error_line.back() == '"');
    CHECK(error_line(3, "numerical", "a \"b\"\nc") == "error code=3 kind=numerical message=\"a \\\"b\\\" c\"");
}

TEST_CASE("fit-beat on a trace file") {
    const fs::path dir = scratch("fitbeat");
    fs::create_directories(dir);
    CsvTable beat({"t_us", "I_detected_rad2_per_us2"});
    CsvTable flat({"t_us", "I_detected_rad2_per_us2"});
    for (int i = 0; i <= 2000; ++i) {
        const double t = 0.05 * i;
        beat.row() << t << std::exp(-t / 40.0) * (1.0 + 0.7 * std::cos(units::two_pi * 0.21 * t + 0.3));
        flat.row() << t << 1.0;
    }
    beat.write(dir / "beat.csv");
    flat.write(dir / "flat.csv");
    auto c = preset_defaults(Preset::Desk);
    c.trace = (dir / "beat.csv").string();
    c.noise = 0.01;
    auto out = run(Subcommand::FitBeat, c, dir / "ok", {1, 5});
    REQUIRE(out.exit_code == 0);
    const auto d = read_csv(dir / "ok" / "beatfit.csv");
    CHECK(d.text.at(0)[d.column("status")] == "ok");
    CHECK(d.rows.at(0)[d.column("f_beat_MHz")] == doctest::Approx(0.21).epsilon(1e-3));
    const auto again = run(Subcommand::FitBeat, c, dir / "ok2", {1, 5});
    CHECK(slurp(dir / "ok" / "beatfit.csv") == slurp(dir / "ok2" / "beatfit.csv"));

    c.trace = (dir / "flat.csv").string();
    c.noise = 0.0;
    out = run(Subcommand::FitBeat, c, dir / "flat", {});
    CHECK(out.exit_code == exit_code::fit);
    CHECK(out.error_line.rfind("error code=4 kind=fit", 0) == 0);
    CHECK(fs::exists(dir / "flat" / "beatfit.csv"));

    c.trace = (dir / "missing.csv").string();
    CHECK(run(Subcommand::FitBeat, c, dir / "missing", {}).exit_code == exit_code::config);
}

TEST_CASE("store output is byte-identical across thread counts") {
    const auto c = small_config();
    std::string reference;
    for (int threads : {1, 2, 8}) {
        const fs::path dir = scratch("store" + std::to_string(threads));
        const auto out = run(Subcommand::Store, c, dir, {threads, 1});
        REQUIRE(out.exit_code == 0);
        REQUIRE(out.files.size() == 6);
        std::string all;
        for (const auto& f : out.files) all += slurp(dir / fs::path(f).filename());
        if (reference.empty())
            reference = all;
        else
            CHECK(all == reference);
    }
    const fs::path dir = fs::temp_directory_path() / ("tripod_cli_io_" + std::to_string(::getpid())) / "store1";
    const auto st = read_csv(dir / "storage.csv");
    CHECK(st.rows.size() == 1);
    const auto tr = read_csv(dir / "trace_out.csv");
    CHECK(tr.columns.front() == "t_us");
}

TEST_CASE("sweep-field writes one row per field and the line fit") {
    auto c = small_config();
    c.write_delay = 6.0;
    c.sweep_omega_c = 7.0;
    c.sweep_ramp = 1.5;
    c.sweep_pulse_length = 4.0;
    c.sweep_pulse_edge = 2.0;
    c.sweep_read_scale = 0.5;
    c.sweep_read_time = 0.0;
    c.sweep_nz = 40;
    c.b_values = {1.9, 1.94, 1.98, 2.02, 2.06, 2.1};
    c.converter_check = false;
    const fs::path dir = scratch("sweep");
    const auto out = run(Subcommand::SweepField, c, dir, {2, 0});
    REQUIRE(out.exit_code == 0);
    const auto sw = read_csv(dir / "sweep.csv");
    CHECK(sw.rows.size() == 6);
    const auto lf = read_csv(dir / "linfit.csv");
    REQUIRE(lf.rows.size() == 1);
    const double slope = lf.rows[0][lf.column("slope_MHz_per_G")];
    CHECK(slope > 0.75 * 1.399624);
    CHECK(slope < 1.399624);
}
