#include "tripod/errors.hpp"
#include "tripod/propagation.hpp"
#include "tripod/protocol.hpp"
#include "tripod/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace tripod;

namespace {

const LevelScheme kTripod = build_scheme(SchemeVariant::Tripod4, 6.0, false);

PulseSchedule cw_probe(double amplitude, double length) {
    SignalPulse p;
    p.shape = PulseShape::RampCos;
    p.length = length;
    p.edge = 3.0;
    p.amplitude = amplitude;
    return signal_schedule(p, {1.0, 0.0, 0.0});
}

PulseSchedule gauss_pair(double fwhm, double amplitude, double beta = 1.0) {
    SignalPulse p;
    p.shape = PulseShape::Gauss;
    p.length = fwhm;
    p.amplitude = amplitude;
    return signal_schedule(p, {1.0, beta, 0.0});
}

Grid grid_for(const DriveConfig& d, const PulseSchedule& s, int nz, double t_max) {
    Grid g;
    g.nz = nz;
    g.length = 50.0;
    g.t_max = t_max;
    g.nt = required_time_steps(kTripod, d, s, t_max);
    return g;
}

}  // namespace

TEST_CASE("empty medium transmits the boundary envelope unchanged") {
    DriveConfig d;
    d.omega_c = 5.0;
    const auto s = gauss_pair(3.0, 0.2);
    const auto rec = propagate(kTripod, {0.0, 0.0}, d, s, grid_for(d, s, 20, 15.0));
    for (std::size_t n = 0; n < rec.times.size(); ++n) {
        CHECK(rec.output[0][n] == rec.input[0][n]);
        CHECK(rec.output[1][n] == rec.input[1][n]);
    }
    CHECK(measure_delay(rec, SignalSelect::Total) == doctest::Approx(0.0).scale(1.0));
    CHECK(transmission(rec, SignalSelect::Total) == doctest::Approx(1.0));
}

TEST_CASE("without control a weak cw probe follows the two-level Beer law") {
    DriveConfig d;
    const double od = 1.0;
    const double g = od * units::speed_of_light * kTripod.decay_rate / (2.0 * 50.0);
    const auto s = cw_probe(1e-3, 40.0);
    const auto rec = propagate(kTripod, {g, 0.0}, d, s, grid_for(d, s, 200, 12.0));
    const std::size_t last = rec.times.size() - 1;
    const double t = std::norm(rec.output[0][last]) / std::norm(rec.input[0][last]);
    CHECK(t == doctest::Approx(std::exp(-od)).epsilon(1e-3));
}

TEST_CASE("EIT pulse delay follows the tripod group velocity") {
    DriveConfig d;
    d.omega_c = 7.0;
    const double g = coupling_density_for_delay(6.0, d.omega_c, 50.0);
    const auto s = gauss_pair(3.0, 0.35);
    const auto rec = propagate(kTripod, {g, 0.0}, d, s, grid_for(d, s, 120, 26.0));
    const double delay = measure_delay(rec, SignalSelect::Total);
    CHECK(delay == doctest::Approx(tripod_delay(g, d.omega_c, 50.0)).epsilon(0.05));
    CHECK(measure_delay(rec, SignalSelect::S1) == doctest::Approx(measure_delay(rec, SignalSelect::S2)).epsilon(1e-9));
    CHECK(transmission(rec, SignalSelect::Total) > 0.8);
    CHECK(rec.min_eigenvalue > -1e-9);
    CHECK(rec.max_trace_error < 1e-9);

    SUBCASE("a single mode sees the same delay") {
        const auto one = gauss_pair(3.0, 0.35, 0.0);
        const auto r1 = propagate(kTripod, {g, 0.0}, d, one, grid_for(d, one, 120, 26.0));
        CHECK(measure_delay(r1, SignalSelect::S1) == doctest::Approx(delay).epsilon(0.01));
    }
}

TEST_CASE("results do not depend on the thread count") {
    DriveConfig d;
    d.omega_c = 7.0;
    d.b_field = 0.3;
    const double g = coupling_density_for_delay(3.0, d.omega_c, 50.0);
    const auto s = gauss_pair(2.0, 0.35);
    const Grid grid = grid_for(d, s, 40, 12.0);
    PropagateOptions o;
    o.snapshot_times = {5.0};
    const auto a = propagate(kTripod, {g, 0.0}, d, s, grid, o);
    o.threads = 3;
    const auto b = propagate(kTripod, {g, 0.0}, d, s, grid, o);
    CHECK(a.output[0] == b.output[0]);
    CHECK(a.output[1] == b.output[1]);
    REQUIRE(a.snapshots.size() == 1);
    REQUIRE(b.snapshots.size() == 1);
    for (std::size_t k = 0; k < a.snapshots[0].rho.size(); ++k)
        CHECK((a.snapshots[0].rho[k] - b.snapshots[0].rho[k]).norm() == 0.0);
}

TEST_CASE("under-resolved grids are rejected") {
    DriveConfig d;
    d.omega_c = 7.0;
    const auto s = gauss_pair(2.0, 0.35);
    SUBCASE("time step above the bound") {
        Grid g = grid_for(d, s, 40, 12.0);
        g.nt /= 2;
        CHECK_THROWS_AS(propagate(kTripod, {1e5, 0.0}, d, s, g), InvalidArgument);
    }
    SUBCASE("spatial step too coarse for the absorption length") {
        DriveConfig dark;
        const double g = 500.0 * units::speed_of_light * kTripod.decay_rate / (2.0 * 50.0);
        CHECK_THROWS_AS(propagate(kTripod, {g, 0.0}, dark, s, grid_for(dark, s, 10, 12.0)), NumericalError);
    }
    SUBCASE("bad grid and snapshot") {
        Grid g = grid_for(d, s, 40, 12.0);
        g.nz = 1;
        CHECK_THROWS_AS(propagate(kTripod, {1e5, 0.0}, d, s, g), InvalidArgument);
        PropagateOptions o;
        o.snapshot_times = {13.0};
        CHECK_THROWS_AS(propagate(kTripod, {1e5, 0.0}, d, s, grid_for(d, s, 40, 12.0), o), InvalidArgument);
    }
}

TEST_CASE("required time steps honour the step bound and ramp resolution") {
    DriveConfig d;
    d.omega_c = 10.0;
    const auto s = gauss_pair(2.0, 0.5);
    const int nt = required_time_steps(kTripod, d, s, 10.0);
    const double dt = 10.0 / (nt - 1);
    CHECK(dt * std::max(peak_hamiltonian_norm(kTripod, d, s), kTripod.decay_rate) <= 0.05 + 1e-12);
    CHECK(s.shortest_ramp() / dt >= 20.0);
}
