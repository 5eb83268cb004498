#include "fixtures.hpp"

#include "tripod/errors.hpp"
#include "tripod/protocol.hpp"
#include "tripod/units.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace tripod;

namespace {

double wrap(double a) { return std::remainder(a, units::two_pi); }

}  // namespace

TEST_CASE("pulse spans") {
    SignalPulse p;
    p.start = 1.0;
    p.length = 4.0;
    p.edge = 2.0;
    CHECK(p.end() == doctest::Approx(7.0));
    p.shape = PulseShape::Rect;
    CHECK(p.end() == doctest::Approx(5.0));
    p.shape = PulseShape::Gauss;
    const double sigma = 4.0 / (2.0 * std::sqrt(std::log(2.0)));
    CHECK(p.end() == doctest::Approx(1.0 + 8.0 * sigma));
    const auto seg = p.segment(1.0, 0.0);
    CHECK(std::abs(seg.value(1.0 + 4.0 * sigma)) == doctest::Approx(p.amplitude));
    CHECK(std::norm(seg.value(1.0 + 4.0 * sigma + 2.0)) == doctest::Approx(0.5 * p.amplitude * p.amplitude));
}

TEST_CASE("storage schedule switches off at the pulse end and splits the spinor") {
    SignalPulse p;
    p.length = 6.0;
    p.edge = 1.0;
    p.amplitude = 1.0;
    const auto s = storage_schedule(p, {1.0, 5.0, 0.5}, {3.0, 4.0, 0.25});
    REQUIRE(s.storage.has_value());
    CHECK(s.storage->t_off == doctest::Approx(7.0));
    CHECK(s.storage->t_on() == doctest::Approx(13.0));
    CHECK(s.peak_amplitude(FieldId::Signal1) == doctest::Approx(0.6));
    CHECK(s.peak_amplitude(FieldId::Signal2) == doctest::Approx(0.8));
    CHECK(std::arg(s.value(FieldId::Signal2, 3.0)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(signal_schedule(p, {0.0, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("tripod delay and coupling density are inverse") {
    for (double td : {0.5, 6.0, 28.0}) {
        const double g = coupling_density_for_delay(td, 9.0, 50.0);
        CHECK(tripod_delay(g, 9.0, 50.0) == doctest::Approx(td));
        CHECK(50.0 / group_velocity(g, 9.0) - 50.0 / units::speed_of_light == doctest::Approx(td));
    }
    CHECK_THROWS_AS(tripod_delay(1.0, 0.0, 50.0), InvalidArgument);
}

TEST_CASE("parallel_for keeps index order and rethrows the first failure") {
    std::vector<int> out(37, -1);
    parallel_for(37, 4, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < 37; ++i) CHECK(out[i] == i * i);
    std::atomic<int> ran{0};
    try {
        parallel_for(20, 3, [&](int i) {
            ++ran;
            if (i == 5 || i == 12) throw std::runtime_error(std::to_string(i));
        });
        FAIL("no exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "5");
    }
    CHECK(ran.load() == 20);
}

TEST_CASE("storage rejects a pulse longer than the medium") {
    auto s = fixtures::small_storage();
    s.pulse.length = 20.0;
    CHECK_THROWS_AS(run_storage(s), InvalidArgument);
}

TEST_CASE("storage builds signal 2 itself") {
    const auto s = fixtures::small_storage();
    auto sched = storage_schedule(s.pulse, s.timing, {1.0, 1.0, 0.0});
    const Grid grid = storage_grid(s.scheme, s.medium, s.drive, sched, s.nz, s.length, 0.0);
    CHECK_THROWS_AS(run_storage(s.scheme, s.medium, s.drive, sched, grid, s.spinor), InvalidArgument);
}

TEST_CASE("steady transmission: mode symmetry and half width") {
    const auto scheme = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    const MediumParams m{coupling_density_for_delay(6.0, 7.0, 50.0), 0.0};
    DriveConfig d;
    d.omega_c = 7.0;
    const double probe = 7e-4;
    const double tb = 6e-6;
    for (auto [a, b] : {std::pair{0.3, -0.1}, std::pair{0.0, 0.5}, std::pair{-0.7, 0.2}}) {
        d.delta1 = a;
        d.delta2 = b;
        const auto t = steady_transmission(scheme, m, d, probe, 50.0, tb);
        d.delta1 = b;
        d.delta2 = a;
        const auto u = steady_transmission(scheme, m, d, probe, 50.0, tb);
        CHECK(std::abs(t.t1 - u.t2) <= 1e-6);
        CHECK(std::abs(t.t2 - u.t1) <= 1e-6);
    }
    d.delta1 = d.delta2 = 0.0;
    const auto peak = steady_transmission(scheme, m, d, probe, 50.0, tb);
    CHECK(peak.total > 0.99);
    const double hw = eit_half_width(scheme, m, d, 50.0, probe, tb);
    d.delta1 = hw;
    CHECK(steady_transmission(scheme, m, d, probe, 50.0, tb).t1 == doctest::Approx(0.5 * peak.t1).epsilon(1e-6));
    d.delta1 = -hw;
    CHECK(steady_transmission(scheme, m, d, probe, 50.0, tb).t1 == doctest::Approx(0.5 * peak.t1).epsilon(1e-3));
    CHECK_THROWS_AS(steady_transmission(build_scheme(SchemeVariant::Zeeman8, 6.0, true), m, d, probe, 50.0, tb),
                    InvalidArgument);
}

TEST_CASE("two-mode storage retrieves the Zeeman beat") {
    const auto r = run_storage(fixtures::small_storage());
    REQUIRE(r.beat.has_value());
    CHECK(r.beat->accepted);
    CHECK(r.beat->f_mhz == doctest::Approx(r.expected_beat_mhz).epsilon(0.005));
    CHECK(r.expected_beat_mhz == doctest::Approx(units::delta_m2_beat_mhz(2.0, 0.5)));
    CHECK(r.visibility > 0.9);
    CHECK(r.efficiency <= 1.0 + 1e-6);
    CHECK(r.total_efficiency <= 1.0 + 1e-6);
    CHECK(r.min_eigenvalue > -1e-9);
    CHECK(std::abs(r.spinor_stored.beta) == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
}

TEST_CASE("retrieved energy scales quadratically with the input amplitude") {
    auto s = fixtures::small_storage();
    const double e1 = run_storage(s).retrieved_energy;
    s.pulse.amplitude *= 0.5;
    const double e2 = run_storage(s).retrieved_energy;
    CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("input relative phase shifts the beat phase one to one") {
    auto s = fixtures::small_storage();
    const auto r0 = run_storage(s);
    s.spinor.relative_phase = 1.0;
    const auto r1 = run_storage(s);
    REQUIRE(r0.beat.has_value());
    REQUIRE(r1.beat.has_value());
    CHECK(wrap(r1.beat->phase - r0.beat->phase) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("single-mode storage shows no beat") {
    auto s = fixtures::small_storage();
    s.spinor = {1.0, 0.0, 0.0};
    const auto r = run_storage(s);
    CHECK(r.visibility_projected < 0.01);
    if (r.beat && r.beat->accepted) CHECK(r.beat->visibility < 0.01);
}

TEST_CASE("ground dephasing decays the stored energy at twice its rate") {
    auto s = fixtures::small_storage();
    s.medium.gamma_ground = 0.1;
    const double e_short = run_storage(s).retrieved_energy;
    s.timing.t_dark += 3.0;
    const double e_long = run_storage(s).retrieved_energy;
    const double rate = -std::log(e_long / e_short) / 3.0;
    CHECK(rate == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("field sweep slope lies between the Zeeman rate and its read-power-scaled value") {
    auto base = fixtures::small_storage();
    base.timing.read_scale = 0.5;
    SweepOptions o;
    o.b_values = {1.9, 2.0, 2.1};
    const auto r = sweep_field(base, o);
    REQUIRE(r.linfit.has_value());
    for (const auto& p : r.points) CHECK(p.error.empty());
    CHECK(r.difference_mhz == doctest::Approx(units::delta_m2_beat_mhz(2.0, 0.5)));
    const double full = units::delta_m2_beat_mhz(1.0, 0.5);
    CHECK(r.linfit->slope > 0.75 * full);
    CHECK(r.linfit->slope < full);
}
