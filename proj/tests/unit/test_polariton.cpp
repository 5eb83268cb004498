#include "tripod/errors.hpp"
#include "tripod/polariton.hpp"
#include "tripod/protocol.hpp"
#include "tripod/units.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tripod;

namespace {

FieldSpinPair random_state(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    FieldSpinPair s;
    for (auto* v : {&s.field1, &s.field2, &s.spin1, &s.spin2}) {
        v->resize(n);
        for (auto& x : *v) x = Complex(g(rng), g(rng));
    }
    return s;
}

double norm_of(const std::vector<Complex>& a, double dz) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += ((k == 0 || k + 1 == a.size()) ? 0.5 : 1.0) * std::norm(a[k]);
    return s * dz;
}

}  // namespace

TEST_CASE("mixing angle limits") {
    CHECK(mixing_angle_from_density(2.0 * 9.0, 3.0).theta == doctest::Approx(units::pi / 4));
    CHECK(mixing_angle_from_density(0.0, 3.0).theta == 0.0);
    const auto stopped = mixing_angle_from_density(1e6, 0.0);
    CHECK(stopped.stopped_light);
    CHECK(stopped.theta == doctest::Approx(units::pi / 2));
    CHECK(mixing_angle(2.0, 50.0, 4.0).theta == doctest::Approx(mixing_angle_from_density(200.0, 4.0).theta));
    CHECK_THROWS_AS(mixing_angle_from_density(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("group velocity from the mixing angle matches the explicit form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double g = std::pow(10.0, 2.0 + 7.0 * u(rng));
        const double oc = 0.5 + 30.0 * u(rng);
        const double a = group_velocity(mixing_angle_from_density(g, oc).theta);
        const double b = group_velocity(g, oc);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
    CHECK(group_velocity(0.0) == units::speed_of_light);
    CHECK(group_velocity(units::pi / 2) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("decompose and recompose are inverse rotations") {
    std::mt19937_64 rng(11);
    for (double theta : {0.0, 0.3, units::pi / 4, 1.2, units::pi / 2}) {
        const auto s = random_state(rng, 64);
        const auto back = recompose(decompose(s, theta));
        double err = 0.0;
        for (std::size_t k = 0; k < 64; ++k)
            err = std::max({err, std::abs(back.field1[k] - s.field1[k]), std::abs(back.field2[k] - s.field2[k]),
                            std::abs(back.spin1[k] - s.spin1[k]), std::abs(back.spin2[k] - s.spin2[k])});
        CHECK(err <= 1e-12);
    }
}

TEST_CASE("dark plus bright norm equals field plus spin norm") {
    std::mt19937_64 rng(5);
    const auto s = random_state(rng, 33);
    const auto m = decompose(s, 0.7);
    const double dz = 0.2;
    const double total = norm_of(s.field1, dz) + norm_of(s.field2, dz) + norm_of(s.spin1, dz) + norm_of(s.spin2, dz);
    CHECK(polariton_norm(m, dz) + bright_norm(m, dz) == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("stopped-light polariton is the negated spin wave") {
    std::mt19937_64 rng(9);
    const auto s = random_state(rng, 8);
    const auto m = decompose(s, units::pi / 2);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(m.psi_plus[k] + s.spin1[k]) < 1e-15);
}

TEST_CASE("spinor amplitudes recover weights and relative phase") {
    std::vector<Complex> a(21), b(21);
    for (int k = 0; k < 21; ++k) {
        a[k] = std::exp(-0.01 * (k - 10) * (k - 10));
        b[k] = 2.0 * std::polar(1.0, 0.8) * a[k];
    }
    const auto sp = spinor_amplitudes(a, b, 0.5);
    CHECK(std::abs(sp.alpha) == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(std::abs(sp.beta) == doctest::Approx(2.0 / std::sqrt(5.0)));
    CHECK(std::arg(sp.beta) == doctest::Approx(0.8));
    CHECK_THROWS_AS(spinor_amplitudes(std::vector<Complex>(3), std::vector<Complex>(3), 1.0), InvalidArgument);
    CHECK_THROWS_AS(spinor_amplitudes(std::vector<Complex>(3), std::vector<Complex>(4), 1.0), InvalidArgument);
}

TEST_CASE("slow light is carried by the dark polariton") {
    const auto scheme = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    DriveConfig d;
    d.omega_c = 7.0;
    const double g = coupling_density_for_delay(6.0, d.omega_c, 50.0);
    SignalPulse p;
    p.shape = PulseShape::Gauss;
    p.length = 3.0;
    p.amplitude = 0.35;
    const auto sched = signal_schedule(p, {1.0, 0.5, 1.0});
    Grid grid;
    grid.nz = 120;
    grid.t_max = 16.0;
    grid.nt = required_time_steps(scheme, d, sched, grid.t_max);
    PropagateOptions o;
    o.snapshot_times = {11.0};
    const auto rec = propagate(scheme, {g, 0.0}, d, sched, grid, o);
    const auto& snap = rec.snapshots.at(0);
    const double theta = mixing_angle_from_density(g, d.omega_c).theta;
    const auto modes = decompose(field_spin_pair(scheme, snap, g), theta);
    const double dark = polariton_norm(modes, grid.dz());
    CHECK(bright_norm(modes, grid.dz()) < 1e-2 * dark);
    const auto sp = spinor_amplitudes(modes.psi_plus, modes.psi_minus, grid.dz());
    CHECK(std::abs(sp.beta) == doctest::Approx(0.5 / std::sqrt(1.25)).epsilon(0.01));
    CHECK(std::arg(sp.beta) == doctest::Approx(1.0).epsilon(0.01));
}
