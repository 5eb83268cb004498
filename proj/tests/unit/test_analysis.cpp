#include "tripod/analysis.hpp"
#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace tripod;

namespace {

struct Trace {
    std::vector<double> t, y;
};

Trace damped(double f, double v, double tau, double phase, double noise, std::uint64_t seed, double t0 = 0.0,
             double t1 = 100.0, double dt = 0.05) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, noise * (1.0 + v));
    Trace tr;
    for (double t = t0; t <= t1 + 1e-12; t += dt) {
        tr.t.push_back(t);
        tr.y.push_back(std::exp(-(t - t0) / tau) * (1.0 + v * std::cos(units::two_pi * f * (t - t0) + phase)) +
                       (noise > 0.0 ? g(rng) : 0.0));
    }
    return tr;
}

double wrap(double a) { return std::remainder(a, units::two_pi); }

}  // namespace

TEST_CASE("damped beat with 1% noise") {
    const auto tr = damped(0.2099, 0.5, 30.0, 0.4, 0.01, 42);
    const auto r = fit_beat(tr.t, tr.y, {0.0, 100.0});
    CHECK(r.accepted);
    CHECK(r.f_mhz == doctest::Approx(0.2099).epsilon(1e-3));
    CHECK(r.visibility == doctest::Approx(0.5).epsilon(0.03));
    CHECK(r.tau_us == doctest::Approx(30.0).epsilon(0.05));
    CHECK(std::abs(wrap(r.phase - 0.4)) < 0.05);
    CHECK(std::abs(r.f_mhz - 0.2099) < 4.0 * r.f_err);
}

TEST_CASE("noise-free beat is recovered exactly") {
    const auto tr = damped(1.3, 0.9, 12.0, -2.0, 0.0, 0, 5.0, 25.0, 0.01);
    const auto r = fit_beat(tr.t, tr.y, {5.0, 25.0});
    CHECK(r.f_mhz == doctest::Approx(1.3).epsilon(1e-8));
    CHECK(r.visibility == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(r.tau_us == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(std::abs(wrap(r.phase + 2.0)) < 1e-6);
}

TEST_CASE("two-mode interference visibility") {
    for (auto [a, b] : {std::pair{1.0, 0.5}, std::pair{1.0, 1.0}, std::pair{0.3, 1.0}}) {
        Trace tr;
        const double w1 = 1.1, w2 = -0.2;
        for (double t = 0.0; t <= 40.0; t += 0.02) {
            tr.t.push_back(t);
            tr.y.push_back(std::norm(a * std::polar(1.0, -w1 * t) + b * std::polar(1.0, -w2 * t)));
        }
        const auto r = fit_beat(tr.t, tr.y, {0.0, 40.0});
        const double oracle = 2.0 * a * b / (a * a + b * b);
        CHECK(r.visibility == doctest::Approx(oracle).epsilon(0.05));
        CHECK(r.f_mhz == doctest::Approx((w1 - w2) / units::two_pi).epsilon(1e-6));
        CHECK(beat_visibility_at(tr.t, tr.y, {0.0, 40.0}, (w1 - w2) / units::two_pi) ==
              doctest::Approx(oracle).epsilon(1e-3));
    }
}

TEST_CASE("constant trace has no beat") {
    std::vector<double> t, flat, ramp;
    for (int i = 0; i < 2000; ++i) {
        t.push_back(0.05 * i);
        flat.push_back(2.5);
        ramp.push_back(2.5 - 0.01 * t.back());
    }
    for (const auto* y : {&flat, &ramp}) {
        try {
            fit_beat(t, *y, {0.0, 100.0});
            FAIL("expected FitError");
        } catch (const FitError& e) {
            CHECK(e.kind() == FitError::Kind::NoBeat);
        }
    }
}

TEST_CASE("short windows are degenerate") {
    const auto tr = damped(0.2, 0.5, 30.0, 0.0, 0.0, 0);
    CHECK_THROWS_AS(fit_beat(tr.t, tr.y, {0.0, 2.0}), FitError);
    CHECK_THROWS_AS(fit_beat(tr.t, tr.y, {0.0, 10.0}), FitError);
}

TEST_CASE("time shift leaves the window-referenced phase unchanged") {
    const auto a = damped(0.7, 0.6, 20.0, 1.0, 0.0, 0, 0.0, 30.0, 0.02);
    auto b = a;
    for (auto& t : b.t) t += 17.3;
    const auto ra = fit_beat(a.t, a.y, {0.0, 30.0});
    const auto rb = fit_beat(b.t, b.y, {17.3, 47.3});
    CHECK(std::abs(wrap(ra.phase - rb.phase)) < 1e-6);
    CHECK(ra.f_mhz == doctest::Approx(rb.f_mhz).epsilon(1e-9));
}

TEST_CASE("intensity scaling leaves frequency, phase and visibility unchanged") {
    const auto a = damped(0.45, 0.3, 25.0, -0.5, 0.005, 7);
    auto b = a;
    for (auto& y : b.y) y *= 1e4;
    const auto ra = fit_beat(a.t, a.y, {0.0, 100.0});
    const auto rb = fit_beat(b.t, b.y, {0.0, 100.0});
    CHECK(rb.f_mhz == doctest::Approx(ra.f_mhz).epsilon(1e-9));
    CHECK(rb.visibility == doctest::Approx(ra.visibility).epsilon(1e-8));
    CHECK(std::abs(wrap(ra.phase - rb.phase)) < 1e-8);
    CHECK(rb.amplitude == doctest::Approx(1e4 * ra.amplitude).epsilon(1e-8));
}

TEST_CASE("straight line fit") {
    const std::vector<double> x{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<double> y, s(6, 1e-3);
    for (double v : x) y.push_back(0.3 + 1.4 * v);
    const auto r = fit_linear(x, y, s);
    CHECK(r.slope == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(r.intercept == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.r_squared == doctest::Approx(1.0));
    CHECK(r.slope_err > 0.0);
    CHECK_THROWS_AS(fit_linear({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}), FitError);
    CHECK_THROWS_AS(fit_linear({1.0, 2.0}, {1.0, 2.0}, {1.0, 1.0}), FitError);
}

TEST_CASE("straight line fit is unbiased and its error is calibrated") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const std::vector<double> s(x.size(), 0.01);
    double mean = 0.0, pull2 = 0.0;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
        std::vector<double> y;
        for (double v : x) y.push_back(2.0 - 0.5 * v + g(rng));
        const auto r = fit_linear(x, y, s);
        mean += r.slope;
        pull2 += std::pow((r.slope + 0.5) / r.slope_err, 2);
    }
    mean /= trials;
    CHECK(std::abs(mean + 0.5) < 4.0 * 0.01 / std::sqrt(28.0 * trials));
    CHECK(std::sqrt(pull2 / trials) == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("phase refers to the fringe term when the envelope amplitude is negative") {
    std::vector<double> t, y;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(0.01 * i);
        y.push_back(3.0 - std::exp(-t.back() / 8.0) * (1.0 + 0.4 * std::cos(units::two_pi * 0.9 * t.back() + 0.6)));
    }
    const auto r = fit_beat(t, y, {0.0, 20.0});
    CHECK(std::abs(wrap(r.phase - (0.6 + units::pi))) < 1e-6);
    CHECK(r.amplitude < 0.0);
}
