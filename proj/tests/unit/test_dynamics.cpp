#include "tripod/dynamics.hpp"
#include "tripod/errors.hpp"
#include "tripod/lindblad_kernel.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace tripod;

namespace {

struct Problem {
    LevelScheme scheme;
    HamiltonianMatrix h;
    std::vector<JumpOperator> jumps;
};

Problem tripod_problem(double gamma_ground = 0.0) {
    Problem p;
    p.scheme = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    DriveConfig d;
    d.omega_c = 4.0;
    d.one_photon_detuning = 1.5;
    d.delta1 = 0.3;
    d.delta2 = -0.4;
    p.h = build_hamiltonian(p.scheme, d, {Complex(1.0, 0.5), Complex(0.8, -0.2)});
    p.jumps = lindblad_dissipators(p.scheme, gamma_ground);
    return p;
}

double spectral_norm(const HamiltonianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<HamiltonianMatrix> es(h);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

DensityMatrix evolve(const Problem& p, double dt, int steps) {
    DensityMatrix rho = polariton_vacuum(p.scheme);
    for (int n = 0; n < steps; ++n) rho = step(rho, p.h, p.jumps, dt);
    return rho;
}

}  // namespace

TEST_CASE("polariton vacuum splits the population between the outer ground states") {
    const auto s = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    const auto rho = polariton_vacuum(s);
    CHECK(rho(s.g_minus(), s.g_minus()).real() == 0.5);
    CHECK(rho(s.g_plus(), s.g_plus()).real() == 0.5);
    CHECK(rho.trace().real() == 1.0);
    const auto z = build_scheme(SchemeVariant::Zeeman8, 6.0, false);
    const auto rz = polariton_vacuum(z);
    CHECK(rz(z.index_of_m(-2, false), z.index_of_m(-2, false)).real() == 0.5);
    CHECK(rz(z.index_of_m(2, false), z.index_of_m(2, false)).real() == 0.5);
}

TEST_CASE("Liouvillian superoperator reproduces the right-hand side") {
    const auto p = tripod_problem(0.2);
    DensityMatrix rho = polariton_vacuum(p.scheme);
    rho(0, 3) = Complex(0.1, 0.05);
    rho(3, 0) = std::conj(rho(0, 3));
    const int n = p.scheme.size();
    const ComplexMatrix l = liouvillian(p.h, p.jumps);
    const ComplexVector v = Eigen::Map<const ComplexVector>(rho.data(), n * n);
    const ComplexVector lv = l * v;
    const DensityMatrix direct = lindblad_rhs(rho, p.h, p.jumps);
    CHECK((Eigen::Map<const ComplexMatrix>(lv.data(), n, n) - direct).norm() < 1e-12);
    CHECK(std::abs(direct.trace()) < 1e-13);
}

TEST_CASE("RK4 matches the matrix-exponential oracle at dt |H| = 0.05") {
    const auto p = tripod_problem();
    const double dt = 0.05 / std::max(spectral_norm(p.h), p.scheme.decay_rate);
    const int steps = 400;
    const DensityMatrix rk = evolve(p, dt, steps);
    const DensityMatrix exact = exact_evolve(polariton_vacuum(p.scheme), p.h, p.jumps, dt * steps);
    CHECK((rk - exact).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("trace drift over 10^4 steps stays below 1e-9") {
    const auto p = tripod_problem(0.1);
    const double dt = 0.05 / std::max(spectral_norm(p.h), p.scheme.decay_rate);
    const DensityMatrix rho = evolve(p, dt, 10000);
    CHECK(std::abs(rho.trace() - 1.0) <= 1e-9);
    CHECK(hermiticity_error(rho) <= 1e-12);
    CHECK(min_eigenvalue(rho) > -1e-10);
}

TEST_CASE("RK4 is fourth order") {
    const auto p = tripod_problem();
    const double t = 2.0;
    const DensityMatrix exact = exact_evolve(polariton_vacuum(p.scheme), p.h, p.jumps, t);
    const auto error = [&](int steps) { return (evolve(p, t / steps, steps) - exact).cwiseAbs().maxCoeff(); };
    const double e1 = error(100);
    const double e2 = error(200);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e1 / e2 <= 18.0);
}

TEST_CASE("time-dependent step agrees with constant step for static H") {
    const auto p = tripod_problem();
    const DensityMatrix rho = polariton_vacuum(p.scheme);
    const auto a = step(rho, p.h, p.jumps, 0.01);
    const auto b = step(rho, [&](double) { return p.h; }, 0.0, p.jumps, 0.01);
    CHECK((a - b).norm() < 1e-15);
}

TEST_CASE("oversized steps are rejected") {
    const auto p = tripod_problem();
    DensityMatrix rho = polariton_vacuum(p.scheme);
    CHECK_THROWS_AS(
        [&] {
            for (int n = 0; n < 50; ++n) rho = step(rho, p.h * 50.0, p.jumps, 1.0);
        }(),
        NumericalError);
}

TEST_CASE("allocation-free kernel equals the dense right-hand side") {
    const auto p = tripod_problem(0.3);
    DensityMatrix rho = exact_evolve(polariton_vacuum(p.scheme), p.h, p.jumps, 0.3);
    const int n = p.scheme.size();
    LindbladKernel k(n, p.jumps);
    const auto sh = SparseHamiltonian::from_dense(p.h);
    RhoStorage in{}, out{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) in[i * n + j] = rho(i, j);
    k.rhs(in.data(), sh, out.data());
    const DensityMatrix dense = lindblad_rhs(rho, p.h, p.jumps);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) err = std::max(err, std::abs(out[i * n + j] - dense(i, j)));
    CHECK(err < 1e-13);
    CHECK(sh.norm_bound() >= spectral_norm(p.h) - 1e-12);
}

TEST_CASE("steady state is stationary, normalised and positive") {
    const auto p = tripod_problem(0.05);
    const auto rho = steady_state(p.scheme, p.h, p.jumps, 1e-3);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK(hermiticity_error(rho) < 1e-12);
    CHECK(min_eigenvalue(rho) > -1e-12);
    auto jumps = p.jumps;
    for (const auto& j : tie_break_jumps(p.scheme, 1e-3)) jumps.push_back(j);
    CHECK(lindblad_rhs(rho, p.h, jumps).norm() < 1e-10);
}

TEST_CASE("degenerate stationary space is reported") {
    const auto s = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    DriveConfig d;
    d.omega_c = 4.0;
    const auto h = build_hamiltonian(s, d, {1.0, 0.5});
    CHECK_THROWS_AS(steady_state(h, lindblad_dissipators(s, 0.0)), NumericalError);
}

TEST_CASE("long evolution approaches the regularised steady state") {
    const auto p = tripod_problem(0.0);
    auto jumps = p.jumps;
    for (const auto& j : tie_break_jumps(p.scheme, 0.5)) jumps.push_back(j);
    const auto ss = steady_state(p.h, jumps);
    const auto late = exact_evolve(polariton_vacuum(p.scheme), p.h, jumps, 400.0);
    CHECK((late - ss).cwiseAbs().maxCoeff() < 1e-8);
}
