#include "tripod/dynamics.hpp"

#include "tripod/errors.hpp"
#include "tripod/lindblad_kernel.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace tripod {

namespace {

std::pair<int, int> vacuum_states(const LevelScheme& scheme) {
    if (scheme.variant == SchemeVariant::Tripod4) return {scheme.g_minus(), scheme.g_plus()};
    return {scheme.index_of_m(-2, false), scheme.index_of_m(2, false)};
}

void check_square(const ComplexMatrix& a, Eigen::Index n, const char* what) {
    if (a.rows() != n || a.cols() != n) throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

RhoStorage to_storage(const DensityMatrix& rho) {
    RhoStorage s{};
    const auto d = rho.rows();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) s[i * d + j] = rho(i, j);
    return s;
}

DensityMatrix from_storage(const RhoStorage& s, Eigen::Index d) {
    DensityMatrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = s[i * d + j];
    return rho;
}

void check_positive(const DensityMatrix& rho) {
    const double lo = min_eigenvalue(rho);
    if (lo < -1e-6)
        throw NumericalError("RK4 step rejected: density matrix eigenvalue " + std::to_string(lo) +
                             " below -1e-6, reduce dt");
}

}  // namespace

DensityMatrix polariton_vacuum(const LevelScheme& scheme) {
    const auto [a, b] = vacuum_states(scheme);
    DensityMatrix rho = DensityMatrix::Zero(scheme.size(), scheme.size());
    rho(a, a) = 0.5;
    rho(b, b) = 0.5;
    return rho;
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps) {
    const auto n = rho.rows();
    check_square(rho, n, "lindblad_rhs");
    check_square(h, n, "lindblad_rhs");
    const Complex i_unit(0.0, 1.0);
    DensityMatrix out = -i_unit * (h * rho - rho * h);
    for (const auto& j : jumps) {
        if (j.to >= n || j.from >= n) throw InvalidArgument("lindblad_rhs: jump index out of range");
        out(j.to, j.to) += j.rate * rho(j.from, j.from);
        out.row(j.from) -= 0.5 * j.rate * rho.row(j.from);
        out.col(j.from) -= 0.5 * j.rate * rho.col(j.from);
    }
    return out;
}

DensityMatrix step(const DensityMatrix& rho, const HamiltonianMatrix& h, std::span<const JumpOperator> jumps,
                   double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
    check_square(h, rho.rows(), "step");
    const LindbladKernel kernel(static_cast<int>(rho.rows()), jumps);
    const auto sh = SparseHamiltonian::from_dense(h);
    RhoStorage s = to_storage(rho);
    kernel.rk4_step(s.data(), sh, sh, sh, dt);
    DensityMatrix out = from_storage(s, rho.rows());
    check_positive(out);
    return out;
}

DensityMatrix step(const DensityMatrix& rho, const std::function<HamiltonianMatrix(double)>& h_of_t, double t,
                   std::span<const JumpOperator> jumps, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
    const LindbladKernel kernel(static_cast<int>(rho.rows()), jumps);
    const auto h0 = SparseHamiltonian::from_dense(h_of_t(t));
    const auto h1 = SparseHamiltonian::from_dense(h_of_t(t + 0.5 * dt));
    const auto h2 = SparseHamiltonian::from_dense(h_of_t(t + dt));
    RhoStorage s = to_storage(rho);
    kernel.rk4_step(s.data(), h0, h1, h2, dt);
    DensityMatrix out = from_storage(s, rho.rows());
    check_positive(out);
    return out;
}

ComplexMatrix liouvillian(const HamiltonianMatrix& h, std::span<const JumpOperator> jumps) {
    const auto d = h.rows();
    check_square(h, d, "liouvillian");
    const auto n = d * d;
    ComplexMatrix l = ComplexMatrix::Zero(n, n);
    const Complex i_unit(0.0, 1.0);
    // Column stacking: vec(rho)[i + j d] = rho(i, j).
    //   H rho     -> (I (x) H)
    //   rho H     -> (H^T (x) I)
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto row = i + j * d;
            for (Eigen::Index k = 0; k < d; ++k) {
                l(row, k + j * d) += -i_unit * h(i, k);
                l(row, i + k * d) += i_unit * h(k, j);
            }
        }
    for (const auto& jp : jumps) {
        if (jp.to >= d || jp.from >= d) throw InvalidArgument("liouvillian: jump index out of range");
        const double g = jp.rate;
        const auto a = jp.to, b = jp.from;
        l(a + a * d, b + b * d) += g;
        for (Eigen::Index k = 0; k < d; ++k) {
            l(b + k * d, b + k * d) -= 0.5 * g;
            l(k + b * d, k + b * d) -= 0.5 * g;
        }
    }
    return l;
}

DensityMatrix exact_evolve(const DensityMatrix& rho, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps, double t) {
    const auto d = rho.rows();
    check_square(h, d, "exact_evolve");
    if (t == 0.0) return rho;
    const ComplexMatrix prop = (liouvillian(h, jumps) * t).exp();
    const ComplexVector v = prop * rho.reshaped();
    return v.reshaped(d, d);
}

DensityMatrix steady_state(const HamiltonianMatrix& h, std::span<const JumpOperator> jumps) {
    const auto d = h.rows();
    ComplexMatrix a = liouvillian(h, jumps);
    const auto n = a.rows();
    a.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) a(0, i + i * d) = 1.0;
    ComplexVector b = ComplexVector::Zero(n);
    b(0) = 1.0;

    Eigen::FullPivLU<ComplexMatrix> lu(a);
    lu.setThreshold(1e-13);
    if (lu.rank() < n) throw NumericalError("steady_state: stationary space is degenerate (no tie-break rule)");
    const ComplexVector x = lu.solve(b);
    DensityMatrix rho = x.reshaped(d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho;
}

std::vector<JumpOperator> tie_break_jumps(const LevelScheme& scheme, double rate) {
    if (!(rate > 0.0)) throw InvalidArgument("tie-break rate must be positive");
    const auto [a, b] = vacuum_states(scheme);
    std::vector<JumpOperator> ops{{a, b, rate}, {b, a, rate}};
    for (int g : scheme.ground_indices()) {
        if (g == a || g == b) continue;
        ops.push_back({a, g, 0.5 * rate});
        ops.push_back({b, g, 0.5 * rate});
    }
    return ops;
}

DensityMatrix steady_state(const LevelScheme& scheme, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps, double tie_break_rate) {
    std::vector<JumpOperator> all(jumps.begin(), jumps.end());
    const auto extra = tie_break_jumps(scheme, tie_break_rate);
    all.insert(all.end(), extra.begin(), extra.end());
    return steady_state(h, all);
}

double min_eigenvalue(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double hermiticity_error(const ComplexMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace tripod
