#include "tripod/lindblad_kernel.hpp"

#include "tripod/errors.hpp"

#include <cmath>

namespace tripod {

void SparseHamiltonian::add(int upper, int lower, Complex value) {
    if (coupling_count >= kMaxCouplings) throw InvalidArgument("too many Hamiltonian couplings");
    couplings[coupling_count++] = {upper, lower, value};
}

SparseHamiltonian SparseHamiltonian::from_dense(const HamiltonianMatrix& h) {
    if (h.rows() != h.cols() || h.rows() > kMaxLevels) throw InvalidArgument("Hamiltonian dimension unsupported");
    SparseHamiltonian s;
    s.dim = static_cast<int>(h.rows());
    for (int i = 0; i < s.dim; ++i) {
        s.diagonal[i] = h(i, i).real();
        for (int j = i + 1; j < s.dim; ++j)
            if (h(i, j) != Complex{}) s.add(i, j, h(i, j));
    }
    return s;
}

double SparseHamiltonian::norm_bound() const {
    // Gershgorin bound on the largest |eigenvalue|.
    std::array<double, kMaxLevels> row{};
    for (int i = 0; i < dim; ++i) row[i] = std::abs(diagonal[i]);
    for (int c = 0; c < coupling_count; ++c) {
        row[couplings[c].upper] += std::abs(couplings[c].value);
        row[couplings[c].lower] += std::abs(couplings[c].value);
    }
    double m = 0.0;
    for (int i = 0; i < dim; ++i) m = std::max(m, row[i]);
    return m;
}

LindbladKernel::LindbladKernel(int dim, std::span<const JumpOperator> jumps) : dim_(dim) {
    if (dim < 1 || dim > kMaxLevels) throw InvalidArgument("kernel dimension must be in [1, 8]");
    for (const auto& j : jumps) {
        if (j.to < 0 || j.to >= dim || j.from < 0 || j.from >= dim)
            throw InvalidArgument("jump operator index out of range");
        if (j.rate < 0.0) throw InvalidArgument("jump rate must be nonnegative");
        if (j.rate == 0.0) continue;
        out_rate_[j.from] += j.rate;
        if (feed_count_ >= static_cast<int>(feeds_.size())) throw InvalidArgument("too many jump operators");
        feeds_[feed_count_++] = {j.to, j.from, j.rate};
    }
}

void LindbladKernel::rhs(const Complex* rho, const SparseHamiltonian& h, Complex* out) const {
    const int d = dim_;
    std::array<Complex, kMaxLevels * kMaxLevels> m;  // H rho
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i * d + j] = h.diagonal[i] * rho[i * d + j];
    for (int c = 0; c < h.coupling_count; ++c) {
        const auto& t = h.couplings[c];
        const Complex v = t.value;
        const Complex vc = std::conj(v);
        for (int j = 0; j < d; ++j) {
            m[t.upper * d + j] += v * rho[t.lower * d + j];
            m[t.lower * d + j] += vc * rho[t.upper * d + j];
        }
    }
    // -i [H, rho] with rho H = (H rho)^dagger for Hermitian rho.
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const Complex comm = m[i * d + j] - std::conj(m[j * d + i]);
            out[i * d + j] = Complex(comm.imag(), -comm.real()) - 0.5 * (out_rate_[i] + out_rate_[j]) * rho[i * d + j];
        }
    }
    for (int f = 0; f < feed_count_; ++f) {
        const auto& fd = feeds_[f];
        out[fd.to * d + fd.to] += fd.rate * rho[fd.from * d + fd.from];
    }
}

void LindbladKernel::rk4_step(Complex* rho, const SparseHamiltonian& h_start, const SparseHamiltonian& h_mid,
                              const SparseHamiltonian& h_end, double dt) const {
    const int n = dim_ * dim_;
    RhoStorage k1, k2, k3, k4, tmp;
    rhs(rho, h_start, k1.data());
    for (int i = 0; i < n; ++i) tmp[i] = rho[i] + 0.5 * dt * k1[i];
    rhs(tmp.data(), h_mid, k2.data());
    for (int i = 0; i < n; ++i) tmp[i] = rho[i] + 0.5 * dt * k2[i];
    rhs(tmp.data(), h_mid, k3.data());
    for (int i = 0; i < n; ++i) tmp[i] = rho[i] + dt * k3[i];
    rhs(tmp.data(), h_end, k4.data());
    const double w = dt / 6.0;
    for (int i = 0; i < n; ++i) rho[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

    const int d = dim_;
    for (int i = 0; i < d; ++i) {
        rho[i * d + i] = Complex(rho[i * d + i].real(), 0.0);
        for (int j = i + 1; j < d; ++j) {
            const Complex a = 0.5 * (rho[i * d + j] + std::conj(rho[j * d + i]));
            rho[i * d + j] = a;
            rho[j * d + i] = std::conj(a);
        }
    }
}

}  // namespace tripod
