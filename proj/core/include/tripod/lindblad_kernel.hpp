#pragma once

// Allocation-free Lindblad right-hand side and RK4 step for small systems
// (dimension <= 8), used by the per-cell atomic updates of the propagation
// solver. The dense API in dynamics.hpp is built on top of it.

#include "tripod/atomic_model.hpp"

#include <array>
#include <span>

namespace tripod {

inline constexpr int kMaxLevels = 8;
inline constexpr int kMaxCouplings = 32;

/// One off-diagonal Hamiltonian element: H[upper, lower] = value.
struct CouplingTerm {
    int upper = 0;
    int lower = 0;
    Complex value{};
};

/// Hermitian Hamiltonian as a diagonal plus a short list of couplings.
struct SparseHamiltonian {
    int dim = 0;
    std::array<double, kMaxLevels> diagonal{};
    std::array<CouplingTerm, kMaxCouplings> couplings{};
    int coupling_count = 0;

    void add(int upper, int lower, Complex value);
    static SparseHamiltonian from_dense(const HamiltonianMatrix& h);
    double norm_bound() const;  ///< upper bound on the spectral norm
};

/// Row-major dim x dim storage for a density matrix.
using RhoStorage = std::array<Complex, kMaxLevels * kMaxLevels>;

class LindbladKernel {
public:
    LindbladKernel(int dim, std::span<const JumpOperator> jumps);

    int dim() const { return dim_; }

    void rhs(const Complex* rho, const SparseHamiltonian& h, Complex* out) const;

    /// Classical RK4 with the Hamiltonian sampled at t, t + dt/2 and t + dt,
    /// followed by Hermitian symmetrisation.
    void rk4_step(Complex* rho, const SparseHamiltonian& h_start, const SparseHamiltonian& h_mid,
                  const SparseHamiltonian& h_end, double dt) const;

private:
    struct Feed {
        int to;
        int from;
        double rate;
    };
    int dim_;
    std::array<double, kMaxLevels> out_rate_{};
    std::array<Feed, 4 * kMaxLevels * kMaxLevels> feeds_{};
    int feed_count_ = 0;
};

}  // namespace tripod
