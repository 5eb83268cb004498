#pragma once

#include "tripod/atomic_model.hpp"
#include "tripod/propagation.hpp"

#include <utility>
#include <vector>

namespace tripod {

struct MixingAngle {
    double theta = 0.0;  ///< rad, in [0, pi/2]
    bool stopped_light = false;
};

/// tan(Theta) = sqrt(N / 2) g / Omega_C. Omega_C = 0 returns the stopped-light limit pi/2.
MixingAngle mixing_angle(double g, double n_atoms, double omega_c);

/// Same angle from the product G = g^2 N.
MixingAngle mixing_angle_from_density(double coupling_density, double omega_c);

/// v_g = c cos^2(Theta), mm/us.
double group_velocity(double theta);

/// Explicit form c / (1 + G / (2 Omega_C^2)), mm/us.
double group_velocity(double coupling_density, double omega_c);

/// Classical polariton amplitudes along z (Rabi units, so |psi|^2 dz is a photon flux times c).
///   psi_+ = cos(Theta) Omega_1 - sin(Theta) sqrt(2G) rho_{g0, g-}
///   psi_- = cos(Theta) Omega_2 - sin(Theta) sqrt(2G) rho_{g0, g+}
/// The bright combinations use (sin, cos) in place of (cos, -sin).
struct PolaritonModes {
    double theta = 0.0;
    std::vector<Complex> psi_plus, psi_minus;
    std::vector<Complex> bright_plus, bright_minus;
};

/// Fields and scaled spin coherences sqrt(2G) rho on a common grid.
struct FieldSpinPair {
    std::vector<Complex> field1, field2;
    std::vector<Complex> spin1, spin2;
};

PolaritonModes decompose(const FieldSpinPair& state, double theta);
FieldSpinPair recompose(const PolaritonModes& modes);

/// Reads the fields and the scaled coherences from a recorded snapshot. The
/// coherence of signal i is the one between the state it depletes and the
/// control-coupled state (rho_{g0, g-} and rho_{g0, g+} in the tripod).
FieldSpinPair field_spin_pair(const LevelScheme& scheme, const AtomSnapshot& snapshot, double coupling_density);

/// Trapezoid integral of |psi_+|^2 + |psi_-|^2 over z.
double polariton_norm(const PolaritonModes& modes, double dz);
double bright_norm(const PolaritonModes& modes, double dz);

struct Spinor {
    Complex alpha{};
    Complex beta{};
};

/// alpha = |psi_+|, beta = |psi_-| e^{i arg <psi_+, psi_->}, normalised.
Spinor spinor_amplitudes(const std::vector<Complex>& psi_plus, const std::vector<Complex>& psi_minus, double dz);

}  // namespace tripod
