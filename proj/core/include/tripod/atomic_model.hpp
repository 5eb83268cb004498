#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace tripod {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Dense complex Hamiltonian over the states of a scheme, rad/us.
using HamiltonianMatrix = ComplexMatrix;

enum class SchemeVariant { Tripod4, Zeeman8 };

enum class Polarization { SigmaMinus, Pi, SigmaPlus };

/// The three optical fields. Control is the strong pi-polarized beam.
enum class FieldId : int { Control = 0, Signal1 = 1, Signal2 = 2 };

inline constexpr int kFieldCount = 3;

SchemeVariant parse_scheme_variant(std::string_view name);
std::string_view to_string(SchemeVariant v);
std::string_view to_string(Polarization p);

/// Polarization label required by a Zeeman transition m_lower -> m_upper.
Polarization polarization_for(int m_lower, int m_upper);

struct Level {
    std::string label;
    int zeeman_m = 0;
    bool excited = false;
};

struct Transition {
    int lower = 0;
    int upper = 0;
    Polarization polarization = Polarization::Pi;
    FieldId field = FieldId::Control;
    double weight = 1.0;
    /// Off-resonant polarization component of a signal beam (gray-state channel).
    bool leakage = false;
};

struct DecayChannel {
    int upper = 0;
    int lower = 0;
    double fraction = 0.0;
};

struct LevelScheme {
    SchemeVariant variant = SchemeVariant::Tripod4;
    std::vector<Level> levels;
    std::vector<Transition> transitions;
    double decay_rate = 0.0;  ///< Gamma, rad/us
    std::vector<DecayChannel> branching;

    int size() const { return static_cast<int>(levels.size()); }
    int index_of(std::string_view label) const;
    std::vector<int> ground_indices() const;
    std::vector<int> excited_indices() const;

    /// Ground states |g->, |g0>, |g+> of the tripod used for polariton analysis:
    /// m = -1, 0, +1 in both variants.
    int g_minus() const { return index_of_m(-1, false); }
    int g_zero() const { return index_of_m(0, false); }
    int g_plus() const { return index_of_m(1, false); }
    int index_of_m(int m, bool excited) const;
};

/// Detunings and magnetic field. Carrier frequencies never appear; the two
/// two-photon detunings are stored directly.
struct DriveConfig {
    double omega_c = 0.0;              ///< control Rabi frequency, rad/us
    double one_photon_detuning = 0.0;  ///< Delta, rad/us
    double delta1 = 0.0;               ///< two-photon detuning of signal 1, rad/us
    double delta2 = 0.0;               ///< two-photon detuning of signal 2, rad/us
    double b_field = 0.0;              ///< Gauss
    double g_factor = 0.5;

    double zeeman_step() const;
    /// Carrier offsets of each field relative to the control, rad/us.
    std::array<double, kFieldCount> field_offsets() const;
};

struct SignalRabi {
    Complex s1{0.0, 0.0};
    Complex s2{0.0, 0.0};
};

LevelScheme build_scheme(SchemeVariant variant, double gamma, bool leakage_on);

/// Rotating frame assignment: each state rotates at a phase rate chosen so
/// that the non-leakage couplings are static. Couplings that cannot be made
/// static carry a residual frequency.
struct RotatingFrame {
    std::vector<double> diagonal;  ///< rotating-frame energies, rad/us
    std::vector<double> residual;  ///< per transition, coupling ~ exp(-i residual t)
};

RotatingFrame rotating_frame(const LevelScheme& scheme, const DriveConfig& drive);

/// Coupling amplitude of transition `tr` for the given field values:
/// H[upper, lower] = coupling(...), H[lower, upper] = conj(...).
Complex coupling_element(const Transition& tr, Complex field_rabi, double residual, double t);

HamiltonianMatrix build_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive,
                                    const SignalRabi& signal, double t = 0.0);

/// Same couplings as build_hamiltonian without the diagonal detunings.
HamiltonianMatrix interaction_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive,
                                          const SignalRabi& signal, double t = 0.0);

/// Jump operator sqrt(rate) |to><from|. to == from is pure dephasing.
struct JumpOperator {
    int to = 0;
    int from = 0;
    double rate = 0.0;
};

std::vector<JumpOperator> lindblad_dissipators(const LevelScheme& scheme, double gamma_ground);

struct DarkSubspace {
    /// Orthonormal columns over the full state space; zero on excited states.
    ComplexMatrix basis;
    /// Number of columns that involve at least one driven ground state.
    int driven = 0;
    /// Number of columns spanning ground states with no nonzero coupling.
    int spectator = 0;

    int dimension() const { return static_cast<int>(basis.cols()); }
};

DarkSubspace dark_states(const LevelScheme& scheme, const DriveConfig& drive, const SignalRabi& signal);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> for integer angular momenta.
double clebsch_gordan(int j1, int m1, int j2, int m2, int j, int m);

}  // namespace tripod
