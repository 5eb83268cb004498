#include "tripod/polariton.hpp"

#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <cmath>

namespace tripod {

MixingAngle mixing_angle(double g, double n_atoms, double omega_c) {
    if (g < 0.0 || n_atoms < 0.0) throw InvalidArgument("coupling and atom number must be nonnegative");
    return mixing_angle_from_density(g * g * n_atoms, omega_c);
}

MixingAngle mixing_angle_from_density(double coupling_density, double omega_c) {
    if (coupling_density < 0.0) throw InvalidArgument("coupling density must be nonnegative");
    if (omega_c < 0.0) throw InvalidArgument("control Rabi frequency must be nonnegative");
    if (omega_c == 0.0) return {0.5 * units::pi, true};
    return {std::atan2(std::sqrt(0.5 * coupling_density), omega_c), false};
}

double group_velocity(double theta) {
    if (theta < 0.0 || theta > 0.5 * units::pi + 1e-15) throw InvalidArgument("mixing angle outside [0, pi/2]");
    return units::speed_of_light * std::pow(std::cos(theta), 2);
}

double group_velocity(double coupling_density, double omega_c) {
    if (omega_c == 0.0) return 0.0;
    return units::speed_of_light / (1.0 + coupling_density / (2.0 * omega_c * omega_c));
}

namespace {

void check_sizes(std::size_t n, std::initializer_list<std::size_t> others) {
    for (auto m : others)
        if (m != n) throw InvalidArgument("polariton inputs are not on a common grid");
}

double integrate_norm(const std::vector<Complex>& a, const std::vector<Complex>& b, double dz) {
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        s += w * (std::norm(a[k]) + std::norm(b[k]));
    }
    return s * dz;
}

}  // namespace

PolaritonModes decompose(const FieldSpinPair& state, double theta) {
    const std::size_t n = state.field1.size();
    check_sizes(n, {state.field2.size(), state.spin1.size(), state.spin2.size()});
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    PolaritonModes m;
    m.theta = theta;
    m.psi_plus.resize(n);
    m.psi_minus.resize(n);
    m.bright_plus.resize(n);
    m.bright_minus.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        m.psi_plus[k] = c * state.field1[k] - s * state.spin1[k];
        m.psi_minus[k] = c * state.field2[k] - s * state.spin2[k];
        m.bright_plus[k] = s * state.field1[k] + c * state.spin1[k];
        m.bright_minus[k] = s * state.field2[k] + c * state.spin2[k];
    }
    return m;
}

FieldSpinPair recompose(const PolaritonModes& m) {
    const std::size_t n = m.psi_plus.size();
    check_sizes(n, {m.psi_minus.size(), m.bright_plus.size(), m.bright_minus.size()});
    const double c = std::cos(m.theta);
    const double s = std::sin(m.theta);
    FieldSpinPair out;
    out.field1.resize(n);
    out.field2.resize(n);
    out.spin1.resize(n);
    out.spin2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.field1[k] = c * m.psi_plus[k] + s * m.bright_plus[k];
        out.field2[k] = c * m.psi_minus[k] + s * m.bright_minus[k];
        out.spin1[k] = -s * m.psi_plus[k] + c * m.bright_plus[k];
        out.spin2[k] = -s * m.psi_minus[k] + c * m.bright_minus[k];
    }
    return out;
}

FieldSpinPair field_spin_pair(const LevelScheme& scheme, const AtomSnapshot& snapshot, double coupling_density) {
    // For each signal, the lower level of its first non-leakage transition out of
    // a populated vacuum state, and the control partner of the same excited state.
    std::array<std::pair<int, int>, 2> pairs{};
    const DensityMatrix vac = polariton_vacuum(scheme);
    for (int s = 0; s < 2; ++s) {
        const FieldId f = s == 0 ? FieldId::Signal1 : FieldId::Signal2;
        bool found = false;
        for (const auto& tr : scheme.transitions) {
            if (tr.field != f || tr.leakage || tr.weight == 0.0 || vac(tr.lower, tr.lower).real() == 0.0) continue;
            for (const auto& c : scheme.transitions) {
                if (c.field != FieldId::Control || c.upper != tr.upper || c.weight == 0.0) continue;
                pairs[s] = {c.lower, tr.lower};
                found = true;
                break;
            }
            if (found) break;
        }
        if (!found) throw InvalidArgument("scheme has no signal/control pair for polariton analysis");
    }
    const std::size_t n = snapshot.rho.size();
    check_sizes(n, {snapshot.s1.size(), snapshot.s2.size()});
    const double scale = std::sqrt(2.0 * coupling_density);
    FieldSpinPair out;
    out.field1 = snapshot.s1;
    out.field2 = snapshot.s2;
    out.spin1.resize(n);
    out.spin2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.spin1[k] = scale * snapshot.rho[k](pairs[0].first, pairs[0].second);
        out.spin2[k] = scale * snapshot.rho[k](pairs[1].first, pairs[1].second);
    }
    return out;
}

double polariton_norm(const PolaritonModes& m, double dz) { return integrate_norm(m.psi_plus, m.psi_minus, dz); }

double bright_norm(const PolaritonModes& m, double dz) { return integrate_norm(m.bright_plus, m.bright_minus, dz); }

Spinor spinor_amplitudes(const std::vector<Complex>& psi_plus, const std::vector<Complex>& psi_minus, double dz) {
    const std::size_t n = psi_plus.size();
    check_sizes(n, {psi_minus.size()});
    double a2 = 0.0;
    double b2 = 0.0;
    Complex overlap{};
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        a2 += w * std::norm(psi_plus[k]);
        b2 += w * std::norm(psi_minus[k]);
        overlap += w * std::conj(psi_plus[k]) * psi_minus[k];
    }
    a2 *= dz;
    b2 *= dz;
    const double total = a2 + b2;
    if (!(total > 0.0)) throw InvalidArgument("spinor amplitudes undefined for zero-norm modes");
    const double phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
    return {Complex(std::sqrt(a2 / total), 0.0), std::polar(std::sqrt(b2 / total), phase)};
}

}  // namespace tripod
