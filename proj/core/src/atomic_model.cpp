#include "tripod/atomic_model.hpp"

#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace tripod {

namespace {

double factorial(int n) {
    if (n < 0) return std::numeric_limits<double>::infinity();
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void add_transition(LevelScheme& s, int lower, int upper, FieldId field, double weight, bool leakage) {
    const Polarization pol = polarization_for(s.levels[lower].zeeman_m, s.levels[upper].zeeman_m);
    s.transitions.push_back({lower, upper, pol, field, weight, leakage});
}

LevelScheme build_tripod4(double gamma) {
    LevelScheme s;
    s.variant = SchemeVariant::Tripod4;
    s.decay_rate = gamma;
    s.levels = {{"g-", -1, false}, {"g0", 0, false}, {"g+", 1, false}, {"e", 0, true}};
    add_transition(s, 1, 3, FieldId::Control, 1.0, false);
    add_transition(s, 0, 3, FieldId::Signal1, 1.0, false);
    add_transition(s, 2, 3, FieldId::Signal2, 1.0, false);
    for (int g = 0; g < 3; ++g) s.branching.push_back({3, g, 1.0 / 3.0});
    return s;
}

// F = 2 ground manifold, F' = 1 excited manifold. Couplings are weighted by
// <2 m; 1 q | 1 m'> and spontaneous decay by its square.
LevelScheme build_zeeman8(double gamma, bool leakage_on) {
    constexpr int kF = 2;
    constexpr int kFe = 1;
    LevelScheme s;
    s.variant = SchemeVariant::Zeeman8;
    s.decay_rate = gamma;
    for (int m = -kF; m <= kF; ++m) {
        const std::string sign = m > 0 ? "+" : "";
        s.levels.push_back({"g" + sign + std::to_string(m), m, false});
    }
    for (int m = -kFe; m <= kFe; ++m) {
        const std::string sign = m > 0 ? "+" : "";
        s.levels.push_back({"e" + sign + std::to_string(m), m, true});
    }
    const auto ground = [&](int m) { return s.index_of_m(m, false); };
    const auto excited = [&](int m) { return s.index_of_m(m, true); };
    const auto cg = [](int m, int q) { return clebsch_gordan(kF, m, 1, q, kFe, m + q); };

    for (int m = -kFe; m <= kFe; ++m) add_transition(s, ground(m), excited(m), FieldId::Control, cg(m, 0), false);
    for (int m = -kF; m <= kFe - 1; ++m)
        add_transition(s, ground(m), excited(m + 1), FieldId::Signal1, cg(m, +1), false);
    for (int m = -kFe + 1; m <= kF; ++m)
        add_transition(s, ground(m), excited(m - 1), FieldId::Signal2, cg(m, -1), false);
    if (leakage_on) {
        for (int m = -kFe + 1; m <= kF; ++m)
            add_transition(s, ground(m), excited(m - 1), FieldId::Signal1, cg(m, -1), true);
        for (int m = -kF; m <= kFe - 1; ++m)
            add_transition(s, ground(m), excited(m + 1), FieldId::Signal2, cg(m, +1), true);
    }

    for (int me = -kFe; me <= kFe; ++me) {
        double total = 0.0;
        std::vector<DecayChannel> channels;
        for (int q = -1; q <= 1; ++q) {
            const int m = me - q;
            if (m < -kF || m > kF) continue;
            const double w = std::pow(cg(m, q), 2);
            if (w == 0.0) continue;
            channels.push_back({excited(me), ground(m), w});
            total += w;
        }
        for (auto& c : channels) {
            c.fraction /= total;
            s.branching.push_back(c);
        }
    }
    return s;
}

}  // namespace

SchemeVariant parse_scheme_variant(std::string_view name) {
    if (name == "tripod4") return SchemeVariant::Tripod4;
    if (name == "zeeman8") return SchemeVariant::Zeeman8;
    throw InvalidArgument("unknown scheme variant '" + std::string(name) + "'");
}

std::string_view to_string(SchemeVariant v) {
    return v == SchemeVariant::Tripod4 ? "tripod4" : "zeeman8";
}

std::string_view to_string(Polarization p) {
    switch (p) {
        case Polarization::SigmaMinus: return "sigma-";
        case Polarization::Pi: return "pi";
        case Polarization::SigmaPlus: return "sigma+";
    }
    return "?";
}

Polarization polarization_for(int m_lower, int m_upper) {
    switch (m_upper - m_lower) {
        case -1: return Polarization::SigmaMinus;
        case 0: return Polarization::Pi;
        case 1: return Polarization::SigmaPlus;
        default: throw InvalidArgument("transition with |delta m| > 1 is not dipole allowed");
    }
}

int LevelScheme::index_of(std::string_view label) const {
    for (int i = 0; i < size(); ++i)
        if (levels[i].label == label) return i;
    throw InvalidArgument("no level labelled '" + std::string(label) + "'");
}

int LevelScheme::index_of_m(int m, bool excited) const {
    for (int i = 0; i < size(); ++i)
        if (levels[i].zeeman_m == m && levels[i].excited == excited) return i;
    throw InvalidArgument("scheme has no " + std::string(excited ? "excited" : "ground") + " level with m = " +
                          std::to_string(m));
}

std::vector<int> LevelScheme::ground_indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (!levels[i].excited) out.push_back(i);
    return out;
}

std::vector<int> LevelScheme::excited_indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (levels[i].excited) out.push_back(i);
    return out;
}

double DriveConfig::zeeman_step() const { return units::zeeman_step(b_field, g_factor); }

std::array<double, kFieldCount> DriveConfig::field_offsets() const {
    // delta1 = w_C - w_S1 + Z, delta2 = w_C - w_S2 - Z
    const double z = zeeman_step();
    return {0.0, z - delta1, -z - delta2};
}

LevelScheme build_scheme(SchemeVariant variant, double gamma, bool leakage_on) {
    if (!(gamma > 0.0)) throw InvalidArgument("decay rate gamma must be positive");
    switch (variant) {
        case SchemeVariant::Tripod4: return build_tripod4(gamma);
        case SchemeVariant::Zeeman8: return build_zeeman8(gamma, leakage_on);
    }
    throw InvalidArgument("unknown scheme variant");
}

RotatingFrame rotating_frame(const LevelScheme& scheme, const DriveConfig& drive) {
    const int n = scheme.size();
    const auto offsets = drive.field_offsets();
    const double z = drive.zeeman_step();

    std::vector<double> energy(n);
    for (int k = 0; k < n; ++k)
        energy[k] = scheme.levels[k].excited ? -drive.one_photon_detuning : z * scheme.levels[k].zeeman_m;

    // Breadth-first phase assignment over the non-leakage couplings, rooted at g0.
    std::vector<double> theta(n, 0.0);
    std::vector<bool> seen(n, false);
    std::deque<int> queue;
    const int root = scheme.g_zero();
    seen[root] = true;
    queue.push_back(root);
    while (!queue.empty()) {
        const int k = queue.front();
        queue.pop_front();
        for (const auto& tr : scheme.transitions) {
            if (tr.leakage) continue;
            const double nu = offsets[static_cast<int>(tr.field)];
            if (tr.lower == k && !seen[tr.upper]) {
                theta[tr.upper] = theta[k] + nu;
                seen[tr.upper] = true;
                queue.push_back(tr.upper);
            } else if (tr.upper == k && !seen[tr.lower]) {
                theta[tr.lower] = theta[k] - nu;
                seen[tr.lower] = true;
                queue.push_back(tr.lower);
            }
        }
    }
    for (int k = 0; k < n; ++k)
        if (!seen[k]) theta[k] = energy[k];

    RotatingFrame frame;
    frame.diagonal.resize(n);
    for (int k = 0; k < n; ++k) frame.diagonal[k] = energy[k] - theta[k];
    frame.residual.reserve(scheme.transitions.size());
    for (const auto& tr : scheme.transitions) {
        const double nu = offsets[static_cast<int>(tr.field)];
        frame.residual.push_back(nu - (theta[tr.upper] - theta[tr.lower]));
    }
    return frame;
}

Complex coupling_element(const Transition& tr, Complex field_rabi, double residual, double t) {
    Complex c = -tr.weight * field_rabi;
    if (residual != 0.0) c *= std::polar(1.0, -residual * t);
    return c;
}

namespace {

void check_signal(const SignalRabi& s) {
    if (!std::isfinite(s.s1.real()) || !std::isfinite(s.s1.imag()) || !std::isfinite(s.s2.real()) ||
        !std::isfinite(s.s2.imag()))
        throw InvalidArgument("signal envelopes must be finite");
}

Complex field_value(FieldId f, const DriveConfig& drive, const SignalRabi& signal) {
    switch (f) {
        case FieldId::Control: return {drive.omega_c, 0.0};
        case FieldId::Signal1: return signal.s1;
        case FieldId::Signal2: return signal.s2;
    }
    return {};
}

}  // namespace

HamiltonianMatrix interaction_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive,
                                          const SignalRabi& signal, double t) {
    check_signal(signal);
    const auto frame = rotating_frame(scheme, drive);
    const int n = scheme.size();
    HamiltonianMatrix h = HamiltonianMatrix::Zero(n, n);
    for (std::size_t i = 0; i < scheme.transitions.size(); ++i) {
        const auto& tr = scheme.transitions[i];
        const Complex c = coupling_element(tr, field_value(tr.field, drive, signal), frame.residual[i], t);
        h(tr.upper, tr.lower) += c;
        h(tr.lower, tr.upper) += std::conj(c);
    }
    return h;
}

HamiltonianMatrix build_hamiltonian(const LevelScheme& scheme, const DriveConfig& drive, const SignalRabi& signal,
                                    double t) {
    HamiltonianMatrix h = interaction_hamiltonian(scheme, drive, signal, t);
    const auto frame = rotating_frame(scheme, drive);
    for (int k = 0; k < scheme.size(); ++k) h(k, k) += frame.diagonal[k];
    return h;
}

std::vector<JumpOperator> lindblad_dissipators(const LevelScheme& scheme, double gamma_ground) {
    if (gamma_ground < 0.0) throw InvalidArgument("gamma_ground must be nonnegative");
    std::vector<JumpOperator> ops;
    for (const auto& b : scheme.branching) ops.push_back({b.lower, b.upper, scheme.decay_rate * b.fraction});
    if (gamma_ground > 0.0)
        for (int g : scheme.ground_indices()) ops.push_back({g, g, gamma_ground});
    return ops;
}

DarkSubspace dark_states(const LevelScheme& scheme, const DriveConfig& drive, const SignalRabi& signal) {
    const HamiltonianMatrix h = interaction_hamiltonian(scheme, drive, signal);
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) throw InvalidArgument("dark subspace undefined: all drives are zero");
    const double tol = 1e-12 * scale;

    const auto ground = scheme.ground_indices();
    const auto excited = scheme.excited_indices();
    const int n = scheme.size();

    std::vector<bool> driven(n, false);
    for (int g : ground)
        for (int e : excited)
            if (std::abs(h(e, g)) > tol) driven[g] = true;

    // Modified Gram-Schmidt with one re-orthogonalisation pass.
    std::vector<ComplexVector> basis;
    const auto orthogonalise = [&](ComplexVector v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b * b.dot(v);
        return v;
    };

    // Bright directions: conjugated coupling rows, restricted to ground states.
    for (int e : excited) {
        ComplexVector row = ComplexVector::Zero(n);
        for (int g : ground) row(g) = std::conj(h(e, g));
        const double norm0 = row.norm();
        if (norm0 <= tol) continue;
        ComplexVector v = orthogonalise(row);
        if (v.norm() > 1e-10 * norm0) basis.push_back(v / v.norm());
    }

    DarkSubspace out;
    std::vector<ComplexVector> dark;
    for (int g : ground) {
        if (!driven[g]) continue;
        ComplexVector v = orthogonalise(ComplexVector::Unit(n, g));
        if (v.norm() > 1e-8) {
            v /= v.norm();
            basis.push_back(v);
            dark.push_back(v);
        }
    }
    out.driven = static_cast<int>(dark.size());
    for (int g : ground) {
        if (driven[g]) continue;
        dark.push_back(ComplexVector::Unit(n, g));
    }
    out.spectator = static_cast<int>(dark.size()) - out.driven;

    out.basis.resize(n, static_cast<Eigen::Index>(dark.size()));
    for (std::size_t j = 0; j < dark.size(); ++j) out.basis.col(static_cast<Eigen::Index>(j)) = dark[j];
    return out;
}

double clebsch_gordan(int j1, int m1, int j2, int m2, int j, int m) {
    if (m1 + m2 != m) return 0.0;
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m) > j) return 0.0;
    if (j < std::abs(j1 - j2) || j > j1 + j2) return 0.0;
    const double pre =
        std::sqrt((2.0 * j + 1.0) * factorial(j + j1 - j2) * factorial(j - j1 + j2) * factorial(j1 + j2 - j) /
                  factorial(j1 + j2 + j + 1)) *
        std::sqrt(factorial(j + m) * factorial(j - m) * factorial(j1 - m1) * factorial(j1 + m1) *
                  factorial(j2 - m2) * factorial(j2 + m2));
    double sum = 0.0;
    for (int k = 0; k <= j1 + j2 + j; ++k) {
        const int a = j1 + j2 - j - k, b = j1 - m1 - k, c = j2 + m2 - k, d = j - j2 + m1 + k,
                  e = j - j1 - m2 + k;
        if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
        const double term = 1.0 / (factorial(k) * factorial(a) * factorial(b) * factorial(c) * factorial(d) *
                                   factorial(e));
        sum += (k % 2 == 0 ? term : -term);
    }
    return pre * sum;
}

}  // namespace tripod
