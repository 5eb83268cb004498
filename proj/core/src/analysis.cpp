#include "tripod/analysis.hpp"

#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace tripod {

namespace {

struct WindowData {
    Eigen::VectorXd s;  // time since window start
    Eigen::VectorXd y;
    double t0 = 0.0;
};

WindowData select_window(const std::vector<double>& t, const std::vector<double>& y, FitWindow w) {
    if (t.size() != y.size()) throw InvalidArgument("trace time and intensity lengths differ");
    if (!(w.t1 > w.t0)) throw InvalidArgument("fit window must have t1 > t0");
    std::vector<double> ss, yy;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < w.t0 || t[i] > w.t1) continue;
        if (!std::isfinite(y[i])) throw InvalidArgument("trace contains non-finite samples");
        ss.push_back(t[i] - w.t0);
        yy.push_back(y[i]);
    }
    WindowData d;
    d.t0 = w.t0;
    d.s = Eigen::Map<Eigen::VectorXd>(ss.data(), static_cast<Eigen::Index>(ss.size()));
    d.y = Eigen::Map<Eigen::VectorXd>(yy.data(), static_cast<Eigen::Index>(yy.size()));
    return d;
}

enum Param { kOffset, kAmp, kRate, kVis, kFreq, kPhase, kParams };

struct BeatFunctor : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& s;
    const Eigen::VectorXd& y;

    BeatFunctor(const Eigen::VectorXd& s_, const Eigen::VectorXd& y_)
        : Eigen::DenseFunctor<double>(kParams, static_cast<int>(s_.size())), s(s_), y(y_) {}

    int operator()(const InputType& p, ValueType& r) const {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double e = std::exp(-p[kRate] * s[i]);
            const double c = std::cos(units::two_pi * p[kFreq] * s[i] + p[kPhase]);
            r[i] = p[kOffset] + p[kAmp] * e * (1.0 + p[kVis] * c) - y[i];
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& j) const {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double e = std::exp(-p[kRate] * s[i]);
            const double arg = units::two_pi * p[kFreq] * s[i] + p[kPhase];
            const double c = std::cos(arg);
            const double sn = std::sin(arg);
            const double ae = p[kAmp] * e;
            j(i, kOffset) = 1.0;
            j(i, kAmp) = e * (1.0 + p[kVis] * c);
            j(i, kRate) = -s[i] * ae * (1.0 + p[kVis] * c);
            j(i, kVis) = ae * c;
            j(i, kFreq) = -ae * p[kVis] * sn * units::two_pi * s[i];
            j(i, kPhase) = -ae * p[kVis] * sn;
        }
        return 0;
    }
};

struct ProjectedFunctor : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& s;
    const Eigen::VectorXd& y;

    ProjectedFunctor(const Eigen::VectorXd& s_, const Eigen::VectorXd& y_)
        : Eigen::DenseFunctor<double>(2, static_cast<int>(s_.size())), s(s_), y(y_) {}

    Eigen::MatrixXd basis(double rate, double f) const {
        Eigen::MatrixXd b(s.size(), 4);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double e = std::exp(-rate * s[i]);
            const double w = units::two_pi * f * s[i];
            b(i, 0) = 1.0;
            b(i, 1) = e;
            b(i, 2) = e * std::cos(w);
            b(i, 3) = e * std::sin(w);
        }
        return b;
    }

    Eigen::Vector4d coefficients(double rate, double f) const {
        return basis(rate, f).completeOrthogonalDecomposition().solve(y);
    }

    int operator()(const InputType& q, ValueType& r) const {
        const Eigen::MatrixXd b = basis(q[0], q[1]);
        r = b * b.completeOrthogonalDecomposition().solve(y) - y;
        return 0;
    }
};

double wrap_phase(double phi) {
    phi = std::remainder(phi, units::two_pi);
    if (phi <= -units::pi) phi += units::two_pi;
    return phi;
}

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Baseline polynomial plus a tone at angular frequency w: returns coefficients
// (c0, c1, c2, a_cos, b_sin).
Eigen::VectorXd tone_projection(const Eigen::VectorXd& s, const Eigen::VectorXd& y, double w, int poly_order) {
    const Eigen::Index n = s.size();
    Eigen::MatrixXd a(n, poly_order + 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (int k = 0; k <= poly_order; ++k, p *= s[i]) a(i, k) = p;
        a(i, poly_order + 1) = std::cos(w * s[i]);
        a(i, poly_order + 2) = std::sin(w * s[i]);
    }
    return a.colPivHouseholderQr().solve(y);
}

}  // namespace

BeatFitResult fit_beat(const std::vector<double>& t, const std::vector<double>& intensity, FitWindow window) {
    const WindowData d = select_window(t, intensity, window);
    const Eigen::Index n = d.s.size();
    if (n < 50) throw FitError(FitError::Kind::Degenerate, "fit window holds fewer than 50 samples");
    const double span = d.s[n - 1] - d.s[0];
    const double ds = span / static_cast<double>(n - 1);

    // Linear detrend, then zero-padded DFT.
    Eigen::MatrixXd lin(n, 2);
    lin.col(0).setOnes();
    lin.col(1) = d.s;
    const Eigen::Vector2d trend = lin.colPivHouseholderQr().solve(d.y);
    const Eigen::VectorXd detrended = d.y - lin * trend;

    const std::size_t npad = 4 * static_cast<std::size_t>(n);
    std::vector<double> padded(npad, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = detrended[i];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, padded);

    const double df = 1.0 / (static_cast<double>(npad) * ds);
    const std::size_t k_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(2.0 / (span * df))));
    const std::size_t k_max = npad / 2;
    if (k_min + 2 >= k_max) throw FitError(FitError::Kind::Degenerate, "fit window too short for a spectral guess");
    std::vector<double> mag(k_max + 1, 0.0);
    for (std::size_t k = 0; k <= k_max; ++k) mag[k] = std::abs(spectrum[k]);
    std::size_t k_peak = k_min;
    for (std::size_t k = k_min; k < k_max; ++k)
        if (mag[k] > mag[k_peak]) k_peak = k;
    const double floor =
        median(std::vector<double>(mag.begin() + static_cast<std::ptrdiff_t>(k_min), mag.begin() + static_cast<std::ptrdiff_t>(k_max)));
    const double level = d.y.cwiseAbs().mean();
    const double tone = 2.0 * mag[k_peak] / static_cast<double>(n);
    if (!(mag[k_peak] > 3.0 * floor) || !(tone > 1e-9 * level))
        throw FitError(FitError::Kind::NoBeat, "no beat: spectral peak below 3x the noise floor");

    double shift = 0.0;
    if (k_peak > k_min) {
        const double a = mag[k_peak - 1], b = mag[k_peak], c = mag[k_peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    const double f_guess = (static_cast<double>(k_peak) + shift) * df;

    // Variable projection over (rate, frequency); the offset, amplitude and
    // quadrature coefficients are solved exactly at every evaluation.
    ProjectedFunctor projected(d.s, d.y);
    Eigen::NumericalDiff<ProjectedFunctor> projected_diff(projected);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ProjectedFunctor>> lm(projected_diff);
    lm.setXtol(1e-12);
    lm.setFtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(1000000);
    Eigen::VectorXd q(2);
    {
        double best = std::numeric_limits<double>::infinity();
        double rate0 = 0.0;
        Eigen::VectorXd r(n);
        for (double x : {-3.0, -1.0, -0.3, -0.1, 0.1, 0.3, 1.0, 3.0, 10.0}) {
            q << x / span, f_guess;
            projected(q, r);
            if (r.squaredNorm() < best) best = r.squaredNorm(), rate0 = q[0];
        }
        q << rate0, f_guess;
    }
    auto status = lm.minimizeInit(q);
    int iterations = 0;
    if (status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
        do {
            status = lm.minimizeOneStep(q);
            ++iterations;
        } while (status == Eigen::LevenbergMarquardtSpace::Running && iterations < 200);
    }
    if (status == Eigen::LevenbergMarquardtSpace::Running)
        throw FitError(FitError::Kind::NoConvergence, "beat fit did not converge within 200 iterations");
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !q.allFinite())
        throw FitError(FitError::Kind::Degenerate, "beat fit failed");
    const Eigen::Vector4d lin_c = projected.coefficients(q[0], q[1]);

    Eigen::VectorXd p(kParams);
    p[kOffset] = lin_c[0];
    p[kAmp] = lin_c[1];
    p[kRate] = q[0];
    p[kFreq] = q[1];
    p[kVis] = lin_c[1] != 0.0 ? std::hypot(lin_c[2], lin_c[3]) / lin_c[1] : 0.0;
    p[kPhase] = std::atan2(-lin_c[3], lin_c[2]);
    BeatFunctor functor(d.s, d.y);

    Eigen::VectorXd resid(n);
    functor(p, resid);
    Eigen::MatrixXd jac(n, kParams);
    functor.df(p, jac);
    const double dof = static_cast<double>(std::max<Eigen::Index>(n - kParams, 1));
    const double sigma2 = resid.squaredNorm() / dof;
    const Eigen::MatrixXd cov = sigma2 * (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse();
    const auto err = [&](int i) {
        const double v = std::sqrt(std::max(cov(i, i), 0.0));
        return std::max(v, std::numeric_limits<double>::min());
    };

    if (p[kFreq] < 0.0) {
        p[kFreq] = -p[kFreq];
        p[kPhase] = -p[kPhase];
    }

    BeatFitResult r;
    r.f_mhz = p[kFreq];
    r.phase = wrap_phase(p[kPhase]);
    {
        const double env = p[kAmp] * std::exp(-p[kRate] * 0.5 * span);
        const double mean = p[kOffset] + env;
        r.visibility = mean != 0.0 ? std::clamp(std::abs(env * p[kVis] / mean), 0.0, 1.0) : 0.0;
    }
    r.tau_us = p[kRate] > 0.0 ? 1.0 / p[kRate] : std::numeric_limits<double>::infinity();
    r.offset = p[kOffset];
    r.amplitude = p[kAmp];
    r.f_err = err(kFreq);
    r.phase_err = err(kPhase);
    r.visibility_err = err(kVis);
    r.tau_err = p[kRate] > 0.0 ? err(kRate) / (p[kRate] * p[kRate]) : err(kRate);
    r.offset_err = err(kOffset);
    r.amplitude_err = err(kAmp);
    r.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    r.t0 = d.t0;
    r.iterations = iterations;
    r.samples = static_cast<int>(n);
    const double ptp = d.y.maxCoeff() - d.y.minCoeff();
    r.accepted = r.residual_rms <= 0.1 * ptp;
    if (r.f_mhz * span < 3.0)
        throw FitError(FitError::Kind::Degenerate, "fit window covers fewer than 3 beat periods");
    return r;
}

double beat_visibility_at(const std::vector<double>& t, const std::vector<double>& intensity, FitWindow window,
                          double f_mhz) {
    const WindowData d = select_window(t, intensity, window);
    if (d.s.size() < 8) throw FitError(FitError::Kind::Degenerate, "window holds too few samples");
    const Eigen::VectorXd c = tone_projection(d.s, d.y, units::two_pi * f_mhz, 2);
    double base = 0.0;
    for (Eigen::Index i = 0; i < d.s.size(); ++i) base += c[0] + c[1] * d.s[i] + c[2] * d.s[i] * d.s[i];
    base /= static_cast<double>(d.s.size());
    if (!(std::abs(base) > 0.0)) throw FitError(FitError::Kind::Degenerate, "zero mean intensity in window");
    return std::hypot(c[3], c[4]) / std::abs(base);
}

LinFit fit_linear(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma) {
    const std::size_t n = x.size();
    if (y.size() != n || sigma.size() != n) throw InvalidArgument("fit_linear inputs differ in length");
    if (n < 3) throw FitError(FitError::Kind::Degenerate, "linear fit needs at least 3 points");
    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0)) throw InvalidArgument("point uncertainties must be positive");
        const double w = 1.0 / (sigma[i] * sigma[i]);
        s += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    const double xm = sx / s;
    double sxx_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxx_c += (x[i] - xm) * (x[i] - xm) / (sigma[i] * sigma[i]);
    if (!(sxx_c > 1e-300) || sxx_c <= 1e-14 * sxx)
        throw FitError(FitError::Kind::Degenerate, "linear fit abscissas are all identical");

    LinFit f;
    const double ym = sy / s;
    double sxy_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy_c += (x[i] - xm) * (y[i] - ym) / (sigma[i] * sigma[i]);
    f.slope = sxy_c / sxx_c;
    f.intercept = ym - f.slope * xm;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        ss_res += w * std::pow(y[i] - f.intercept - f.slope * x[i], 2);
        ss_tot += w * std::pow(y[i] - ym, 2);
    }
    f.chi_squared = ss_res;
    f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    // Inflate by the Birge ratio when the scatter exceeds the quoted errors.
    const double birge = std::max(1.0, ss_res / static_cast<double>(n - 2));
    f.slope_err = std::sqrt(birge / sxx_c);
    f.intercept_err = std::sqrt(birge * (1.0 / s + xm * xm / sxx_c));
    return f;
}

}  // namespace tripod
