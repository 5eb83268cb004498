#pragma once

#include <limits>
#include <vector>

namespace tripod {

/// I(t) = offset + A exp(-(t - t0) / tau) (1 + V cos(2 pi f (t - t0) + phase)),
/// with t0 the window start.
struct BeatFitResult {
    double f_mhz = 0.0;
    double phase = 0.0;  ///< rad, in (-pi, pi]
    double visibility = 0.0;
    double tau_us = std::numeric_limits<double>::infinity();
    double offset = 0.0;
    double amplitude = 0.0;

    double f_err = 0.0;
    double phase_err = 0.0;
    double visibility_err = 0.0;
    double tau_err = 0.0;
    double offset_err = 0.0;
    double amplitude_err = 0.0;

    double residual_rms = 0.0;
    double t0 = 0.0;
    int iterations = 0;
    int samples = 0;
    /// residual_rms <= 10% of the peak-to-peak trace amplitude in the window.
    bool accepted = false;
};

struct FitWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Damped-sinusoid least squares. The initial frequency comes from a x4
/// zero-padded DFT of the linearly detrended window with parabolic peak
/// interpolation. Throws FitError::NoBeat when the spectral peak is below 3x the
/// median noise floor, FitError::NoConvergence after 200 iterations, and
/// FitError::Degenerate when the window has fewer than 50 samples or 3 periods.
BeatFitResult fit_beat(const std::vector<double>& t, const std::vector<double>& intensity, FitWindow window);

/// Visibility of a tone at a known frequency: linear least squares of the
/// window against a quadratic baseline plus cos and sin at f_mhz, returning
/// sqrt(a^2 + b^2) over the mean baseline.
double beat_visibility_at(const std::vector<double>& t, const std::vector<double>& intensity, FitWindow window,
                          double f_mhz);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double intercept_err = 0.0;
    double r_squared = 0.0;
    double chi_squared = 0.0;
};

/// Error-weighted straight-line least squares (closed form). Points with
/// sigma <= 0 are rejected. Throws FitError::Degenerate for fewer than 3 points
/// or identical abscissas.
LinFit fit_linear(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma);

}  // namespace tripod
