#pragma once

#include <Eigen/Dense>

#include "ics/scanmodel.hpp"

namespace ics {

struct InitialGuess {
    double baseline;
    double amplitude;  // signed: negative for a dip
    double center_ps;
    double width_ps;
};

// Model: counts = a + b * exp(-(tau-d)^2 / (2 sigma^2)).
struct GaussianFit {
    double baseline;        // a > 0
    double amplitude;       // b, signed
    double center_ps;       // d
    double width_ps;        // sigma > 0
    Eigen::Matrix4d covariance;  // over (a, b, d, sigma)
    double visibility;      // |b|/a
    double reduced_chi2;
    int iterations;

    double center_sigma_ps() const { return std::sqrt(covariance(2, 2)); }
};

// Model: counts = a + b * cos^2(pi (tau-d)/T) * exp(-(tau-d)^2/(2 sigma_p^2)),
// with the pulse width sigma_p held fixed: a single beat period cannot
// constrain an envelope an order of magnitude wider.
struct BeatFit {
    double baseline;        // a
    double amplitude;       // b, signed (negative: fringe minima are dips)
    double center_ps;       // d
    double beat_period_ps;  // T > 0
    Eigen::Matrix4d covariance;  // over (a, b, d, T)
    double effective_precision_ps;  // T/(2 pi)
    double reduced_chi2;
    int iterations;

    double center_sigma_ps() const { return std::sqrt(covariance(2, 2)); }
};

struct BeatFitOptions {
    double pulse_width_ps = 127.0;
    double beat_period_guess_ps = 10.0;
};

// Seeds from the data: baseline from the outer-quartile median, center from
// the extremum of a 5-point moving average, width from the half-depth
// crossings, amplitude from extremum minus baseline. Throws NumericalError
// when no feature stands out at 2 sigma of counting noise, or when the
// feature's sign contradicts `kind`.
InitialGuess initial_guess(const ScanRecord& record, FeatureKind kind);

// Dip-or-peak detection from the sign of the dominant smoothed deviation.
FeatureKind detect_kind(const ScanRecord& record);

// Damped Gauss-Newton weighted least squares. Weights are model-based
// Poisson variances (re-weighted once after a first convergence), or the
// record's stored variance for accidental-corrected records. Convergence:
// relative parameter change < 1e-10, at most 200 iterations per pass.
GaussianFit fit_gaussian(const ScanRecord& record);

BeatFit fit_beat_envelope(const ScanRecord& record,
                          const BeatFitOptions& options = {});

}  // namespace ics
