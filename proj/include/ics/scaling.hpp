#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ics {

struct LengthPoint {
    double length_m;     // > 0
    double rms_ps;       // > 0
    double sigma_rms_ps; // > 0
    int n_pairs = 6;     // pairs contributing to the RMS, in [1,6]
};

// rms = kappa * sqrt(L) + c, weighted linear least squares in sqrt(L) with
// weights (1/sigma^2) * (n_pairs/6).
struct SqrtFit {
    double kappa;         // ps / sqrt(m)
    double offset_c;      // ps
    Eigen::Matrix2d covariance;  // over (kappa, c)
    double r_squared;     // weighted
};

// rms = A * L^alpha, fit as log10(rms) = alpha*log10(L) + log10(A) with
// sigma_logy = sigma/(rms * ln 10) and the same n_pairs down-weighting.
struct PowerLawFit {
    double amplitude_A;     // ps * m^(-alpha)
    double exponent_alpha;
    Eigen::Matrix2d covariance;  // over (alpha, log10 A)
    double r_squared;       // weighted, in log space
};

struct BootstrapResult {
    double point_estimate;  // alpha from the full dataset
    double ci_low;          // 95% percentile interval
    double ci_high;
    int n_resamples;
    std::uint64_t seed;
};

void validate(const std::vector<LengthPoint>& points);

SqrtFit fit_sqrt_model(const std::vector<LengthPoint>& points);

PowerLawFit fit_power_law(const std::vector<LengthPoint>& points);

// Case resampling of whole length points with replacement; resamples with
// fewer than 3 distinct lengths are redrawn so the resample count stays
// exact. 95% CI for alpha by the percentile method (linear interpolation of
// order statistics). Deterministic per seed.
BootstrapResult bootstrap_ci(const std::vector<LengthPoint>& points,
                             int n_resamples = 5000, std::uint64_t seed = 0);

}  // namespace ics
