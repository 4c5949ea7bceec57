#pragma once

#include <optional>

namespace ics {

struct DipShape {
    double p_dist;            // baseline coincidence probability, in (0,1)
    double visibility;        // in [0,1]; 0 carries no timing information
    double coherence_time_ps; // > 0
};

void validate(const DipShape& shape);

struct IntegratedInfo {
    double integrated_info_per_ps;  // integral of the per-trial information
    double shape_factor;            // dimensionless: coherence_time * integral
};

struct CrbReport {
    double integrated_info_per_ps;
    double shape_factor;
    double n_eff;    // effective trials within one dip width
    double crb_ps;   // coherence_time / sqrt(n_eff * shape_factor)
    bool range_warning;  // scan range under 4 coherence times
};

// Per-trial Fisher information of the binary coincidence outcome at delay
// tau: (dP/dtau)^2 / (P (1-P)) with P = p_dist (1 - V exp(-tau^2/2 sigma^2)),
// analytic derivative. Returns 0 in the P -> 0 or P -> 1 limits (the exact
// dip bottom at V = 1 carries no information in this parametrization).
double fisher_info_at(const DipShape& shape, double tau_ps);

// Adaptive quadrature over +-10 coherence times, relative tolerance 1e-9.
// The integrand decays like a squared Gaussian so the truncated tails are
// far below the tolerance.
IntegratedInfo integrated_info(const DipShape& shape);

// Cramer-Rao bound for a scan totalling N counts over range_ps. Counts are
// converted to Bernoulli trials through detection_probability (default: the
// shape's p_dist, making the expected count total of the implied trials
// match N); n_eff = (N / detection_probability) * coherence_time / range.
// Emits range_warning when range < 4 coherence times. visibility = 0 yields
// crb_ps = infinity.
CrbReport crb(const DipShape& shape, double total_counts, double range_ps,
              std::optional<double> detection_probability = {});

}  // namespace ics
