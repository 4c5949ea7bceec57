#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ics/multiport.hpp"

namespace ics {

struct SpdcSourceParams {
    double coherence_time_ps = 0.25;          // HOM envelope width sigma_tau
    double pair_rate_cps = 2600.0;            // asymptotic coincidence baseline
    std::array<double, 2> singles_rates_cps = {5e4, 5e4};
    double rep_rate_hz = 80e6;
};

struct LaserSourceParams {
    double beat_period_ps = 10.0;             // T_beat
    double pulse_width_ps = 127.0;            // sigma_pulse
    double mean_photons_per_pulse = 0.5;      // mu_eff per arm
    double rep_rate_hz = 1e6;
    double asymptotic_coinc_rate_cps = 2600.0;
};

void validate(const SpdcSourceParams& p);
void validate(const LaserSourceParams& p);

enum class SourceKind { spdc, laser };

struct ScanRecord {
    std::vector<double> delay_grid_ps;        // strictly increasing
    std::string channel;                      // output-pair label, e.g. "AC"
    std::vector<double> counts;               // integers until corrected
    double integration_time_s = 1.0;          // per grid point
    SourceKind source_kind = SourceKind::spdc;
    double skew_offset_ps = 0.0;              // true injected center (synthetic)
    std::uint64_t seed = 0;
    // Present only after accidental subtraction; per-point count variance.
    std::optional<std::vector<double>> variance;
};

// pair_rate_cps * [1 - visibility_scale * V * exp(-(tau-offset)^2/(2 sigma^2))];
// the Eq.-level coincidence probability divided by p_dist so the plateau is
// the measured asymptotic coincidence rate.
double expected_spdc_rate(const ChannelPrediction& pred, double tau_ps,
                          const SpdcSourceParams& params,
                          double skew_offset_ps = 0.0,
                          double visibility_scale = 1.0);

// R_inf * [1 - 1/2 cos^2(pi (tau-offset)/T) * exp(-(tau-offset)^2/(2 sigma_p^2))].
double expected_laser_rate(double tau_ps, const LaserSourceParams& params,
                           double skew_offset_ps = 0.0);

// R_A * R_B / f_rep.
double accidental_rate(double rate_a_cps, double rate_b_cps, double rep_rate_hz);

// counts[i] ~ Poisson(rate(grid[i]) * integration_time_s), deterministic per
// seed. Metadata fields (channel, source_kind, skew_offset) are left at their
// defaults for the caller to fill.
ScanRecord sample_scan(const std::function<double(double)>& rate_cps,
                       const std::vector<double>& grid_ps,
                       double integration_time_s, std::uint64_t seed);

// counts -> counts - accidental_cps * integration_time (real-valued), with
// variance = raw counts + accidental expectation. Negative corrected counts
// are permitted; detect them with has_negative_counts().
ScanRecord subtract_accidentals(const ScanRecord& record, double accidental_cps);

bool has_negative_counts(const ScanRecord& record);

// Grid presets. The SPDC scan covers range_ps around center with a step well
// below the coherence time; the laser scan is two-stage: a coarse pass at
// T_beat/4 across the pulse envelope, then a fine pass at T_beat/50 across
// one beat period.
std::vector<double> spdc_grid(double center_ps, double range_ps = 1.8,
                              double step_ps = 0.05);
std::vector<double> laser_coarse_grid(double center_ps, double beat_period_ps,
                                      double pulse_width_ps);
std::vector<double> laser_fine_grid(double center_ps, double beat_period_ps);

}  // namespace ics
