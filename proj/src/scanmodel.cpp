#include "ics/scanmodel.hpp"

#include <cmath>
#include <random>

#include "ics/errors.hpp"
#include "ics/rng.hpp"

namespace ics {

void validate(const SpdcSourceParams& p) {
    if (p.coherence_time_ps <= 0) throw ValidationError("coherence_time_ps must be > 0");
    if (p.pair_rate_cps < 0) throw ValidationError("pair_rate_cps must be >= 0");
    if (p.singles_rates_cps[0] < 0 || p.singles_rates_cps[1] < 0) {
        throw ValidationError("singles_rates_cps must be >= 0");
    }
    if (p.rep_rate_hz <= 0) throw ValidationError("rep_rate_hz must be > 0");
}

void validate(const LaserSourceParams& p) {
    if (p.beat_period_ps <= 0) throw ValidationError("beat_period_ps must be > 0");
    if (p.pulse_width_ps <= 0) throw ValidationError("pulse_width_ps must be > 0");
    if (p.mean_photons_per_pulse <= 0) {
        throw ValidationError("mean_photons_per_pulse must be > 0");
    }
    if (p.rep_rate_hz <= 0) throw ValidationError("rep_rate_hz must be > 0");
    if (p.asymptotic_coinc_rate_cps <= 0) {
        throw ValidationError("asymptotic_coinc_rate_cps must be > 0");
    }
}

double expected_spdc_rate(const ChannelPrediction& pred, double tau_ps,
                          const SpdcSourceParams& params,
                          double skew_offset_ps, double visibility_scale) {
    validate(params);
    if (visibility_scale < 0 || visibility_scale > 1) {
        throw ValidationError("visibility_scale must be in [0,1]");
    }
    const double t = tau_ps - skew_offset_ps;
    const double s = params.coherence_time_ps;
    const double g = std::exp(-t * t / (2.0 * s * s));
    return params.pair_rate_cps *
           (1.0 - visibility_scale * pred.ideal_visibility * g);
}

double expected_laser_rate(double tau_ps, const LaserSourceParams& params,
                           double skew_offset_ps) {
    validate(params);
    const double t = tau_ps - skew_offset_ps;
    const double c = std::cos(M_PI * t / params.beat_period_ps);
    const double g =
        std::exp(-t * t / (2.0 * params.pulse_width_ps * params.pulse_width_ps));
    return params.asymptotic_coinc_rate_cps * (1.0 - 0.5 * c * c * g);
}

double accidental_rate(double rate_a_cps, double rate_b_cps, double rep_rate_hz) {
    if (rate_a_cps < 0 || rate_b_cps < 0) {
        throw ValidationError("singles rates must be >= 0");
    }
    if (rep_rate_hz <= 0) throw ValidationError("rep_rate_hz must be > 0");
    return rate_a_cps * rate_b_cps / rep_rate_hz;
}

ScanRecord sample_scan(const std::function<double(double)>& rate_cps,
                       const std::vector<double>& grid_ps,
                       double integration_time_s, std::uint64_t seed) {
    if (grid_ps.empty()) throw ValidationError("delay grid is empty");
    for (std::size_t i = 1; i < grid_ps.size(); ++i) {
        if (grid_ps[i] <= grid_ps[i - 1]) {
            throw ValidationError("delay grid must be strictly increasing");
        }
    }
    if (integration_time_s <= 0) {
        throw ValidationError("integration_time_s must be > 0");
    }
    ScanRecord rec;
    rec.delay_grid_ps = grid_ps;
    rec.integration_time_s = integration_time_s;
    rec.seed = seed;
    rec.counts.reserve(grid_ps.size());
    auto engine = make_engine(seed);
    for (double tau : grid_ps) {
        const double mean = rate_cps(tau) * integration_time_s;
        if (!(mean >= 0)) {
            throw NumericalError("expected rate is negative or NaN at tau=" +
                                 std::to_string(tau));
        }
        if (mean == 0.0) {
            rec.counts.push_back(0.0);
        } else {
            std::poisson_distribution<long long> pois(mean);
            rec.counts.push_back(static_cast<double>(pois(engine)));
        }
    }
    return rec;
}

ScanRecord subtract_accidentals(const ScanRecord& record, double accidental_cps) {
    if (accidental_cps < 0) throw ValidationError("accidental_cps must be >= 0");
    ScanRecord out = record;
    const double expectation = accidental_cps * record.integration_time_s;
    std::vector<double> variance;
    variance.reserve(record.counts.size());
    for (std::size_t i = 0; i < record.counts.size(); ++i) {
        const double prior_var = record.variance
                                     ? (*record.variance)[i]
                                     : record.counts[i];
        variance.push_back(prior_var + expectation);
        out.counts[i] = record.counts[i] - expectation;
    }
    out.variance = std::move(variance);
    return out;
}

bool has_negative_counts(const ScanRecord& record) {
    for (double c : record.counts) {
        if (c < 0) return true;
    }
    return false;
}

std::vector<double> spdc_grid(double center_ps, double range_ps, double step_ps) {
    if (range_ps <= 0 || step_ps <= 0) {
        throw ValidationError("range_ps and step_ps must be > 0");
    }
    const int half = static_cast<int>(std::llround(range_ps / (2.0 * step_ps)));
    std::vector<double> grid;
    grid.reserve(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        grid.push_back(center_ps + i * step_ps);
    }
    return grid;
}

std::vector<double> laser_coarse_grid(double center_ps, double beat_period_ps,
                                      double pulse_width_ps) {
    if (beat_period_ps <= 0 || pulse_width_ps <= 0) {
        throw ValidationError("beat_period_ps and pulse_width_ps must be > 0");
    }
    const double step = beat_period_ps / 4.0;
    const int half = static_cast<int>(std::ceil(3.0 * pulse_width_ps / step));
    std::vector<double> grid;
    grid.reserve(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        grid.push_back(center_ps + i * step);
    }
    return grid;
}

std::vector<double> laser_fine_grid(double center_ps, double beat_period_ps) {
    if (beat_period_ps <= 0) throw ValidationError("beat_period_ps must be > 0");
    const double step = beat_period_ps / 50.0;
    std::vector<double> grid;
    grid.reserve(51);
    for (int i = -25; i <= 25; ++i) {
        grid.push_back(center_ps + i * step);
    }
    return grid;
}

}  // namespace ics
