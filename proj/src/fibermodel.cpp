#include "ics/fibermodel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ics/errors.hpp"
#include "ics/rng.hpp"

namespace ics {

double absolute_delay(double length_m, double group_index) {
    if (length_m < 0) throw ValidationError("length_m must be >= 0");
    if (group_index <= 1.0) throw ValidationError("group_index must be > 1");
    return length_m * group_index / speed_of_light_m_per_s * 1e12;
}

double deterministic_skew(double length_m, double n_gj, double n_gk) {
    if (length_m < 0) throw ValidationError("length_m must be >= 0");
    return length_m * (n_gj - n_gk) / speed_of_light_m_per_s * 1e12;
}

SkewSample skew_between(const FiberSpec& fiber, int core_j, int core_k) {
    const int n = static_cast<int>(fiber.group_indices.size());
    if (core_j < 1 || core_j > n || core_k < 1 || core_k > n) {
        throw ValidationError("core label out of range");
    }
    return SkewSample{{core_j, core_k},
                      deterministic_skew(fiber.length_m,
                                         fiber.group_indices[core_j - 1],
                                         fiber.group_indices[core_k - 1])};
}

namespace {

struct Event {
    double position_m;
    enum { connector, checkpoint } type;
    int checkpoint_index;  // into the lengths list, for checkpoints
};

}  // namespace

std::vector<EnsemblePoint> simulate_walk_ensemble(
    const RandomWalkParams& params, const std::vector<double>& lengths_m,
    int n_cores, int n_trials) {
    if (params.step_length_m <= 0) {
        throw ValidationError("step_length_m must be > 0");
    }
    if (params.step_std_ps < 0 || params.connector_offset_std_ps < 0) {
        throw ValidationError("std parameters must be >= 0");
    }
    if (lengths_m.empty()) throw ValidationError("lengths list is empty");
    if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
    if (n_cores < 2) throw ValidationError("need at least 2 cores");
    for (double l : lengths_m) {
        if (l <= 0) throw ValidationError("lengths must be > 0");
    }
    const double max_len = *std::max_element(lengths_m.begin(), lengths_m.end());
    for (double p : params.connector_positions_m) {
        if (p < 0 || p > max_len) {
            throw ValidationError("connector position " + std::to_string(p) +
                                  " outside [0, " + std::to_string(max_len) + "]");
        }
    }

    // One ordered event list shared by every trial. Connectors sort before
    // checkpoints at equal position: a junction at exactly L contributes to
    // the skew measured at L.
    std::vector<Event> events;
    events.reserve(lengths_m.size() + params.connector_positions_m.size());
    for (double p : params.connector_positions_m) {
        events.push_back(Event{p, Event::connector, -1});
    }
    for (int i = 0; i < static_cast<int>(lengths_m.size()); ++i) {
        events.push_back(Event{lengths_m[i], Event::checkpoint, i});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) {
                         if (a.position_m != b.position_m)
                             return a.position_m < b.position_m;
                         return a.type < b.type;
                     });

    const int n_lengths = static_cast<int>(lengths_m.size());
    const int n_pairs = n_cores * (n_cores - 1) / 2;
    std::vector<double> sum_ms(n_lengths, 0.0), sum_ms2(n_lengths, 0.0);

    std::vector<std::vector<double>> at_checkpoint(
        n_lengths, std::vector<double>(n_cores));

    for (int trial = 0; trial < n_trials; ++trial) {
        auto engine = make_engine(derive_seed(params.seed, trial));
        std::normal_distribution<double> unit(0.0, 1.0);
        for (int core = 0; core < n_cores; ++core) {
            double value = 0.0;
            long long steps_done = 0;
            for (const Event& ev : events) {
                const long long steps_here =
                    std::llround(ev.position_m / params.step_length_m);
                const long long dn = std::max(0LL, steps_here - steps_done);
                if (dn > 0 && params.step_std_ps > 0) {
                    value += unit(engine) * params.step_std_ps *
                             std::sqrt(static_cast<double>(dn));
                }
                steps_done = std::max(steps_done, steps_here);
                if (ev.type == Event::connector) {
                    if (params.connector_offset_std_ps > 0) {
                        value += unit(engine) * params.connector_offset_std_ps;
                    }
                } else {
                    at_checkpoint[ev.checkpoint_index][core] = value;
                }
            }
        }
        for (int li = 0; li < n_lengths; ++li) {
            double ms = 0.0;
            for (int a = 0; a < n_cores; ++a) {
                for (int b = a + 1; b < n_cores; ++b) {
                    const double d = at_checkpoint[li][a] - at_checkpoint[li][b];
                    ms += d * d;
                }
            }
            ms /= n_pairs;
            sum_ms[li] += ms;
            sum_ms2[li] += ms * ms;
        }
    }

    std::vector<EnsemblePoint> out;
    out.reserve(n_lengths);
    for (int li = 0; li < n_lengths; ++li) {
        const double mean_ms = sum_ms[li] / n_trials;
        const double rms = std::sqrt(mean_ms);
        double sigma = 0.0;
        if (n_trials > 1 && rms > 0) {
            const double var_ms =
                (sum_ms2[li] - n_trials * mean_ms * mean_ms) / (n_trials - 1);
            // SE of the mean-square, mapped through the square root.
            sigma = std::sqrt(std::max(0.0, var_ms) / n_trials) / (2.0 * rms);
        }
        out.push_back(EnsemblePoint{lengths_m[li], rms, sigma});
    }
    return out;
}

}  // namespace ics
