#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ics {

inline constexpr double speed_of_light_m_per_s = 2.99792458e8;

struct FiberSpec {
    double length_m;
    std::vector<double> group_indices;  // per core, all > 1
};

struct RandomWalkParams {
    double step_length_m = 0.1;
    double step_std_ps = 0.0;                    // per-core delay std per step
    std::vector<double> connector_positions_m;   // sorted, within [0, length]
    double connector_offset_std_ps = 0.0;        // per-core jump std per connector
    std::uint64_t seed = 0;
};

struct SkewSample {
    std::pair<int, int> pair;  // core labels, 1-based
    double skew_ps;            // signed; antisymmetric under pair reversal
};

struct EnsemblePoint {
    double length_m;
    double rms_ps;        // pooled over trials and the 6 core pairs
    double sigma_rms_ps;  // standard error of rms_ps
};

// L * n_g / c, in ps.
double absolute_delay(double length_m, double group_index);

// (L/c) * (n_gj - n_gk), in ps; antisymmetric in the two indices.
double deterministic_skew(double length_m, double n_gj, double n_gk);

// deterministic_skew for two cores of a FiberSpec (1-based labels).
SkewSample skew_between(const FiberSpec& fiber, int core_j, int core_k);

// Per-core independent zero-mean random walks (Gaussian increments of std
// step_std_ps per step of step_length_m), plus one independent Gaussian
// per-core offset at each connector position. Returns, per requested length,
// the RMS over the 6 pairwise core differences pooled across trials:
// rms = sqrt(mean over trials of the per-trial mean-square), with the
// standard error propagated from the spread of per-trial mean-squares.
// Deterministic per seed; trial substreams are derived with derive_seed so
// the result does not depend on evaluation order.
std::vector<EnsemblePoint> simulate_walk_ensemble(
    const RandomWalkParams& params, const std::vector<double>& lengths_m,
    int n_cores, int n_trials);

}  // namespace ics
