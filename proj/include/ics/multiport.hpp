#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ics {

// Real 4x4 multiport matrix. Construct through make_unitary() or
// hadamard_unitary() so the orthogonality invariant is enforced.
struct MultiportUnitary {
    Eigen::Matrix4d entries;
};

// Checks U*U^T = I within 1e-12 elementwise; throws ValidationError otherwise.
MultiportUnitary make_unitary(const Eigen::Matrix4d& entries);

// Normalized Sylvester construction H2 (x) H2, all entries +-1/2.
MultiportUnitary hadamard_unitary();

enum class FeatureKind { dip, peak };

// Row index -> output letter. Default is row order A,B,C,D; a permutation
// absorbs the labelling freedom between model and measured channels.
using OutputLabels = std::array<char, 4>;
inline constexpr OutputLabels default_output_labels{'A', 'B', 'C', 'D'};

struct ChannelPrediction {
    std::string output_pair;   // two letters, lexicographically ordered, e.g. "AC"
    FeatureKind kind;
    double ideal_visibility;   // signed, in [-1,1]; dip > 0, peak < 0
    double p_dist;             // distinguishable-photon coincidence probability
};

// Two-photon coincidence predictions for one ordered input pair (labels in
// {1..4}), one prediction per unordered output pair (6 total).
// ideal_visibility = 1 - |U_ki*U_lj + U_li*U_kj|^2 / p_dist with
// p_dist = |U_ki*U_lj|^2 + |U_li*U_kj|^2.
std::vector<ChannelPrediction> classify_output_pairs(
    const MultiportUnitary& u, int input_j, int input_k,
    const OutputLabels& labels = default_output_labels);

// p_dist * [1 - visibility_scale * ideal_visibility * exp(-tau^2/(2 sigma^2))].
double coincidence_probability(const ChannelPrediction& pred, double tau_ps,
                               double coherence_time_ps,
                               double visibility_scale = 1.0);

}  // namespace ics
