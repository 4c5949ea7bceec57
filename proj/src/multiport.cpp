#include "ics/multiport.hpp"

#include <cmath>
#include <utility>

#include "ics/errors.hpp"

namespace ics {

MultiportUnitary make_unitary(const Eigen::Matrix4d& entries) {
    Eigen::Matrix4d gram = entries * entries.transpose();
    Eigen::Matrix4d dev = gram - Eigen::Matrix4d::Identity();
    if (dev.cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("matrix is not orthogonal: max |U*U^T - I| = " +
                              std::to_string(dev.cwiseAbs().maxCoeff()));
    }
    return MultiportUnitary{entries};
}

MultiportUnitary hadamard_unitary() {
    Eigen::Matrix2d h2;
    h2 << 1, 1, 1, -1;
    Eigen::Matrix4d h4;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            h4.block<2, 2>(2 * i, 2 * j) = h2(i, j) * h2;
    return make_unitary(0.5 * h4);
}

std::vector<ChannelPrediction> classify_output_pairs(
    const MultiportUnitary& u, int input_j, int input_k,
    const OutputLabels& labels) {
    if (input_j < 1 || input_j > 4 || input_k < 1 || input_k > 4) {
        throw ValidationError("input labels must be in {1..4}");
    }
    if (input_j == input_k) {
        throw ValidationError("input labels must be distinct");
    }
    const Eigen::Matrix4d& m = u.entries;
    const int i = input_j - 1;
    const int j = input_k - 1;

    std::vector<ChannelPrediction> out;
    out.reserve(6);
    for (int k = 0; k < 4; ++k) {
        for (int l = k + 1; l < 4; ++l) {
            const double a1 = m(k, i) * m(l, j);
            const double a2 = m(l, i) * m(k, j);
            const double p_dist = a1 * a1 + a2 * a2;
            const double amp = a1 + a2;
            const double vis = 1.0 - amp * amp / p_dist;
            char c1 = labels[k];
            char c2 = labels[l];
            if (c2 < c1) std::swap(c1, c2);
            out.push_back(ChannelPrediction{
                std::string{c1, c2},
                vis > 0 ? FeatureKind::dip : FeatureKind::peak, vis, p_dist});
        }
    }
    return out;
}

double coincidence_probability(const ChannelPrediction& pred, double tau_ps,
                               double coherence_time_ps,
                               double visibility_scale) {
    if (coherence_time_ps <= 0) {
        throw ValidationError("coherence_time_ps must be > 0");
    }
    const double g = std::exp(-tau_ps * tau_ps /
                              (2.0 * coherence_time_ps * coherence_time_ps));
    return pred.p_dist *
           (1.0 - visibility_scale * pred.ideal_visibility * g);
}

}  // namespace ics
