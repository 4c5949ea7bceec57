#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ics {

// Ordered core pair (j,k), labels 1-based, j != k.
using OrderedPair = std::pair<int, int>;
// Unordered pair, stored with first < second.
using UnorderedPair = std::pair<int, int>;

struct DipEntry {
    double position_ps;  // d_jk
    double sigma_ps;     // sigma_d > 0
};

struct DipTable {
    std::map<OrderedPair, DipEntry> entries;
};

enum class SkewConvention { half_difference, full_difference };

struct IcsEntry {
    double magnitude_ps;  // >= 0
    double sigma_ps;
};

struct IcsTable {
    std::map<UnorderedPair, IcsEntry> entries;
    SkewConvention convention = SkewConvention::half_difference;
};

struct ArmImbalanceReport {
    // Per unordered pair: delta = (d_jk + d_kj)/2, the common arm offset.
    std::map<UnorderedPair, double> delta_ps;
    // max - min over pairs of the sums d_jk + d_kj (= 2 delta), the direct
    // observable of imbalance consistency.
    double spread_ps;
    double tolerance_ps;
    bool consistent;  // spread <= tolerance
};

// sqrt(sigma_fit^2 + sigma_cal^2).
double combine_uncertainty(double sigma_fit_ps, double sigma_cal_ps);

// half_difference: |d_jk - d_kj|/2 with sigma = sigma_d/sqrt(2);
// full_difference: |d_jk - d_kj| with sigma = sigma_d*sqrt(2).
// Symmetric under swapping the two positions.
IcsEntry pairwise_skew(double d_jk, double d_kj, double sigma_d,
                       SkewConvention convention);

// Applies pairwise_skew to every complete ordered pair of the table. A pair
// with only one ordering throws unless allow_partial, in which case it is
// skipped. sigma_d of an entry is the combined sigma of its two orderings in
// quadrature, divided per convention.
IcsTable skew_table(const DipTable& dips, SkewConvention convention,
                    bool allow_partial = false);

// Per-pair delta = (d_jk + d_kj)/2; spread = max-min of the sums;
// consistent when spread <= tolerance (default 3 sigma_d, taken from the
// largest entry sigma).
ArmImbalanceReport arm_imbalance(const DipTable& dips,
                                 std::optional<double> tolerance_ps = {});

// sqrt(mean of squared magnitudes); sigma_rms = (mean entry sigma)/sqrt(6).
// Requires the complete 6-pair table.
std::pair<double, double> rms_skew(const IcsTable& ics);

// The 6 unordered pairs of a 4-core fiber.
std::vector<UnorderedPair> all_core_pairs();

}  // namespace ics
