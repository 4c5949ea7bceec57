#include "ics/skew.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ics/errors.hpp"

namespace ics {

double combine_uncertainty(double sigma_fit_ps, double sigma_cal_ps) {
    if (sigma_fit_ps < 0 || sigma_cal_ps < 0) {
        throw ValidationError("uncertainties must be >= 0");
    }
    return std::hypot(sigma_fit_ps, sigma_cal_ps);
}

namespace {

IcsEntry make_entry(double d_jk, double d_kj, double sigma_combined,
                    SkewConvention convention) {
    const double diff = std::abs(d_jk - d_kj);
    if (convention == SkewConvention::half_difference) {
        return IcsEntry{diff / 2.0, sigma_combined / 2.0};
    }
    return IcsEntry{diff, sigma_combined};
}

std::string pair_name(int j, int k) {
    return std::to_string(j) + "-" + std::to_string(k);
}

}  // namespace

IcsEntry pairwise_skew(double d_jk, double d_kj, double sigma_d,
                       SkewConvention convention) {
    if (sigma_d <= 0) throw ValidationError("sigma_d must be > 0");
    return make_entry(d_jk, d_kj, sigma_d * std::sqrt(2.0), convention);
}

IcsTable skew_table(const DipTable& dips, SkewConvention convention,
                    bool allow_partial) {
    IcsTable out;
    out.convention = convention;
    for (const auto& [pair, entry] : dips.entries) {
        const auto [j, k] = pair;
        if (j >= k) continue;
        const auto rev = dips.entries.find({k, j});
        if (rev == dips.entries.end()) {
            if (allow_partial) continue;
            throw ValidationError("incomplete pair: ordering " + pair_name(k, j) +
                                  " is missing for pair " + pair_name(j, k));
        }
        if (entry.sigma_ps <= 0 || rev->second.sigma_ps <= 0) {
            throw ValidationError("sigma_d must be > 0 for pair " +
                                  pair_name(j, k));
        }
        const double combined =
            std::hypot(entry.sigma_ps, rev->second.sigma_ps);
        out.entries[{j, k}] = make_entry(entry.position_ps,
                                         rev->second.position_ps, combined,
                                         convention);
    }
    // Reversed-only orderings (k,j) without (j,k).
    for (const auto& [pair, entry] : dips.entries) {
        const auto [j, k] = pair;
        if (j <= k) continue;
        if (dips.entries.count({k, j})) continue;
        if (!allow_partial) {
            throw ValidationError("incomplete pair: ordering " + pair_name(k, j) +
                                  " is missing for pair " + pair_name(k, j));
        }
    }
    if (out.entries.empty()) {
        throw ValidationError("no complete ordered pair in the dip table");
    }
    return out;
}

ArmImbalanceReport arm_imbalance(const DipTable& dips,
                                 std::optional<double> tolerance_ps) {
    ArmImbalanceReport report;
    double sum_min = 0.0, sum_max = 0.0;
    double max_sigma = 0.0;
    bool first = true;
    for (const auto& [pair, entry] : dips.entries) {
        const auto [j, k] = pair;
        if (j >= k) continue;
        const auto rev = dips.entries.find({k, j});
        if (rev == dips.entries.end()) continue;
        const double sum = entry.position_ps + rev->second.position_ps;
        report.delta_ps[{j, k}] = sum / 2.0;
        max_sigma = std::max({max_sigma, entry.sigma_ps, rev->second.sigma_ps});
        if (first) {
            sum_min = sum_max = sum;
            first = false;
        } else {
            sum_min = std::min(sum_min, sum);
            sum_max = std::max(sum_max, sum);
        }
    }
    if (report.delta_ps.empty()) {
        throw ValidationError("no complete ordered pair in the dip table");
    }
    report.spread_ps = sum_max - sum_min;
    report.tolerance_ps = tolerance_ps.value_or(3.0 * max_sigma);
    report.consistent = report.spread_ps <= report.tolerance_ps;
    return report;
}

std::pair<double, double> rms_skew(const IcsTable& ics) {
    const auto required = all_core_pairs();
    std::string missing;
    for (const auto& p : required) {
        if (!ics.entries.count(p)) {
            if (!missing.empty()) missing += ", ";
            missing += pair_name(p.first, p.second);
        }
    }
    if (!missing.empty()) {
        throw ValidationError("incomplete ICS table, missing pairs: " + missing);
    }
    double ms = 0.0, mean_sigma = 0.0;
    for (const auto& [pair, entry] : ics.entries) {
        ms += entry.magnitude_ps * entry.magnitude_ps;
        mean_sigma += entry.sigma_ps;
    }
    const double n = static_cast<double>(ics.entries.size());
    ms /= n;
    mean_sigma /= n;
    return {std::sqrt(ms), mean_sigma / std::sqrt(6.0)};
}

std::vector<UnorderedPair> all_core_pairs() {
    return {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
}

}  // namespace ics
