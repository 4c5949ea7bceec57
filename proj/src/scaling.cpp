#include "ics/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ics/errors.hpp"
#include "ics/rng.hpp"

namespace ics {

void validate(const std::vector<LengthPoint>& points) {
    if (points.size() < 3) {
        throw ValidationError("need at least 3 length points, got " +
                              std::to_string(points.size()));
    }
    for (const auto& p : points) {
        if (p.length_m <= 0) throw ValidationError("length_m must be > 0");
        if (p.rms_ps <= 0) throw ValidationError("rms_ps must be > 0");
        if (p.sigma_rms_ps <= 0) throw ValidationError("sigma_rms_ps must be > 0");
        if (p.n_pairs < 1 || p.n_pairs > 6) {
            throw ValidationError("n_pairs must be in [1,6]");
        }
    }
}

namespace {

struct Wls {
    double slope;
    double intercept;
    Eigen::Matrix2d covariance;  // over (slope, intercept)
    double r_squared;
};

Wls weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& w) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0 || !std::isfinite(det)) {
        throw NumericalError("degenerate design: regressor values coincide");
    }
    Wls out;
    out.slope = (sw * swxy - swx * swy) / det;
    out.intercept = (swxx * swy - swx * swxy) / det;
    out.covariance << sw / det, -swx / det, -swx / det, swxx / det;
    const double ybar = swy / sw;
    double sse = 0, sst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit = out.slope * x[i] + out.intercept;
        sse += w[i] * (y[i] - fit) * (y[i] - fit);
        sst += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    out.r_squared = sst > 0 ? 1.0 - sse / sst : 1.0;
    return out;
}

}  // namespace

SqrtFit fit_sqrt_model(const std::vector<LengthPoint>& points) {
    validate(points);
    std::vector<double> x, y, w;
    for (const auto& p : points) {
        x.push_back(std::sqrt(p.length_m));
        y.push_back(p.rms_ps);
        w.push_back((1.0 / (p.sigma_rms_ps * p.sigma_rms_ps)) * (p.n_pairs / 6.0));
    }
    const Wls fit = weighted_line(x, y, w);
    return SqrtFit{fit.slope, fit.intercept, fit.covariance, fit.r_squared};
}

PowerLawFit fit_power_law(const std::vector<LengthPoint>& points) {
    validate(points);
    constexpr double ln10 = 2.302585092994046;
    std::vector<double> x, y, w;
    for (const auto& p : points) {
        x.push_back(std::log10(p.length_m));
        y.push_back(std::log10(p.rms_ps));
        const double sigma_logy = p.sigma_rms_ps / (p.rms_ps * ln10);
        w.push_back((1.0 / (sigma_logy * sigma_logy)) * (p.n_pairs / 6.0));
    }
    const Wls fit = weighted_line(x, y, w);
    return PowerLawFit{std::pow(10.0, fit.intercept), fit.slope, fit.covariance,
                       fit.r_squared};
}

BootstrapResult bootstrap_ci(const std::vector<LengthPoint>& points,
                             int n_resamples, std::uint64_t seed) {
    validate(points);
    if (n_resamples < 2) {
        throw ValidationError("n_resamples must be >= 2 for a percentile CI");
    }
    {
        std::set<double> distinct;
        for (const auto& p : points) distinct.insert(p.length_m);
        if (distinct.size() < 3) {
            throw ValidationError("need at least 3 distinct lengths to bootstrap");
        }
    }
    const double point = fit_power_law(points).exponent_alpha;

    const int n = static_cast<int>(points.size());
    std::vector<double> alphas;
    alphas.reserve(n_resamples);
    auto engine = make_engine(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<LengthPoint> resample(n);
    while (static_cast<int>(alphas.size()) < n_resamples) {
        std::set<double> distinct;
        for (int i = 0; i < n; ++i) {
            resample[i] = points[pick(engine)];
            distinct.insert(resample[i].length_m);
        }
        if (distinct.size() < 3) continue;  // redraw, keep the count exact
        alphas.push_back(fit_power_law(resample).exponent_alpha);
    }

    std::sort(alphas.begin(), alphas.end());
    const auto percentile = [&](double p) {
        const double h = (alphas.size() - 1) * p;
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - lo;
        if (lo + 1 >= alphas.size()) return alphas.back();
        return alphas[lo] + frac * (alphas[lo + 1] - alphas[lo]);
    };
    return BootstrapResult{point, percentile(0.025), percentile(0.975),
                           n_resamples, seed};
}

}  // namespace ics
