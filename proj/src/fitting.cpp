#include "ics/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ics/errors.hpp"

namespace ics {

namespace {

std::vector<double> moving_average5(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - 2);
        const int hi = std::min(n - 1, i + 2);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) s += y[j];
        out[i] = s / (hi - lo + 1);
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double outer_quartile_median(const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t q = std::max<std::size_t>(1, n / 4);
    std::vector<double> outer;
    outer.insert(outer.end(), y.begin(), y.begin() + q);
    outer.insert(outer.end(), y.end() - q, y.end());
    return median(std::move(outer));
}

// Half-width at half depth of the smoothed feature, one side.
double half_crossing_distance(const std::vector<double>& grid,
                              const std::vector<double>& smooth, int center_idx,
                              double half_level, bool below, int direction) {
    const int n = static_cast<int>(grid.size());
    for (int i = center_idx; i >= 0 && i < n; i += direction) {
        const bool crossed = below ? smooth[i] > half_level : smooth[i] < half_level;
        if (crossed) {
            return std::abs(grid[i] - grid[center_idx]);
        }
    }
    return -1.0;
}

struct Design {
    Eigen::VectorXd y;
    Eigen::VectorXd w;  // inverse variances
    std::vector<double> x;
};

// model(params, x, value, gradient over n_params)
template <typename Model>
Eigen::VectorXd residuals(const Model& model, const Eigen::VectorXd& p,
                          const Design& d) {
    const int n = static_cast<int>(d.x.size());
    Eigen::VectorXd r(n);
    Eigen::VectorXd grad(p.size());
    for (int i = 0; i < n; ++i) {
        double v;
        model(p, d.x[i], v, grad);
        r(i) = d.y(i) - v;
    }
    return r;
}

template <typename Model>
double weighted_sse(const Model& model, const Eigen::VectorXd& p,
                    const Design& d) {
    Eigen::VectorXd r = residuals(model, p, d);
    return r.cwiseProduct(r).dot(d.w);
}

struct GnResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double chi2;
    int iterations;
};

// Damped Gauss-Newton: damping grows x10 on rejected steps, shrinks x10 on
// accepted; weighted SSE decreases monotonically. `scale` maps parameter
// magnitudes for the relative-change convergence test; `admissible` rejects
// steps leaving the parameter domain.
template <typename Model, typename Admissible>
GnResult gauss_newton(const Model& model, Eigen::VectorXd p, const Design& d,
                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& scale,
                      const Admissible& admissible, int max_iterations = 200) {
    const int n = static_cast<int>(d.x.size());
    const int np = static_cast<int>(p.size());
    if (n <= np) throw ValidationError("not enough points for the fit");

    double lambda = 1e-6;
    double sse = weighted_sse(model, p, d);
    Eigen::MatrixXd jac(n, np);
    Eigen::VectorXd r(n), grad(np);

    int it = 0;
    for (; it < max_iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double v;
            model(p, d.x[i], v, grad);
            r(i) = d.y(i) - v;
            jac.row(i) = grad.transpose();
        }
        Eigen::MatrixXd jtw = jac.transpose() * d.w.asDiagonal();
        Eigen::MatrixXd normal = jtw * jac;
        Eigen::VectorXd rhs = jtw * r;

        bool accepted = false;
        Eigen::VectorXd p_new;
        while (lambda <= 1e12) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += lambda * normal.diagonal().cwiseAbs()
                                 + Eigen::VectorXd::Constant(np, 1e-300);
            Eigen::VectorXd step = damped.ldlt().solve(rhs);
            p_new = p + step;
            if (admissible(p_new)) {
                const double sse_new = weighted_sse(model, p_new, d);
                if (sse_new <= sse) {
                    sse = sse_new;
                    accepted = true;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            throw NumericalError(
                "fit did not converge: no acceptable step at iteration " +
                std::to_string(it) + ", last parameters [" +
                std::to_string(p(0)) + ", " + std::to_string(p(1)) + ", " +
                std::to_string(p(2)) + ", " + std::to_string(p(3)) + "]");
        }
        Eigen::VectorXd sc = scale(p_new);
        const double rel_change =
            ((p_new - p).cwiseQuotient(sc)).cwiseAbs().maxCoeff();
        p = p_new;
        if (rel_change < 1e-10) break;
    }
    if (it == max_iterations) {
        throw NumericalError(
            "fit did not converge within " + std::to_string(max_iterations) +
            " iterations, last parameters [" + std::to_string(p(0)) + ", " +
            std::to_string(p(1)) + ", " + std::to_string(p(2)) + ", " +
            std::to_string(p(3)) + "]");
    }

    for (int i = 0; i < n; ++i) {
        double v;
        model(p, d.x[i], v, grad);
        r(i) = d.y(i) - v;
        jac.row(i) = grad.transpose();
    }
    Eigen::MatrixXd normal = jac.transpose() * d.w.asDiagonal() * jac;
    Eigen::MatrixXd cov = normal.inverse();
    const double chi2 = r.cwiseProduct(r).dot(d.w);
    return GnResult{p, cov, chi2, it + 1};
}

void gaussian_model(const Eigen::VectorXd& p, double x, double& value,
                    Eigen::VectorXd& grad) {
    const double a = p(0), b = p(1), d = p(2), s = p(3);
    const double t = x - d;
    const double g = std::exp(-t * t / (2.0 * s * s));
    value = a + b * g;
    grad(0) = 1.0;
    grad(1) = g;
    grad(2) = b * g * t / (s * s);
    grad(3) = b * g * t * t / (s * s * s);
}

Eigen::VectorXd model_based_weights(const std::vector<double>& x,
                                    const std::function<double(double)>& model_at) {
    Eigen::VectorXd w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w(static_cast<int>(i)) = 1.0 / std::max(model_at(x[i]), 1.0);
    }
    return w;
}

void check_record(const ScanRecord& record) {
    if (record.delay_grid_ps.size() != record.counts.size()) {
        throw ValidationError("grid and counts lengths differ");
    }
    if (record.delay_grid_ps.size() < 8) {
        throw ValidationError("need at least 8 grid points");
    }
    if (record.variance && record.variance->size() != record.counts.size()) {
        throw ValidationError("variance and counts lengths differ");
    }
}

}  // namespace

InitialGuess initial_guess(const ScanRecord& record, FeatureKind kind) {
    check_record(record);
    const auto& x = record.delay_grid_ps;
    const auto& y = record.counts;
    const std::vector<double> smooth = moving_average5(y);
    const double baseline = outer_quartile_median(y);

    const auto min_it = std::min_element(smooth.begin(), smooth.end());
    const auto max_it = std::max_element(smooth.begin(), smooth.end());
    const double dev_low = *min_it - baseline;
    const double dev_high = *max_it - baseline;

    const bool want_dip = (kind == FeatureKind::dip);
    const double dev = want_dip ? dev_low : dev_high;
    const double opposite = want_dip ? dev_high : dev_low;
    const double noise2 = 2.0 * std::sqrt(std::max(baseline, 1.0));
    const bool expected_ok = want_dip ? (dev < -noise2) : (dev > noise2);
    if (!expected_ok) {
        const bool opposite_ok =
            want_dip ? (opposite > noise2) : (opposite < -noise2);
        if (opposite_ok) {
            throw NumericalError(
                "amplitude sign mismatch: data shows the opposite feature kind");
        }
        throw NumericalError(
            "no feature: extremum indistinct at 2 sigma of counting noise");
    }

    const int center_idx = static_cast<int>(
        (want_dip ? min_it : max_it) - smooth.begin());
    const double half_level = baseline + dev / 2.0;
    const double dl = half_crossing_distance(x, smooth, center_idx, half_level,
                                             want_dip, -1);
    const double dr = half_crossing_distance(x, smooth, center_idx, half_level,
                                             want_dip, +1);
    const double span = x.back() - x.front();
    double hwhm;
    if (dl > 0 && dr > 0) {
        hwhm = 0.5 * (dl + dr);
    } else if (dl > 0 || dr > 0) {
        hwhm = std::max(dl, dr);
    } else {
        hwhm = span / 8.0;
    }
    const double width = hwhm / std::sqrt(2.0 * std::log(2.0));
    return InitialGuess{baseline, dev, x[center_idx], width};
}

FeatureKind detect_kind(const ScanRecord& record) {
    check_record(record);
    const std::vector<double> smooth = moving_average5(record.counts);
    const double baseline = outer_quartile_median(record.counts);
    const double dev_low = *std::min_element(smooth.begin(), smooth.end()) - baseline;
    const double dev_high = *std::max_element(smooth.begin(), smooth.end()) - baseline;
    return (-dev_low >= dev_high) ? FeatureKind::dip : FeatureKind::peak;
}

GaussianFit fit_gaussian(const ScanRecord& record) {
    check_record(record);
    const FeatureKind kind = detect_kind(record);
    const InitialGuess ig = initial_guess(record, kind);

    Design d;
    d.x = record.delay_grid_ps;
    d.y = Eigen::Map<const Eigen::VectorXd>(record.counts.data(),
                                            record.counts.size());
    Eigen::VectorXd p(4);
    p << ig.baseline, ig.amplitude, ig.center_ps, ig.width_ps;

    const auto scale = [](const Eigen::VectorXd& q) {
        Eigen::VectorXd s(4);
        s << std::max(std::abs(q(0)), 1e-12), std::max(std::abs(q(1)), 1e-12),
            std::max(std::abs(q(2)), q(3)), q(3);
        return s;
    };
    const auto admissible = [](const Eigen::VectorXd& q) {
        return q(0) > 0 && q(3) > 0;
    };
    const double grid_step = record.delay_grid_ps[1] - record.delay_grid_ps[0];

    const bool corrected = record.variance.has_value();
    GnResult res;
    if (corrected) {
        d.w.resize(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            d.w(static_cast<int>(i)) = 1.0 / std::max((*record.variance)[i], 1.0);
        }
        res = gauss_newton(gaussian_model, p, d, scale, admissible);
    } else {
        // Poisson data: model-based weights, one re-weight pass.
        const auto model_at = [&](const Eigen::VectorXd& q) {
            return std::function<double(double)>([&, q](double x) {
                double v;
                Eigen::VectorXd g(4);
                gaussian_model(q, x, v, g);
                return v;
            });
        };
        d.w = model_based_weights(d.x, model_at(p));
        res = gauss_newton(gaussian_model, p, d, scale, admissible);
        d.w = model_based_weights(d.x, model_at(res.params));
        res = gauss_newton(gaussian_model, res.params, d, scale, admissible);
    }

    const Eigen::VectorXd& q = res.params;
    if (q(3) < grid_step) {
        throw NumericalError("degenerate fit: width " + std::to_string(q(3)) +
                             " ps collapsed below the grid step " +
                             std::to_string(grid_step) + " ps");
    }
    GaussianFit fit;
    fit.baseline = q(0);
    fit.amplitude = q(1);
    fit.center_ps = q(2);
    fit.width_ps = q(3);
    fit.covariance = res.covariance;
    fit.visibility = std::abs(q(1)) / q(0);
    fit.reduced_chi2 = res.chi2 / (static_cast<double>(d.x.size()) - 4.0);
    fit.iterations = res.iterations;
    return fit;
}

BeatFit fit_beat_envelope(const ScanRecord& record,
                          const BeatFitOptions& options) {
    check_record(record);
    if (options.pulse_width_ps <= 0) {
        throw ValidationError("pulse_width_ps must be > 0");
    }
    if (options.beat_period_guess_ps <= 0) {
        throw ValidationError("beat_period_guess_ps must be > 0");
    }
    const double sp = options.pulse_width_ps;
    const auto model = [sp](const Eigen::VectorXd& p, double x, double& value,
                            Eigen::VectorXd& grad) {
        const double a = p(0), b = p(1), d = p(2), T = p(3);
        const double t = x - d;
        const double phase = M_PI * t / T;
        const double c = std::cos(phase);
        const double c2 = c * c;
        const double env = std::exp(-t * t / (2.0 * sp * sp));
        const double sin2 = std::sin(2.0 * phase);
        value = a + b * c2 * env;
        grad(0) = 1.0;
        grad(1) = c2 * env;
        // d/dd [cos^2(pi(x-d)/T)] = (pi/T) sin(2 phase)
        grad(2) = b * env * ((M_PI / T) * sin2 + c2 * t / (sp * sp));
        grad(3) = b * env * (M_PI * t / (T * T)) * sin2;
    };

    const auto& x = record.delay_grid_ps;
    const auto& y = record.counts;
    const std::vector<double> smooth = moving_average5(y);
    // Fringe minima sit on the cos^2 maxima; the baseline is the fringe top.
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q = std::max<std::size_t>(1, sorted.size() / 4);
    double top = 0.0;
    for (std::size_t i = sorted.size() - q; i < sorted.size(); ++i) top += sorted[i];
    top /= q;
    const int min_idx = static_cast<int>(
        std::min_element(smooth.begin(), smooth.end()) - smooth.begin());
    const double depth = smooth[min_idx] - top;
    if (-depth < 2.0 * std::sqrt(std::max(top, 1.0))) {
        throw NumericalError(
            "no feature: fringe indistinct at 2 sigma of counting noise");
    }

    Design d;
    d.x = x;
    d.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    Eigen::VectorXd p(4);
    p << top, depth, x[min_idx], options.beat_period_guess_ps;

    const auto scale = [](const Eigen::VectorXd& v) {
        Eigen::VectorXd s(4);
        s << std::max(std::abs(v(0)), 1e-12), std::max(std::abs(v(1)), 1e-12),
            std::max(std::abs(v(2)), v(3)), v(3);
        return s;
    };
    const auto admissible = [](const Eigen::VectorXd& v) {
        return v(0) > 0 && v(3) > 0;
    };

    const bool corrected = record.variance.has_value();
    GnResult res;
    if (corrected) {
        d.w.resize(d.x.size());
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            d.w(static_cast<int>(i)) = 1.0 / std::max((*record.variance)[i], 1.0);
        }
        res = gauss_newton(model, p, d, scale, admissible);
    } else {
        const auto model_at = [&](const Eigen::VectorXd& v) {
            return std::function<double(double)>([&, v](double xx) {
                double val;
                Eigen::VectorXd g(4);
                model(v, xx, val, g);
                return val;
            });
        };
        d.w = model_based_weights(d.x, model_at(p));
        res = gauss_newton(model, p, d, scale, admissible);
        d.w = model_based_weights(d.x, model_at(res.params));
        res = gauss_newton(model, res.params, d, scale, admissible);
    }

    const Eigen::VectorXd& v = res.params;
    BeatFit fit;
    fit.baseline = v(0);
    fit.amplitude = v(1);
    fit.center_ps = v(2);
    fit.beat_period_ps = v(3);
    fit.covariance = res.covariance;
    fit.effective_precision_ps = v(3) / (2.0 * M_PI);
    fit.reduced_chi2 = res.chi2 / (static_cast<double>(d.x.size()) - 4.0);
    fit.iterations = res.iterations;
    return fit;
}

}  // namespace ics
