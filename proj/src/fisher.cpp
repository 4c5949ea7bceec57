#include "ics/fisher.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ics/errors.hpp"

namespace ics {

void validate(const DipShape& shape) {
    if (!(shape.p_dist > 0 && shape.p_dist < 1)) {
        throw ValidationError("p_dist must be in (0,1)");
    }
    if (!(shape.visibility >= 0 && shape.visibility <= 1)) {
        throw ValidationError("visibility must be in [0,1]");
    }
    if (!(shape.coherence_time_ps > 0)) {
        throw ValidationError("coherence_time_ps must be > 0");
    }
}

double fisher_info_at(const DipShape& shape, double tau_ps) {
    validate(shape);
    const double s = shape.coherence_time_ps;
    const double g = std::exp(-tau_ps * tau_ps / (2.0 * s * s));
    const double prob = shape.p_dist * (1.0 - shape.visibility * g);
    if (prob < 1e-12 || prob > 1.0 - 1e-12) return 0.0;
    const double dprob = shape.p_dist * shape.visibility * g * tau_ps / (s * s);
    return dprob * dprob / (prob * (1.0 - prob));
}

IntegratedInfo integrated_info(const DipShape& shape) {
    validate(shape);
    const double s = shape.coherence_time_ps;
    double error = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double tau) { return fisher_info_at(shape, tau); }, -10.0 * s,
            10.0 * s, 15, 1e-9, &error);
    if (integral > 0 && error / integral > 1e-6) {
        throw NumericalError(
            "Fisher integral did not converge: relative error estimate " +
            std::to_string(error / integral));
    }
    return IntegratedInfo{integral, s * integral};
}

CrbReport crb(const DipShape& shape, double total_counts, double range_ps,
              std::optional<double> detection_probability) {
    validate(shape);
    if (!(total_counts > 0)) throw ValidationError("total_counts must be > 0");
    if (!(range_ps > 0)) throw ValidationError("range_ps must be > 0");
    const double det_p = detection_probability.value_or(shape.p_dist);
    if (!(det_p > 0 && det_p <= 1)) {
        throw ValidationError("detection_probability must be in (0,1]");
    }
    const IntegratedInfo info = integrated_info(shape);
    const double s = shape.coherence_time_ps;
    const double n_eff = (total_counts / det_p) * s / range_ps;
    const double denom = n_eff * info.shape_factor;
    const double bound = denom > 0
                             ? s / std::sqrt(denom)
                             : std::numeric_limits<double>::infinity();
    return CrbReport{info.integrated_info_per_ps, info.shape_factor, n_eff,
                     bound, range_ps < 4.0 * s};
}

}  // namespace ics
