#include "skylink/coupling.hpp"

namespace skylink {

double eta_phi_on(const ModeVarianceSet& variances, int corrected_modes) {
    if (corrected_modes < 1) throw DomainError("corrected mode count must be >= 1");
    Eigen::VectorXd v(corrected_modes);
    for (int j = 1; j <= corrected_modes; ++j) {
        const auto value = variances.variance(j);
        if (!value) throw MissingModeError(j);
        v(j - 1) = *value;
    }
    return eta_phi_on(v);
}

PowerCoupling coupling_from_power(double p_in, double p_focus, double eta_focus_to_fiber) {
    if (!(p_in >= 0.0)) throw DomainError("fiber input power must be >= 0");
    detail::require_positive(p_focus, "primary-focus power");
    detail::require_efficiency(eta_focus_to_fiber, "focus-to-fiber transmission");
    const double p_front = p_focus * eta_focus_to_fiber;
    return {p_in / p_front, p_front, p_in <= p_front};
}

}  // namespace skylink
