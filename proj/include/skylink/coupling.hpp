#ifndef SKYLINK_COUPLING_HPP
#define SKYLINK_COUPLING_HPP

// Single-mode fiber coupling efficiency of an AO-equipped receiver:
//
//   η_SMF = η0 · η_S · η_AO,   η_AO = η_φ,ON · η_φ(J) · η_τ
//
// η0 is the mode-overlap term of the obscured pupil against the fiber mode,
// η_S comes from the atmosphere module.

#include <cmath>
#include <type_traits>

#include <Eigen/Dense>

#include "skylink/core.hpp"
#include "skylink/zernike.hpp"

namespace skylink {

/// Receiver hardware from the telescope aperture to the fiber.
template <typename Scalar>
struct ReceiverChain {
    Scalar d_rx = Scalar(0.41);
    Scalar d_obs = Scalar(0.168);
    /// Chosen so that β = 1.1 at 1555 nm with the default MFD.
    Scalar f_eff = Scalar(1.958);
    Scalar mfd = Scalar(10.4e-6);
    Scalar eta_tel = from_db(Scalar(-1.4));
    Scalar eta_optics = from_db(Scalar(-4.5));
    Scalar eta_fiber = from_db(Scalar(-2.4));
    int ao_modes = 35;
    Scalar f_3db = Scalar(10);

    void validate() const {
        detail::require_positive(d_obs, "obstruction diameter");
        if (!(d_obs < d_rx)) throw DomainError("obstruction diameter must be smaller than the aperture");
        detail::require_positive(f_eff, "effective focal length");
        detail::require_positive(mfd, "mode-field diameter");
        detail::require_efficiency(eta_tel, "telescope efficiency");
        detail::require_efficiency(eta_optics, "optics efficiency");
        detail::require_efficiency(eta_fiber, "fiber efficiency");
        if (ao_modes < 2) throw DomainError("AO must correct at least tip and tilt (J >= 2)");
        detail::require_positive(f_3db, "AO rejection bandwidth");
    }
};

using ReceiverChaind = ReceiverChain<double>;

template <typename Scalar>
Scalar obscuration_ratio(const ReceiverChain<Scalar>& chain) {
    chain.validate();
    return Scalar(chain.d_obs / chain.d_rx);
}

/// β = (π D / 4λ) · (MFD / f_eff)
template <typename Scalar>
Scalar mode_match_beta(const ReceiverChain<Scalar>& chain, const Scalar& wavelength) {
    detail::require_positive(wavelength, "wavelength");
    return Scalar(pi<Scalar>() * chain.d_rx / (Scalar(4) * wavelength) * chain.mfd / chain.f_eff);
}

/// Effective focal length that yields the requested β.
template <typename Scalar>
Scalar focal_length_for_beta(const ReceiverChain<Scalar>& chain, const Scalar& wavelength,
                             const Scalar& beta) {
    detail::require_positive(wavelength, "wavelength");
    detail::require_positive(beta, "beta");
    return Scalar(pi<Scalar>() * chain.d_rx / (Scalar(4) * wavelength) * chain.mfd / beta);
}

/// η0 = 2 [(exp(-β²) - exp(-β²α²)) / (β sqrt(1-α²))]²
template <typename Scalar>
Scalar eta0(const Scalar& beta, const Scalar& alpha) {
    using std::exp;
    using std::sqrt;
    if (!(alpha >= Scalar(0) && alpha < Scalar(1))) throw DomainError("obscuration ratio must lie in [0, 1)");
    if (!(beta >= Scalar(0))) throw DomainError("beta must be >= 0");
    const Scalar one_minus_a2 = Scalar(Scalar(1) - alpha * alpha);
    const Scalar b2 = Scalar(beta * beta);
    if (beta < Scalar(1e-3)) {
        // 2β²(1-α²)[1 - β²(1+α²)/2]²
        const Scalar c = Scalar(Scalar(1) - b2 * (Scalar(1) + alpha * alpha) / Scalar(2));
        return Scalar(Scalar(2) * b2 * one_minus_a2 * c * c);
    }
    Scalar diff;
    if constexpr (std::is_floating_point_v<Scalar>) {
        diff = exp(-b2 * alpha * alpha) * std::expm1(-b2 * one_minus_a2);
    } else {
        diff = Scalar(exp(Scalar(-b2)) - exp(Scalar(-b2 * alpha * alpha)));
    }
    const Scalar bracket = Scalar(diff / (beta * sqrt(one_minus_a2)));
    return Scalar(Scalar(2) * bracket * bracket);
}

template <typename Scalar>
struct BetaOptimum {
    Scalar beta;
    Scalar eta0;
};

/// Golden-section maximization of η0 over β in [1e-3, 10].
template <typename Scalar>
BetaOptimum<Scalar> optimize_beta(const Scalar& alpha, const Scalar& tolerance = Scalar(1e-6)) {
    using std::sqrt;
    Scalar lo(1e-3), hi(10);
    const Scalar inv_phi = Scalar((sqrt(Scalar(5)) - Scalar(1)) / Scalar(2));
    Scalar x1 = Scalar(hi - inv_phi * (hi - lo));
    Scalar x2 = Scalar(lo + inv_phi * (hi - lo));
    Scalar f1 = eta0(x1, alpha);
    Scalar f2 = eta0(x2, alpha);
    while (hi - lo > tolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = Scalar(lo + inv_phi * (hi - lo));
            f2 = eta0(x2, alpha);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = Scalar(hi - inv_phi * (hi - lo));
            f1 = eta0(x1, alpha);
        }
    }
    const Scalar beta = Scalar((lo + hi) / Scalar(2));
    return {beta, eta0(beta, alpha)};
}

/// Π_{j=1..J} (1 + 2σ_j²)^(-1/2) over measured closed-loop variances.
/// Throws MissingModeError for the first absent mode.
double eta_phi_on(const ModeVarianceSet& variances, int corrected_modes);

template <typename Derived>
typename Derived::Scalar eta_phi_on(const Eigen::MatrixBase<Derived>& variances) {
    using Scalar = typename Derived::Scalar;
    using std::sqrt;
    Scalar product(1);
    for (Eigen::Index j = 0; j < variances.size(); ++j) {
        if (!(variances(j) >= Scalar(0))) throw DomainError("mode variance must be >= 0");
        product = Scalar(product / sqrt(Scalar(Scalar(1) + Scalar(2) * variances(j))));
    }
    return product;
}

/// η_φ(J) = exp(-σ_J²)
template <typename Scalar>
Scalar eta_phi_residual(int corrected_modes, const Scalar& d_rx, const Scalar& r0) {
    using std::exp;
    return Scalar(exp(Scalar(-residual_variance(corrected_modes, d_rx, r0))));
}

/// η_τ = exp(-(f_G / f_3dB)^(5/3))
template <typename Scalar>
Scalar eta_tau(const Scalar& greenwood, const Scalar& f_3db) {
    using std::exp;
    using std::pow;
    detail::require_positive(f_3db, "AO rejection bandwidth");
    if (!(greenwood >= Scalar(0))) throw DomainError("Greenwood frequency must be >= 0");
    return Scalar(exp(Scalar(-pow(Scalar(greenwood / f_3db), Scalar(5) / Scalar(3)))));
}

template <typename Scalar>
struct SmfCouplingBreakdown {
    Scalar eta0;
    Scalar eta_s;
    Scalar eta_phi_on;
    Scalar eta_phi_residual;
    Scalar eta_tau;
    Scalar eta_phi;   ///< eta_phi_on · eta_phi_residual
    Scalar eta_ao;    ///< eta_phi · eta_tau
    Scalar eta_smf;   ///< eta0 · eta_s · eta_ao
};

using SmfCouplingBreakdownd = SmfCouplingBreakdown<double>;

/// Products are evaluated left to right in the order of the field list.
template <typename Scalar>
SmfCouplingBreakdown<Scalar> compose_smf(const Scalar& eta0_value, const Scalar& eta_s,
                                         const Scalar& eta_phi_on_value, const Scalar& eta_phi_residual_value,
                                         const Scalar& eta_tau_value) {
    detail::require_efficiency(eta0_value, "eta0");
    detail::require_efficiency(eta_s, "eta_S");
    detail::require_efficiency(eta_phi_on_value, "eta_phi,ON");
    detail::require_efficiency(eta_phi_residual_value, "eta_phi(J)");
    detail::require_efficiency(eta_tau_value, "eta_tau");
    SmfCouplingBreakdown<Scalar> b;
    b.eta0 = eta0_value;
    b.eta_s = eta_s;
    b.eta_phi_on = eta_phi_on_value;
    b.eta_phi_residual = eta_phi_residual_value;
    b.eta_tau = eta_tau_value;
    b.eta_phi = Scalar(b.eta_phi_on * b.eta_phi_residual);
    b.eta_ao = Scalar(b.eta_phi * b.eta_tau);
    b.eta_smf = Scalar(Scalar(b.eta0 * b.eta_s) * b.eta_ao);
    return b;
}

/// Coupling measured as power into the fiber over the power in front of it.
/// The front power is reconstructed from the primary-focus reading and the
/// fixed focus-to-fiber transmission.
struct PowerCoupling {
    double eta_smf;
    double p_front;
    /// False when more power entered the fiber than reached its face.
    bool consistent;
};

PowerCoupling coupling_from_power(double p_in, double p_focus, double eta_focus_to_fiber);

}  // namespace skylink

#endif  // SKYLINK_COUPLING_HPP
