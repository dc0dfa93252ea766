#ifndef SKYLINK_LINKBUDGET_HPP
#define SKYLINK_LINKBUDGET_HPP

// Free-space budget from the transmitter aperture to the QKD receiver input:
//
//   η_Ch = η_Focus · η_Optics · η_SMF · η_Fiber,   η_Focus = η_A · η_Coll

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skylink/atmosphere.hpp"
#include "skylink/core.hpp"
#include "skylink/coupling.hpp"

namespace skylink {

template <typename Scalar>
struct LinkGeometry {
    explicit LinkGeometry(const OpticalPath<Scalar>& p, const Scalar& waist = Scalar(25e-3),
                          const ReceiverChain<Scalar>& rx = {})
        : path(p), w0(waist), chain(rx) {
        detail::require_positive(w0, "transmit waist");
        chain.validate();
    }

    /// z0 = π W0² / λ
    Scalar rayleigh_range() const { return Scalar(pi<Scalar>() * w0 * w0 / path.wavelength()); }

    OpticalPath<Scalar> path;
    Scalar w0;
    ReceiverChain<Scalar> chain;
};

using LinkGeometryd = LinkGeometry<double>;

template <typename Scalar>
struct BeamDivergence {
    Scalar theta0;      ///< λ / (π W0)
    Scalar theta_turb;  ///< λ / (π ρ0), ρ0 = r0 / 2.1
    Scalar theta;       ///< sqrt(θ0² + θ_turb²)
};

template <typename Scalar>
BeamDivergence<Scalar> beam_divergence(const LinkGeometry<Scalar>& geom, const Scalar& r0) {
    using std::sqrt;
    detail::require_positive(r0, "r0");
    const Scalar& lambda = geom.path.wavelength();
    BeamDivergence<Scalar> d;
    d.theta0 = Scalar(lambda / (pi<Scalar>() * geom.w0));
    const Scalar rho0 = Scalar(r0 / Scalar(2.1));
    d.theta_turb = Scalar(lambda / (pi<Scalar>() * rho0));
    d.theta = Scalar(sqrt(Scalar(d.theta0 * d.theta0 + d.theta_turb * d.theta_turb)));
    return d;
}

/// W_L = θ L
template <typename Scalar>
Scalar received_waist(const Scalar& theta, const OpticalPath<Scalar>& path) {
    detail::require_positive(theta, "divergence");
    return Scalar(theta * path.length());
}

/// dB/km to nepers per metre: A = a · ln(10) / 10 / 1000.
template <typename Scalar>
Scalar absorption_nepers_per_meter(const Scalar& db_per_km) {
    using std::log;
    return Scalar(db_per_km * log(Scalar(10)) / Scalar(10) / Scalar(1000));
}

/// η_A = exp(-A L), with the coefficient given in dB/km.
template <typename Scalar>
Scalar absorption_efficiency(const Scalar& db_per_km, const OpticalPath<Scalar>& path) {
    using std::exp;
    if (!(db_per_km >= Scalar(0))) throw DomainError("absorption coefficient must be >= 0");
    return Scalar(exp(Scalar(-absorption_nepers_per_meter(db_per_km) * path.length())));
}

/// η_Coll = η_Tel [exp(-D_obs² / 2W²) - exp(-D_rx² / 2W²)]
template <typename Scalar>
Scalar collection_efficiency(const Scalar& w_l, const ReceiverChain<Scalar>& chain) {
    using std::exp;
    detail::require_positive(w_l, "received beam waist");
    const Scalar two_w2 = Scalar(Scalar(2) * w_l * w_l);
    return Scalar(chain.eta_tel * (exp(Scalar(-chain.d_obs * chain.d_obs / two_w2)) -
                                   exp(Scalar(-chain.d_rx * chain.d_rx / two_w2))));
}

template <typename Scalar>
struct BudgetReport {
    Scalar theta0;
    Scalar theta_turb;
    Scalar theta;
    Scalar w_l;
    Scalar eta_a;
    Scalar eta_coll;
    Scalar eta_focus;   ///< eta_a · eta_coll
    Scalar eta_optics;
    Scalar eta_smf;
    Scalar eta_fiber;
    Scalar eta_ch;      ///< eta_focus · eta_optics · eta_smf · eta_fiber

    /// Multiplicative terms whose dB values add up to eta_ch.
    std::vector<std::pair<std::string, Scalar>> db_table() const {
        return {{"eta_A", to_db(eta_a)},
                {"eta_Coll", to_db(eta_coll)},
                {"eta_Optics", to_db(eta_optics)},
                {"eta_SMF", to_db(eta_smf)},
                {"eta_Fiber", to_db(eta_fiber)}};
    }
};

using BudgetReportd = BudgetReport<double>;

/// Budget with an externally supplied η_SMF (modelled or measured).
template <typename Scalar>
BudgetReport<Scalar> full_budget(const LinkGeometry<Scalar>& geom, const TurbulenceState<Scalar>& ts,
                                 const Scalar& absorption_db_per_km, const Scalar& eta_smf) {
    detail::require_efficiency(eta_smf, "eta_SMF");
    const Scalar r0 = ts.r0_at(geom.path.wavelength());
    const BeamDivergence<Scalar> div = beam_divergence(geom, r0);
    BudgetReport<Scalar> r;
    r.theta0 = div.theta0;
    r.theta_turb = div.theta_turb;
    r.theta = div.theta;
    r.w_l = received_waist(div.theta, geom.path);
    r.eta_a = absorption_efficiency(absorption_db_per_km, geom.path);
    r.eta_coll = collection_efficiency(r.w_l, geom.chain);
    r.eta_focus = Scalar(r.eta_a * r.eta_coll);
    r.eta_optics = geom.chain.eta_optics;
    r.eta_smf = eta_smf;
    r.eta_fiber = geom.chain.eta_fiber;
    r.eta_ch = Scalar(Scalar(Scalar(r.eta_focus * r.eta_optics) * r.eta_smf) * r.eta_fiber);
    return r;
}

template <typename Scalar>
BudgetReport<Scalar> full_budget(const LinkGeometry<Scalar>& geom, const TurbulenceState<Scalar>& ts,
                                 const Scalar& absorption_db_per_km, const SmfCouplingBreakdown<Scalar>& smf) {
    return full_budget(geom, ts, absorption_db_per_km, smf.eta_smf);
}

/// Inputs of one point of the end-to-end model.
struct LinkModelInputs {
    LinkGeometryd geometry{OpticalPathd(1.555e-6, 18e3)};
    double r0 = 0.0875;               ///< at the geometry wavelength
    double wind_speed = 0.556;
    double absorption_db_per_km = 0.2;
    /// Closed-loop term of the corrected modes; 1 models ideal correction.
    double eta_phi_on = 1.0;
    /// Replaces the modelled η_SMF in the channel product when set.
    std::optional<double> eta_smf_override;
};

struct LinkModelPoint {
    double beta;
    double greenwood;
    ScintillationReportd scintillation;
    SmfCouplingBreakdownd smf;
    BudgetReportd budget;
};

LinkModelPoint evaluate_link_model(const LinkModelInputs& inputs);

}  // namespace skylink

#endif  // SKYLINK_LINKBUDGET_HPP
