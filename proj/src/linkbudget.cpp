#include "skylink/linkbudget.hpp"

namespace skylink {

LinkModelPoint evaluate_link_model(const LinkModelInputs& in) {
    const LinkGeometryd& geom = in.geometry;
    const ReceiverChaind& chain = geom.chain;
    const auto ts = TurbulenceStated::from_r0(in.r0, geom.path, in.wind_speed);

    LinkModelPoint p;
    p.beta = mode_match_beta(chain, geom.path.wavelength());
    p.greenwood = greenwood_frequency(ts);
    p.scintillation = scintillation_report(ts, geom.path, chain.d_rx);
    p.smf = compose_smf(eta0(p.beta, obscuration_ratio(chain)), p.scintillation.eta_s, in.eta_phi_on,
                        eta_phi_residual(chain.ao_modes, chain.d_rx, in.r0), eta_tau(p.greenwood, chain.f_3db));
    const double eta_smf = in.eta_smf_override.value_or(p.smf.eta_smf);
    p.budget = full_budget(geom, ts, in.absorption_db_per_km, eta_smf);
    return p;
}

}  // namespace skylink
