#include "skylink/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skylink {

namespace {

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

std::vector<int> mode_range(int first, int last) {
    if (first < 1 || last < first) throw DomainError("invalid mode range");
    std::vector<int> modes;
    for (int j = first; j <= last; ++j) modes.push_back(j);
    return modes;
}

FriedFit fit_fried(const ModeVarianceSet& variances, double d_rx, std::span<const int> modes, double wavelength) {
    detail::require_positive(d_rx, "receiver aperture");
    detail::require_positive(wavelength, "wavelength");

    std::vector<int> requested(modes.begin(), modes.end());
    std::sort(requested.begin(), requested.end());
    requested.erase(std::unique(requested.begin(), requested.end()), requested.end());

    FriedFit fit;
    fit.wavelength = wavelength;
    std::vector<double> log_var, log_g;
    for (int j : requested) {
        const auto v = j >= 1 ? variances.variance(j) : std::nullopt;
        if (!v || !(*v > 0.0)) {
            fit.modes_excluded.push_back(j);
            continue;
        }
        fit.modes_used.push_back(j);
        log_var.push_back(std::log(*v));
        log_g.push_back(std::log(noll_weight(j)));
    }
    const auto m = static_cast<Eigen::Index>(fit.modes_used.size());
    if (m < 3) throw DomainError("Fried fit needs at least 3 modes with positive variance");

    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(log_var.data(), m);
    const Eigen::VectorXd lg = Eigen::Map<const Eigen::VectorXd>(log_g.data(), m);

    // log σ² - log g = (5/3) log(D / r0) for every mode: the offset is the mean.
    const Eigen::VectorXd offset = y - lg;
    const double c = offset.mean();
    fit.r0_hat = d_rx * std::exp(-0.6 * c);
    fit.residual_rms = std::sqrt((offset.array() - c).square().mean());

    if (lg.maxCoeff() - lg.minCoeff() > 1e-12) {
        Eigen::MatrixXd design(m, 2);
        design.col(0).setOnes();
        design.col(1) = lg;
        const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
        fit.fit_exponent_check = coef(1);
    } else {
        fit.fit_exponent_check = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> per_mode(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) per_mode[static_cast<std::size_t>(i)] = d_rx * std::exp(-0.6 * offset(i));
    const double med = median(per_mode);
    std::vector<double> dev(per_mode.size());
    std::transform(per_mode.begin(), per_mode.end(), dev.begin(), [med](double r) { return std::abs(r - med); });
    fit.r0_uncertainty = 1.4826 * median(dev) / std::sqrt(static_cast<double>(m));
    return fit;
}

SmfPrediction predict_eta_smf(const ZernikeSeries& ao_on, const FriedFit& fried, double wind_speed,
                              const ReceiverChaind& chain, const OpticalPathd& path) {
    chain.validate();
    detail::require_positive(fried.r0_hat, "fitted r0");
    const double lambda = path.wavelength();
    const ZernikeSeries closed_loop = ao_on.wavelength() == lambda ? ao_on : ao_on.rescaled_to(lambda);
    const double on = eta_phi_on(empirical_variances(closed_loop), chain.ao_modes);

    SmfPrediction p;
    p.r0 = scale_r0(fried.r0_hat, fried.wavelength, lambda);
    const auto ts = TurbulenceStated::from_r0(p.r0, path, wind_speed);
    p.greenwood = greenwood_frequency(ts);
    p.scintillation = scintillation_report(ts, path, chain.d_rx);
    p.beta = mode_match_beta(chain, lambda);
    p.breakdown = compose_smf(eta0(p.beta, obscuration_ratio(chain)), p.scintillation.eta_s, on,
                              eta_phi_residual(chain.ao_modes, chain.d_rx, p.r0), eta_tau(p.greenwood, chain.f_3db));
    return p;
}

}  // namespace skylink
