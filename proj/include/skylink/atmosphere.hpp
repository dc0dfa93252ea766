#ifndef SKYLINK_ATMOSPHERE_HPP
#define SKYLINK_ATMOSPHERE_HPP

// Turbulence statistics for a horizontal link, spherical-wave branch.
// Everything here is templated on the scalar so the same formulas can be
// evaluated in extended precision.

#include <cmath>
#include <limits>

#include "skylink/core.hpp"

namespace skylink {

template <typename Scalar>
class OpticalPath {
public:
    OpticalPath(const Scalar& wavelength, const Scalar& length)
        : wavelength_(wavelength), length_(length) {
        detail::require_positive(wavelength, "wavelength");
        detail::require_positive(length, "path length");
        wavenumber_ = Scalar(Scalar(2) * pi<Scalar>() / wavelength_);
    }

    const Scalar& wavelength() const { return wavelength_; }
    const Scalar& length() const { return length_; }
    const Scalar& wavenumber() const { return wavenumber_; }

private:
    Scalar wavelength_;
    Scalar length_;
    Scalar wavenumber_;
};

using OpticalPathd = OpticalPath<double>;

/// r0 = (0.16 Cn² k² L)^(-3/5)
template <typename Scalar>
Scalar r0_from_cn2(const Scalar& cn2, const OpticalPath<Scalar>& path) {
    using std::pow;
    detail::require_positive(cn2, "Cn2");
    const Scalar& k = path.wavenumber();
    return Scalar(pow(Scalar(Scalar(0.16) * cn2 * k * k * path.length()), Scalar(-3) / Scalar(5)));
}

template <typename Scalar>
Scalar cn2_from_r0(const Scalar& r0, const OpticalPath<Scalar>& path) {
    using std::pow;
    detail::require_positive(r0, "r0");
    const Scalar& k = path.wavenumber();
    return Scalar(pow(r0, Scalar(-5) / Scalar(3)) / (Scalar(0.16) * k * k * path.length()));
}

/// r0 re-expressed at another wavelength, at fixed Cn² (r0 ∝ λ^(6/5)).
template <typename Scalar>
Scalar scale_r0(const Scalar& r0, const Scalar& from_wavelength, const Scalar& to_wavelength) {
    using std::pow;
    detail::require_positive(r0, "r0");
    detail::require_positive(from_wavelength, "wavelength");
    detail::require_positive(to_wavelength, "wavelength");
    return Scalar(r0 * pow(Scalar(to_wavelength / from_wavelength), Scalar(6) / Scalar(5)));
}

/// Fried parameter and Cn² for one path, kept mutually consistent.
/// r0 is tagged with the path wavelength.
template <typename Scalar>
class TurbulenceState {
public:
    static TurbulenceState from_r0(const Scalar& r0, const OpticalPath<Scalar>& path,
                                   const Scalar& wind_speed = Scalar(0)) {
        return TurbulenceState(r0, cn2_from_r0(r0, path), wind_speed, path);
    }

    static TurbulenceState from_cn2(const Scalar& cn2, const OpticalPath<Scalar>& path,
                                    const Scalar& wind_speed = Scalar(0)) {
        return TurbulenceState(r0_from_cn2(cn2, path), cn2, wind_speed, path);
    }

    TurbulenceState(const Scalar& r0, const Scalar& cn2, const Scalar& wind_speed,
                    const OpticalPath<Scalar>& path)
        : r0_(r0), cn2_(cn2), wind_(wind_speed), path_(path) {
        using std::abs;
        detail::require_positive(r0, "r0");
        detail::require_positive(cn2, "Cn2");
        if (!(wind_speed >= Scalar(0))) throw DomainError("wind speed must be >= 0");
        const Scalar expected = r0_from_cn2(cn2, path);
        if (abs(Scalar((expected - r0) / r0)) > Scalar(1e-9))
            throw DomainError("r0 and Cn2 are inconsistent for the given path");
    }

    const Scalar& fried_r0() const { return r0_; }
    const Scalar& cn2() const { return cn2_; }
    const Scalar& wind_speed() const { return wind_; }
    const Scalar& reference_wavelength() const { return path_.wavelength(); }
    const OpticalPath<Scalar>& path() const { return path_; }

    Scalar r0_at(const Scalar& wavelength) const {
        return scale_r0(r0_, path_.wavelength(), wavelength);
    }

private:
    Scalar r0_;
    Scalar cn2_;
    Scalar wind_;
    OpticalPath<Scalar> path_;
};

using TurbulenceStated = TurbulenceState<double>;

/// σ_R² = 1.23 Cn² k^(7/6) L^(11/6). Accepts Cn² = 0.
template <typename Scalar>
Scalar rytov_variance(const Scalar& cn2, const OpticalPath<Scalar>& path) {
    using std::pow;
    if (!(cn2 >= Scalar(0))) throw DomainError("Cn2 must be >= 0");
    return Scalar(Scalar(1.23) * cn2 * pow(path.wavenumber(), Scalar(7) / Scalar(6)) *
                  pow(path.length(), Scalar(11) / Scalar(6)));
}

template <typename Scalar>
Scalar rytov_variance(const TurbulenceState<Scalar>& ts, const OpticalPath<Scalar>& path) {
    return rytov_variance(ts.cn2(), path);
}

template <typename Scalar>
struct ScintillationReport {
    Scalar rytov_sigma_r2;
    Scalar beta0;          ///< spherical-wave Rytov variance
    Scalar aperture_d;     ///< sqrt(k D² / 4L)
    Scalar t1;
    Scalar t2;
    Scalar sigma_i2;       ///< aperture-averaged scintillation index
    Scalar sigma_chi2;     ///< log-amplitude variance
    Scalar eta_s;
    Scalar rho_c_weak;
    Scalar rho_c_strong;   ///< +inf when σ_R = 0

    bool strong_turbulence() const { return rytov_sigma_r2 > Scalar(1); }
    const Scalar& rho_c() const { return strong_turbulence() ? rho_c_strong : rho_c_weak; }
};

using ScintillationReportd = ScintillationReport<double>;

template <typename Scalar>
ScintillationReport<Scalar> scintillation_report(const Scalar& cn2, const OpticalPath<Scalar>& path,
                                                 const Scalar& d_rx) {
    using std::exp;
    using std::log;
    using std::pow;
    using std::sqrt;
    detail::require_positive(d_rx, "receiver aperture");

    ScintillationReport<Scalar> r;
    const Scalar& k = path.wavenumber();
    const Scalar& L = path.length();
    r.rytov_sigma_r2 = rytov_variance(cn2, path);
    r.beta0 = Scalar(Scalar(0.4065) * r.rytov_sigma_r2);
    r.aperture_d = Scalar(sqrt(Scalar(k * d_rx * d_rx / (Scalar(4) * L))));

    const Scalar d2 = Scalar(r.aperture_d * r.aperture_d);
    const Scalar b2 = Scalar(r.beta0 * r.beta0);
    const Scalar b125 = Scalar(pow(r.beta0, Scalar(12) / Scalar(5)));
    r.t1 = Scalar(Scalar(0.49) * b2 /
                  pow(Scalar(Scalar(1) + Scalar(0.18) * d2 + Scalar(0.56) * b125), Scalar(7) / Scalar(6)));
    r.t2 = Scalar(Scalar(0.51) * b2 /
                  pow(Scalar(Scalar(1) + Scalar(0.90) * d2 + Scalar(0.69) * b125), Scalar(5) / Scalar(6)));
    r.sigma_i2 = Scalar(exp(Scalar(r.t1 + r.t2)) - Scalar(1));
    r.sigma_chi2 = Scalar(log(Scalar(r.sigma_i2 + Scalar(1))) / Scalar(4));
    r.eta_s = Scalar(exp(Scalar(-r.sigma_chi2)));

    r.rho_c_weak = Scalar(sqrt(Scalar(path.wavelength() * L)));
    if (r.rytov_sigma_r2 > Scalar(0)) {
        const Scalar sigma_r = Scalar(sqrt(r.rytov_sigma_r2));
        r.rho_c_strong = Scalar(Scalar(0.36) * pow(sigma_r, Scalar(-3) / Scalar(5)) * r.rho_c_weak);
    } else {
        r.rho_c_strong = Scalar(std::numeric_limits<double>::infinity());
    }
    return r;
}

template <typename Scalar>
ScintillationReport<Scalar> scintillation_report(const TurbulenceState<Scalar>& ts,
                                                 const OpticalPath<Scalar>& path, const Scalar& d_rx) {
    return scintillation_report(ts.cn2(), path, d_rx);
}

/// f_G = 0.43 w / r0
template <typename Scalar>
Scalar greenwood_frequency(const Scalar& wind_speed, const Scalar& r0) {
    detail::require_positive(r0, "r0");
    if (!(wind_speed >= Scalar(0))) throw DomainError("wind speed must be >= 0");
    return Scalar(Scalar(0.43) * wind_speed / r0);
}

template <typename Scalar>
Scalar greenwood_frequency(const TurbulenceState<Scalar>& ts) {
    return greenwood_frequency(ts.wind_speed(), ts.fried_r0());
}

}  // namespace skylink

#endif  // SKYLINK_ATMOSPHERE_HPP
