#ifndef SKYLINK_ZERNIKE_HPP
#define SKYLINK_ZERNIKE_HPP

// Kolmogorov statistics of Zernike modes. Mode indices follow the ANSI/ISO
// ordering with piston excluded: j = 1 and j = 2 are the tilts.

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "skylink/core.hpp"

namespace skylink {

/// n = ceil((-3 + sqrt(9 + 8j)) / 2), i.e. the smallest n with n(n+3)/2 >= j.
int radial_order(int j);

/// Per-mode variance weight g(j) of Kolmogorov turbulence:
///
///   g(j) = (n+1)/pi * Γ(n-5/6) Γ(23/6) Γ(11/6) sin(5π/6) / Γ(n+23/6)
///
/// g depends on j only through the radial order n.
template <typename Scalar = double>
Scalar noll_weight(int j) {
    using std::exp;
    using std::lgamma;
    using std::sin;
    using std::tgamma;
    const int n = radial_order(j);
    const Scalar sixth = Scalar(1) / Scalar(6);
    const Scalar nn = Scalar(n);
    const Scalar lo = Scalar(nn - Scalar(5) * sixth);
    const Scalar hi = Scalar(nn + Scalar(23) * sixth);
    // tgamma(hi) overflows doubles past ~171.
    const Scalar ratio = n <= 100 ? Scalar(tgamma(lo) / tgamma(hi))
                                  : Scalar(exp(Scalar(lgamma(lo) - lgamma(hi))));
    const Scalar constant = Scalar(tgamma(Scalar(Scalar(23) * sixth)) * tgamma(Scalar(Scalar(11) * sixth)) *
                                   sin(Scalar(Scalar(5) * pi<Scalar>() * sixth)));
    return Scalar((nn + Scalar(1)) / pi<Scalar>() * ratio * constant);
}

/// σ_j² = (D/r0)^(5/3) g(j), radians² of phase.
template <typename Scalar = double>
Scalar turbulence_variance(int j, const Scalar& d_rx, const Scalar& r0) {
    using std::pow;
    detail::require_positive(d_rx, "receiver aperture");
    detail::require_positive(r0, "r0");
    return Scalar(pow(Scalar(d_rx / r0), Scalar(5) / Scalar(3)) * noll_weight<Scalar>(j));
}

/// Residual phase variance after ideal correction of the first J modes:
/// σ_J² = 0.2944 J^(-√3/2) (D/r0)^(5/3).
template <typename Scalar = double>
Scalar residual_variance(int corrected_modes, const Scalar& d_rx, const Scalar& r0) {
    using std::pow;
    using std::sqrt;
    if (corrected_modes < 1) throw DomainError("corrected mode count must be >= 1");
    detail::require_positive(d_rx, "receiver aperture");
    detail::require_positive(r0, "r0");
    return Scalar(Scalar(0.2944) * pow(Scalar(corrected_modes), Scalar(-sqrt(Scalar(3)) / Scalar(2))) *
                  pow(Scalar(d_rx / r0), Scalar(5) / Scalar(3)));
}

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Time series of Zernike coefficients from a wavefront sensor.
/// Rows are samples, columns are modes j = 1..J (column j-1).
class ZernikeSeries {
public:
    ZernikeSeries(Eigen::VectorXd timestamps, Eigen::MatrixXd coefficients, MaskArray valid,
                  double wavelength, double aperture_diameter = std::nan(""));
    ZernikeSeries(Eigen::VectorXd timestamps, Eigen::MatrixXd coefficients, double wavelength,
                  double aperture_diameter = std::nan(""));

    Eigen::Index sample_count() const { return timestamps_.size(); }
    int mode_count() const { return static_cast<int>(coefficients_.cols()); }

    const Eigen::VectorXd& timestamps() const { return timestamps_; }
    const Eigen::MatrixXd& coefficients() const { return coefficients_; }
    const MaskArray& valid_mask() const { return valid_; }
    double wavelength() const { return wavelength_; }
    /// Pupil diameter the coefficients refer to; NaN when unknown.
    double aperture_diameter() const { return aperture_diameter_; }

    /// A sample is valid when every mode in it is valid.
    bool sample_valid(Eigen::Index sample) const { return valid_.row(sample).all(); }

    /// Phase coefficients rescaled to another wavelength (b ∝ 1/λ).
    ZernikeSeries rescaled_to(double wavelength) const;

private:
    Eigen::VectorXd timestamps_;
    Eigen::MatrixXd coefficients_;
    MaskArray valid_;
    double wavelength_;
    double aperture_diameter_;
};

/// Per-mode variances, j = 1..J. Modes with fewer than two samples are absent.
class ModeVarianceSet {
public:
    ModeVarianceSet(Eigen::VectorXd variances, Eigen::VectorXi sample_counts);

    /// Model variances with no sampling behind them.
    static ModeVarianceSet exact(const Eigen::VectorXd& variances);

    int mode_count() const { return static_cast<int>(variances_.size()); }
    bool present(int j) const;
    std::optional<double> variance(int j) const;
    int sample_count(int j) const;

    /// Absent modes hold NaN.
    const Eigen::VectorXd& values() const { return variances_; }
    const Eigen::VectorXi& sample_counts() const { return counts_; }

private:
    Eigen::VectorXd variances_;
    Eigen::VectorXi counts_;
};

/// Unbiased (N-1) sample variance of each mode over its valid samples.
ModeVarianceSet empirical_variances(const ZernikeSeries& series);

}  // namespace skylink

#endif  // SKYLINK_ZERNIKE_HPP
