#include "skylink/zernike.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace skylink {

int radial_order(int j) {
    if (j < 1) throw DomainError("Zernike mode index must be >= 1");
    // Floating-point estimate, then settle it exactly on n(n+3)/2 >= j.
    auto n = static_cast<long long>(std::ceil((-3.0 + std::sqrt(9.0 + 8.0 * j)) / 2.0));
    const auto last = [](long long m) { return m * (m + 3) / 2; };
    while (n > 1 && last(n - 1) >= j) --n;
    while (last(n) < j) ++n;
    return static_cast<int>(n);
}

ZernikeSeries::ZernikeSeries(Eigen::VectorXd timestamps, Eigen::MatrixXd coefficients, MaskArray valid,
                             double wavelength, double aperture_diameter)
    : timestamps_(std::move(timestamps)),
      coefficients_(std::move(coefficients)),
      valid_(std::move(valid)),
      wavelength_(wavelength),
      aperture_diameter_(aperture_diameter) {
    detail::require_positive(wavelength_, "series wavelength");
    if (coefficients_.rows() != timestamps_.size())
        throw DomainError("coefficient rows must match the number of timestamps");
    if (valid_.rows() != coefficients_.rows() || valid_.cols() != coefficients_.cols())
        throw DomainError("validity mask shape must match the coefficients");
    if (coefficients_.cols() < 1) throw DomainError("series needs at least one mode");
    for (Eigen::Index i = 1; i < timestamps_.size(); ++i) {
        if (!(timestamps_(i) > timestamps_(i - 1)))
            throw DomainError("timestamps must be strictly increasing");
    }
}

ZernikeSeries::ZernikeSeries(Eigen::VectorXd timestamps, Eigen::MatrixXd coefficients, double wavelength,
                             double aperture_diameter)
    : ZernikeSeries(std::move(timestamps), coefficients,
                    MaskArray::Constant(coefficients.rows(), coefficients.cols(), true), wavelength,
                    aperture_diameter) {}

ZernikeSeries ZernikeSeries::rescaled_to(double wavelength) const {
    detail::require_positive(wavelength, "wavelength");
    return ZernikeSeries(timestamps_, coefficients_ * (wavelength_ / wavelength), valid_, wavelength,
                         aperture_diameter_);
}

ModeVarianceSet::ModeVarianceSet(Eigen::VectorXd variances, Eigen::VectorXi sample_counts)
    : variances_(std::move(variances)), counts_(std::move(sample_counts)) {
    if (variances_.size() != counts_.size()) throw DomainError("variance and count vectors differ in size");
    for (Eigen::Index i = 0; i < variances_.size(); ++i) {
        if (counts_(i) < 2) {
            variances_(i) = std::numeric_limits<double>::quiet_NaN();
        } else if (!(variances_(i) >= 0.0)) {
            throw DomainError("mode variance must be >= 0");
        }
    }
}

ModeVarianceSet ModeVarianceSet::exact(const Eigen::VectorXd& variances) {
    return ModeVarianceSet(variances,
                           Eigen::VectorXi::Constant(variances.size(), std::numeric_limits<int>::max()));
}

bool ModeVarianceSet::present(int j) const {
    return j >= 1 && j <= mode_count() && counts_(j - 1) >= 2;
}

std::optional<double> ModeVarianceSet::variance(int j) const {
    if (!present(j)) return std::nullopt;
    return variances_(j - 1);
}

int ModeVarianceSet::sample_count(int j) const {
    if (j < 1 || j > mode_count()) return 0;
    return counts_(j - 1);
}

ModeVarianceSet empirical_variances(const ZernikeSeries& series) {
    const int modes = series.mode_count();
    Eigen::VectorXd var(modes);
    Eigen::VectorXi count(modes);
    const auto& b = series.coefficients();
    const auto& valid = series.valid_mask();
    for (int m = 0; m < modes; ++m) {
        const Eigen::Index n = valid.col(m).count();
        count(m) = static_cast<int>(n);
        if (n < 2) {
            var(m) = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        // Shifted by the first valid sample so constant columns give exactly 0.
        Eigen::Index first = 0;
        while (!valid(first, m)) ++first;
        const double shift = b(first, m);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            if (valid(i, m)) sum += b(i, m) - shift;
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            if (!valid(i, m)) continue;
            const double d = b(i, m) - shift - mean;
            ss += d * d;
        }
        var(m) = ss / static_cast<double>(n - 1);
    }
    return ModeVarianceSet(std::move(var), std::move(count));
}

}  // namespace skylink
