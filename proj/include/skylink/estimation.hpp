#ifndef SKYLINK_ESTIMATION_HPP
#define SKYLINK_ESTIMATION_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "skylink/atmosphere.hpp"
#include "skylink/coupling.hpp"
#include "skylink/zernike.hpp"

namespace skylink {

// WFS log format:
//
//   # wavelength_m=<float> d_rx_m=<float>
//   t_s,valid,b1,...,bJ
//   <rows>
//
// Coefficients are radians of phase at the header wavelength. `valid` is 0
// or 1 and applies to the whole sample.

ZernikeSeries read_wfs_log(std::istream& in);
ZernikeSeries load_wfs_log(const std::string& path);
void write_wfs_log(std::ostream& out, const ZernikeSeries& series);
void save_wfs_log(const std::string& path, const ZernikeSeries& series);

/// Log-domain residual RMS above which a variance set is not Kolmogorov-like.
inline constexpr double kKolmogorovResidualLimit = 0.3;

struct FriedFit {
    double r0_hat = 0.0;
    /// Wavelength r0_hat refers to (that of the variances).
    double wavelength = 0.0;
    /// Slope of log σ² against log g(j); 1 for Kolmogorov data. NaN when the
    /// modes span a single radial order.
    double fit_exponent_check = 0.0;
    double residual_rms = 0.0;
    /// 1.4826 · MAD of the per-mode r0 estimates over sqrt(mode count).
    double r0_uncertainty = 0.0;
    std::vector<int> modes_used;
    /// Requested modes dropped for a missing or non-positive variance.
    std::vector<int> modes_excluded;

    bool kolmogorov_consistent(double limit = kKolmogorovResidualLimit) const {
        return residual_rms <= limit;
    }
};

/// Modes first..last inclusive.
std::vector<int> mode_range(int first, int last);

/// One-parameter least-squares fit of log σ_j² = (5/3) log(D/r0) + log g(j)
/// over the selected modes. Needs at least three usable modes.
FriedFit fit_fried(const ModeVarianceSet& variances, double d_rx, std::span<const int> modes,
                   double wavelength);

struct SmfPrediction {
    SmfCouplingBreakdownd breakdown;
    double r0 = 0.0;          ///< r0_hat at the path wavelength
    double greenwood = 0.0;
    double beta = 0.0;
    ScintillationReportd scintillation;
};

/// Expected closed-loop coupling: η_φ,ON from the AO-ON variances of modes
/// 1..J, the residual, temporal and scintillation terms from r0_hat and the
/// wind, and η0 from the receiver chain. The AO-ON coefficients and r0_hat
/// are moved to the path wavelength first.
SmfPrediction predict_eta_smf(const ZernikeSeries& ao_on, const FriedFit& fried, double wind_speed,
                              const ReceiverChaind& chain, const OpticalPathd& path);

}  // namespace skylink

#endif  // SKYLINK_ESTIMATION_HPP
