#include "skylink/synth.hpp"

#include <cmath>
#include <numbers>

#include "skylink/atmosphere.hpp"

namespace skylink {

void SynthConfig::validate() const {
    detail::require_positive(r0, "r0");
    detail::require_positive(d_rx, "receiver aperture");
    if (j_max < 2) throw DomainError("j_max must be >= 2");
    if (n_samples < 2) throw DomainError("n_samples must be >= 2");
    detail::require_positive(sample_rate_hz, "sample rate");
    if (!(wind_m_s >= 0.0)) throw DomainError("wind speed must be >= 0");
    detail::require_positive(f_3db_hz, "AO rejection bandwidth");
    if (corrected_modes < 0) throw DomainError("corrected mode count must be >= 0");
    if (!(sensor_noise_rad2 >= 0.0)) throw DomainError("sensor noise must be >= 0");
    detail::require_positive(wavelength_m, "wavelength");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double NormalStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double synth_greenwood(const SynthConfig& cfg) {
    return greenwood_frequency(cfg.wind_m_s, cfg.r0);
}

double ao_rejection_factor(const SynthConfig& cfg, int j) {
    if (!cfg.ao_on || j > cfg.effective_corrected_modes()) return 1.0;
    return std::min(1.0, std::pow(synth_greenwood(cfg) / cfg.f_3db_hz, 5.0 / 3.0));
}

double lag_one_correlation(const SynthConfig& cfg) {
    const double fg = synth_greenwood(cfg);
    if (fg == 0.0) return 0.0;
    return std::exp(-2.0 * std::numbers::pi * fg / cfg.sample_rate_hz);
}

double target_variance(const SynthConfig& cfg, int j) {
    return ao_rejection_factor(cfg, j) * turbulence_variance(j, cfg.d_rx, cfg.r0) + cfg.sensor_noise_rad2;
}

ZernikeSeries generate_series(const SynthConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(cfg.n_samples);
    const double rho = lag_one_correlation(cfg);
    const double innovation = std::sqrt(1.0 - rho * rho);
    const double noise_sd = std::sqrt(cfg.sensor_noise_rad2);

    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = static_cast<double>(i) / cfg.sample_rate_hz;

    Eigen::MatrixXd b(n, cfg.j_max);
    for (int j = 1; j <= cfg.j_max; ++j) {
        NormalStream rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(j)));
        const double sd = std::sqrt(ao_rejection_factor(cfg, j) * turbulence_variance(j, cfg.d_rx, cfg.r0));
        double state = sd * rng.normal();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i > 0) state = rho * state + innovation * sd * rng.normal();
            b(i, j - 1) = state + (noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0);
        }
    }
    return ZernikeSeries(std::move(t), std::move(b), cfg.wavelength_m, cfg.d_rx);
}

}  // namespace skylink
