#ifndef SKYLINK_SYNTH_HPP
#define SKYLINK_SYNTH_HPP

// Synthetic wavefront-sensor logs with Kolmogorov mode variances.
//
// Random numbers: each mode j draws from its own std::mt19937_64 seeded with
// splitmix64(seed + j). Uniforms use the top 53 bits, u = (x >> 11) · 2^-53,
// and normals come from the Box-Muller cosine branch with 1 - u1 in the log.
// Every step is specified so other implementations can reproduce the output.

#include <cstdint>
#include <random>

#include "skylink/zernike.hpp"

namespace skylink {

struct SynthConfig {
    double r0 = 0.05;                ///< at wavelength_m
    double d_rx = 0.41;
    int j_max = 35;
    std::int64_t n_samples = 10000;
    double sample_rate_hz = 600.0;
    double wind_m_s = 0.0;           ///< 0 gives white samples
    bool ao_on = false;
    double f_3db_hz = 10.0;
    /// Modes 1..J attenuated when ao_on; 0 means all modes.
    int corrected_modes = 0;
    /// White sensor noise added to every mode, rad².
    double sensor_noise_rad2 = 0.0;
    double wavelength_m = 1.555e-6;
    std::uint64_t seed = 1;

    void validate() const;
    int effective_corrected_modes() const { return corrected_modes > 0 ? corrected_modes : j_max; }
};

std::uint64_t splitmix64(std::uint64_t x);

/// Portable standard-normal stream (see the file comment).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
};

/// f_G = 0.43 w / r0 of the configuration.
double synth_greenwood(const SynthConfig& cfg);

/// min(1, (f_G / f_3dB)^(5/3)) for corrected modes when ao_on, else 1.
double ao_rejection_factor(const SynthConfig& cfg, int j);

/// exp(-2π f_G / f_s); 0 when the wind is 0.
double lag_one_correlation(const SynthConfig& cfg);

/// Stationary variance of mode j, sensor noise included.
double target_variance(const SynthConfig& cfg, int j);

/// One AR(1) Gaussian process per mode, timestamps i / f_s, all samples valid.
ZernikeSeries generate_series(const SynthConfig& cfg);

}  // namespace skylink

#endif  // SKYLINK_SYNTH_HPP
