#ifndef SKYLINK_CLI_HPP
#define SKYLINK_CLI_HPP

// Command-line front end. The executable in tools/ only forwards to run().

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skylink/coupling.hpp"
#include "skylink/qkd.hpp"

namespace skylink::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,   ///< bad flags or configuration
    kDomain = 3,  ///< inputs outside a model's domain
    kIo = 4,      ///< unreadable or malformed files
};

/// Run configuration. Every key is optional; units are part of the key name.
///
///   { "link":       { "wavelength_m", "length_m", "w0_m", "absorption_db_per_km" },
///     "receiver":   { "d_rx_m", "d_obs_m", "f_eff_m", "mfd_m", "eta_tel_db",
///                     "eta_optics_db", "eta_fiber_db", "ao_modes", "f_3db_hz" },
///     "turbulence": { "r0_m", "r0_wavelength_m", "wind_m_s", "eta_phi_on_db" },
///     "detector":   { "type", "efficiency", "noise_hz", "window_s" },
///     "qkd":        { "pulse_rate_hz", "mu_signal", "mu_decoy", "p_signal",
///                     "p_z_alice", "p_z_bob", "ec_efficiency", "eps_sec",
///                     "eps_corr", "block_size_bytes", "internal_loss_db",
///                     "reference_rate_hz", "intrinsic_qber", "noise_convention" } }
struct RunConfig {
    double wavelength_m = 1.555e-6;
    double length_m = 18e3;
    double w0_m = 25e-3;
    double absorption_db_per_km = 0.2;

    ReceiverChaind receiver;

    double r0_m = 0.0875;
    /// Wavelength r0_m refers to; the link wavelength when unset.
    std::optional<double> r0_wavelength_m;
    double wind_m_s = 0.556;
    double eta_phi_on_db = 0.0;

    std::string detector = "snspd";
    std::optional<double> detector_efficiency;
    std::optional<double> detector_noise_hz;
    std::optional<double> detector_window_s;

    ProtocolParameters protocol;
    std::optional<std::int64_t> block_size_bytes;
    double internal_loss_db = -1.2;
    std::optional<double> reference_rate_hz;
    /// Optical error rate used when a QBER is predicted rather than measured.
    double intrinsic_qber = 0.005;
    NoiseConvention noise_convention = NoiseConvention::raw;

    double r0_at_link_wavelength() const;
    /// Session model for the configured detector, or for `detector_type` when given.
    QkdSessionModel session(std::optional<std::string> detector_type = std::nullopt) const;
};

/// Throws ConfigError on malformed JSON, unknown keys or wrong value types.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path);

/// The full configuration with every key present.
std::string dump_run_config(const RunConfig& config);

/// Entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skylink::cli

#endif  // SKYLINK_CLI_HPP
