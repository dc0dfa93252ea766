#ifndef SKYLINK_QKD_HPP
#define SKYLINK_QKD_HPP

// Detection-rate, QBER and secret-key-rate accounting for the 3-state
// 1-decoy efficient BB84 protocol over a lossy channel.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skylink {

struct DetectorModel {
    std::string label;
    double efficiency = 0.80;
    /// Background plus dark counts, as logged by the receiver.
    double noise_rate_hz = 2e3;
    /// Coincidence window around the expected arrival time.
    double window_s = 600e-12;

    static DetectorModel snspd();
    static DetectorModel spad();
    void validate() const;
};

/// Protocol settings the key-rate bound depends on. The defaults are
/// representative values for a 1-decoy source, not measured ones.
struct ProtocolParameters {
    double pulse_rate_hz = 100e6;
    double mu_signal = 0.7;
    double mu_decoy = 0.25;
    double p_signal = 0.5;
    double p_z_alice = 0.5;
    double p_z_bob = 0.5;
    double ec_efficiency = 1.16;
    double eps_sec = 1e-9;
    double eps_corr = 1e-15;

    void validate() const;
};

struct QkdSessionModel {
    DetectorModel detector = DetectorModel::snspd();
    /// Loss inside the QKD receiver, as a transmission ratio.
    double internal_loss = 0.758577575029184;  // -1.2 dB
    /// Detected signal rate for a lossless channel, lossless receiver and
    /// unit-efficiency detector. A calibration input.
    double reference_rate_hz = 0.0;
    ProtocolParameters protocol;
    /// Sifted Z-basis block size used for finite-key post-processing.
    std::int64_t block_size_bytes = 250000;

    static QkdSessionModel snspd_defaults();
    static QkdSessionModel spad_defaults();

    double block_size_bits() const { return 8.0 * static_cast<double>(block_size_bytes); }
    void validate() const;
};

/// R_ref chosen so that expected_signal_rate reproduces `measured_rate` at `eta_ch`.
double calibrate_reference_rate(double measured_rate, double eta_ch, double internal_loss,
                                double detector_efficiency);

/// R_ref · η_Ch · internal_loss · η_det
double expected_signal_rate(const QkdSessionModel& session, double eta_ch);

struct ChannelEstimate {
    double eta_ch;
    /// The measured rate implies more than unit transmission.
    bool exceeds_unity;
};

ChannelEstimate channel_efficiency_from_rate(const QkdSessionModel& session, double measured_rate);

/// Background counts accepted by the coincidence window: one window of
/// width Δt per emitted pulse.
double windowed_noise_rate(double raw_noise_hz, double window_s, double pulse_rate_hz);

/// (e·S + N_w/2) / (S + N_w)
double expected_qber(double signal_rate, double windowed_noise_rate, double intrinsic_qber);

/// Inverse of expected_qber for the intrinsic term, clamped at 0.
double intrinsic_qber(double observed_qber, double signal_rate, double windowed_noise_rate);

struct RateObservation {
    double t_s = 0.0;
    double signal_hz = 0.0;
    double noise_hz = 0.0;
    double qber_z = 0.0;
    double qber_x = 0.0;
    std::optional<double> skr_bps;

    void validate() const;
};

enum class NoiseConvention {
    /// noise_hz is the raw background rate; the window is applied here.
    raw,
    /// noise_hz already counts only in-window events.
    windowed,
};

struct SkrResult {
    double skr_bps = 0.0;
    double secret_bits = 0.0;      ///< per block, before clamping
    double block_time_s = 0.0;
    double channel_transmittance = 0.0;
    double vacuum_lower = 0.0;     ///< s_Z,0 lower bound
    double single_lower = 0.0;     ///< s_Z,1 lower bound
    double phase_error_upper = 0.0;
    bool clamped = false;
    std::string diagnostic;
};

/// Finite-key secret key rate of the 1-decoy protocol (Hoeffding-based
/// decoy bounds). Counts for one sifted block are built from the observed
/// rates, QBERs and the protocol settings.
SkrResult secret_key_rate(const QkdSessionModel& session, const RateObservation& observation,
                          NoiseConvention noise = NoiseConvention::raw);

struct FieldStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;  ///< sample (N-1); 0 for a single record
    std::size_t count = 0;
};

struct SessionSummary {
    std::size_t records = 0;
    FieldStats signal_hz;
    FieldStats noise_hz;
    FieldStats qber_z;
    FieldStats qber_x;
    std::optional<FieldStats> skr_bps;

    /// Per-field means as a single observation.
    RateObservation mean_observation() const;
};

SessionSummary analyze_session_log(std::span<const RateObservation> records);

/// `t_s,signal_hz,noise_hz,qber_z,qber_x,skr_bps`, one row per reporting interval.
std::vector<RateObservation> read_session_log(std::istream& in);
std::vector<RateObservation> load_session_log(const std::string& path);
void write_session_log(std::ostream& out, std::span<const RateObservation> records);

}  // namespace skylink

#endif  // SKYLINK_QKD_HPP
