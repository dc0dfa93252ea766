#include "skylink/qkd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "skylink/core.hpp"

namespace skylink {

namespace {

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Finite-size deviation sqrt(n/2 · ln(21/ε)).
double hoeffding(double n, double eps_sec) {
    return std::sqrt(n / 2.0 * std::log(21.0 / eps_sec));
}

// γ(a, b, c, d) of the phase-error bound; 0 in the b → 0 limit.
double phase_error_fluctuation(double eps_sec, double b, double c, double d) {
    if (b <= 0.0) return 0.0;
    const double inner = (c + d) / (c * d * (1.0 - b) * b) * (21.0 * 21.0) / (eps_sec * eps_sec);
    return std::sqrt((c + d) * (1.0 - b) * b / (c * d * std::numbers::ln2) * std::log2(inner));
}

struct IntensityCounts {
    std::array<double, 2> detections;
    std::array<double, 2> errors;
    double total_detections;
    double total_errors;
};

}  // namespace

DetectorModel DetectorModel::snspd() { return {"snspd", 0.80, 2e3, 600e-12}; }
DetectorModel DetectorModel::spad() { return {"spad", 0.15, 2e3, 600e-12}; }

void DetectorModel::validate() const {
    detail::require_efficiency(efficiency, "detector efficiency");
    if (!(noise_rate_hz >= 0.0)) throw DomainError("detector noise rate must be >= 0");
    detail::require_positive(window_s, "coincidence window");
}

void ProtocolParameters::validate() const {
    detail::require_positive(pulse_rate_hz, "pulse rate");
    if (!(mu_signal > mu_decoy && mu_decoy > 0.0))
        throw DomainError("mean photon numbers must satisfy mu_signal > mu_decoy > 0");
    if (!(p_signal > 0.0 && p_signal < 1.0)) throw DomainError("signal probability must lie in (0, 1)");
    if (!(p_z_alice > 0.0 && p_z_alice < 1.0) || !(p_z_bob > 0.0 && p_z_bob < 1.0))
        throw DomainError("basis probabilities must lie in (0, 1)");
    if (!(ec_efficiency >= 1.0)) throw DomainError("error-correction efficiency must be >= 1");
    if (!(eps_sec > 0.0 && eps_sec < 1.0) || !(eps_corr > 0.0 && eps_corr < 1.0))
        throw DomainError("security parameters must lie in (0, 1)");
}

namespace {

// Calibration point: 20.4 kHz detected with SNSPDs at η_Ch = -29 dB behind
// -1.2 dB of receiver loss.
double default_reference_rate() {
    return calibrate_reference_rate(20.4e3, from_db(-29.0), from_db(-1.2), 0.80);
}

}  // namespace

QkdSessionModel QkdSessionModel::snspd_defaults() {
    QkdSessionModel s;
    s.detector = DetectorModel::snspd();
    s.internal_loss = from_db(-1.2);
    s.reference_rate_hz = default_reference_rate();
    s.block_size_bytes = 250000;
    return s;
}

QkdSessionModel QkdSessionModel::spad_defaults() {
    QkdSessionModel s = snspd_defaults();
    s.detector = DetectorModel::spad();
    s.block_size_bytes = 50000;
    return s;
}

void QkdSessionModel::validate() const {
    detector.validate();
    protocol.validate();
    detail::require_efficiency(internal_loss, "internal loss");
    if (!(reference_rate_hz >= 0.0)) throw DomainError("reference rate must be >= 0");
    if (block_size_bytes <= 0) throw DomainError("block size must be > 0");
}

double calibrate_reference_rate(double measured_rate, double eta_ch, double internal_loss,
                                double detector_efficiency) {
    detail::require_positive(measured_rate, "measured rate");
    detail::require_efficiency(eta_ch, "channel efficiency");
    detail::require_efficiency(internal_loss, "internal loss");
    detail::require_efficiency(detector_efficiency, "detector efficiency");
    return measured_rate / (eta_ch * internal_loss * detector_efficiency);
}

double expected_signal_rate(const QkdSessionModel& session, double eta_ch) {
    session.validate();
    detail::require_efficiency(eta_ch, "channel efficiency");
    return session.reference_rate_hz * eta_ch * session.internal_loss * session.detector.efficiency;
}

ChannelEstimate channel_efficiency_from_rate(const QkdSessionModel& session, double measured_rate) {
    session.validate();
    detail::require_positive(measured_rate, "measured rate");
    detail::require_positive(session.reference_rate_hz, "reference rate");
    const double eta =
        measured_rate / (session.reference_rate_hz * session.internal_loss * session.detector.efficiency);
    return {eta, eta > 1.0};
}

double windowed_noise_rate(double raw_noise_hz, double window_s, double pulse_rate_hz) {
    if (!(raw_noise_hz >= 0.0)) throw DomainError("noise rate must be >= 0");
    detail::require_positive(window_s, "coincidence window");
    detail::require_positive(pulse_rate_hz, "pulse rate");
    return raw_noise_hz * std::min(1.0, window_s * pulse_rate_hz);
}

double expected_qber(double signal_rate, double windowed_noise, double intrinsic) {
    if (!(signal_rate >= 0.0) || !(windowed_noise >= 0.0)) throw DomainError("rates must be >= 0");
    if (!(intrinsic >= 0.0 && intrinsic <= 0.5)) throw DomainError("intrinsic QBER must lie in [0, 0.5]");
    const double total = signal_rate + windowed_noise;
    if (total == 0.0) throw DomainError("QBER is undefined without any detections");
    return (intrinsic * signal_rate + 0.5 * windowed_noise) / total;
}

double intrinsic_qber(double observed_qber, double signal_rate, double windowed_noise) {
    detail::require_positive(signal_rate, "signal rate");
    if (!(windowed_noise >= 0.0)) throw DomainError("noise rate must be >= 0");
    const double e = (observed_qber * (signal_rate + windowed_noise) - 0.5 * windowed_noise) / signal_rate;
    return std::clamp(e, 0.0, 0.5);
}

void RateObservation::validate() const {
    if (!(signal_hz >= 0.0) || !(noise_hz >= 0.0)) throw DomainError("rates must be >= 0");
    if (!(qber_z >= 0.0 && qber_z <= 0.5) || !(qber_x >= 0.0 && qber_x <= 0.5))
        throw DomainError("QBER must lie in [0, 0.5]");
    if (skr_bps && !(*skr_bps >= 0.0)) throw DomainError("secret key rate must be >= 0");
}

SkrResult secret_key_rate(const QkdSessionModel& session, const RateObservation& obs, NoiseConvention noise) {
    session.validate();
    obs.validate();
    const ProtocolParameters& p = session.protocol;
    SkrResult r;

    if (obs.qber_z >= 0.5 || obs.qber_x >= 0.5) {
        r.clamped = true;
        r.diagnostic = "QBER at or above 0.5 leaves no extractable key";
        return r;
    }
    if (obs.signal_hz <= 0.0) {
        r.clamped = true;
        r.diagnostic = "no signal detections";
        return r;
    }

    const double noise_w = noise == NoiseConvention::raw
                               ? windowed_noise_rate(obs.noise_hz, session.detector.window_s, p.pulse_rate_hz)
                               : obs.noise_hz;
    const double p_noise = noise_w / p.pulse_rate_hz;
    const std::array<double, 2> mu{p.mu_signal, p.mu_decoy};
    const std::array<double, 2> prob{p.p_signal, 1.0 - p.p_signal};

    // Overall transmittance η from S = f Σ p_k (1 - e^{-η μ_k}), by Newton.
    double eta = obs.signal_hz / (p.pulse_rate_hz * (prob[0] * mu[0] + prob[1] * mu[1]));
    for (int it = 0; it < 100; ++it) {
        double f = -obs.signal_hz / p.pulse_rate_hz;
        double df = 0.0;
        for (int k = 0; k < 2; ++k) {
            f += prob[k] * -std::expm1(-eta * mu[k]);
            df += prob[k] * mu[k] * std::exp(-eta * mu[k]);
        }
        const double step = f / df;
        eta -= step;
        if (std::abs(step) <= 1e-15 * eta) break;
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        r.clamped = true;
        r.diagnostic = "signal rate is not reachable with the configured pulse rate";
        return r;
    }
    r.channel_transmittance = eta;

    const double e_z = intrinsic_qber(obs.qber_z, obs.signal_hz, noise_w);
    const double e_x = intrinsic_qber(obs.qber_x, obs.signal_hz, noise_w);

    std::array<double, 2> click{};
    std::array<double, 2> signal_click{};
    double mean_click = 0.0;
    for (int k = 0; k < 2; ++k) {
        signal_click[k] = -std::expm1(-eta * mu[k]);
        click[k] = signal_click[k] + p_noise;
        mean_click += prob[k] * click[k];
    }
    const auto split = [&](double detections, double intrinsic) {
        IntensityCounts c{};
        c.total_detections = detections;
        for (int k = 0; k < 2; ++k) {
            c.detections[k] = detections * prob[k] * click[k] / mean_click;
            const double err = (intrinsic * signal_click[k] + 0.5 * p_noise) / click[k];
            c.errors[k] = c.detections[k] * err;
            c.total_errors += c.errors[k];
        }
        return c;
    };

    const double n_z = session.block_size_bits();
    const double n_x = n_z * (1.0 - p.p_z_alice) * (1.0 - p.p_z_bob) / (p.p_z_alice * p.p_z_bob);
    const IntensityCounts z = split(n_z, e_z);
    const IntensityCounts x = split(n_x, e_x);

    double tau0 = 0.0, tau1 = 0.0;
    for (int k = 0; k < 2; ++k) {
        tau0 += prob[k] * std::exp(-mu[k]);
        tau1 += prob[k] * std::exp(-mu[k]) * mu[k];
    }
    const double mu1 = mu[0], mu2 = mu[1];

    // e^{μ_k}/p_k (n_k ± δ)
    const auto scaled = [&](double count, double total, int k, double sign) {
        return std::exp(mu[k]) / prob[k] * (count + sign * hoeffding(total, p.eps_sec));
    };
    struct Bounds {
        double vacuum_upper, vacuum_lower, single_lower;
    };
    const auto decoy_bounds = [&](const IntensityCounts& c) {
        Bounds b{};
        b.vacuum_upper = 2.0 * (tau0 * std::exp(mu2) / prob[1] *
                                    (c.errors[1] + hoeffding(c.total_errors, p.eps_sec)) +
                                hoeffding(c.total_detections, p.eps_sec));
        const double n2_minus = scaled(c.detections[1], c.total_detections, 1, -1.0);
        const double n1_plus = scaled(c.detections[0], c.total_detections, 0, +1.0);
        b.vacuum_lower = std::max(0.0, tau0 / (mu1 - mu2) * (mu1 * n2_minus - mu2 * n1_plus));
        b.single_lower = tau1 * mu1 / (mu2 * (mu1 - mu2)) *
                         (n2_minus - mu2 * mu2 / (mu1 * mu1) * n1_plus -
                          (mu1 * mu1 - mu2 * mu2) / (mu1 * mu1) * b.vacuum_upper / tau0);
        return b;
    };
    const Bounds bz = decoy_bounds(z);
    const Bounds bx = decoy_bounds(x);
    r.vacuum_lower = bz.vacuum_lower;
    r.single_lower = bz.single_lower;

    r.block_time_s = n_z / ((obs.signal_hz + noise_w) * p.p_z_alice * p.p_z_bob);

    if (bz.single_lower <= 0.0 || bx.single_lower <= 0.0) {
        r.clamped = true;
        r.diagnostic = "single-photon lower bound is not positive; statistics too weak for a key";
        return r;
    }

    const double v_upper =
        std::max(0.0, tau1 / (mu1 - mu2) *
                          (scaled(x.errors[0], x.total_errors, 0, +1.0) - scaled(x.errors[1], x.total_errors, 1, -1.0)));
    const double ratio = std::min(0.5, v_upper / bx.single_lower);
    double phase = ratio + phase_error_fluctuation(p.eps_sec, ratio, bz.single_lower, bx.single_lower);
    phase = std::min(phase, 0.5);
    r.phase_error_upper = phase;

    const double leak = p.ec_efficiency * n_z * binary_entropy(obs.qber_z);
    r.secret_bits = bz.vacuum_lower + bz.single_lower * (1.0 - binary_entropy(phase)) - leak -
                    6.0 * std::log2(19.0 / p.eps_sec) - std::log2(2.0 / p.eps_corr);
    if (r.secret_bits <= 0.0) {
        r.clamped = true;
        r.diagnostic = "finite-key bound is negative; key rate clamped to 0";
        return r;
    }
    r.skr_bps = r.secret_bits / r.block_time_s;
    return r;
}

namespace {

FieldStats stats_of(std::span<const double> v) {
    FieldStats s;
    s.count = v.size();
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

}  // namespace

SessionSummary analyze_session_log(std::span<const RateObservation> records) {
    if (records.empty()) throw DomainError("session log has no records");
    std::vector<double> sig, noi, qz, qx, skr;
    for (const auto& r : records) {
        r.validate();
        sig.push_back(r.signal_hz);
        noi.push_back(r.noise_hz);
        qz.push_back(r.qber_z);
        qx.push_back(r.qber_x);
        if (r.skr_bps) skr.push_back(*r.skr_bps);
    }
    SessionSummary s;
    s.records = records.size();
    s.signal_hz = stats_of(sig);
    s.noise_hz = stats_of(noi);
    s.qber_z = stats_of(qz);
    s.qber_x = stats_of(qx);
    if (!skr.empty()) s.skr_bps = stats_of(skr);
    return s;
}

RateObservation SessionSummary::mean_observation() const {
    RateObservation o;
    o.signal_hz = signal_hz.mean;
    o.noise_hz = noise_hz.mean;
    o.qber_z = qber_z.mean;
    o.qber_x = qber_x.mean;
    if (skr_bps) o.skr_bps = skr_bps->mean;
    return o;
}

}  // namespace skylink
