#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "skylink/cli.hpp"
#include "skylink/estimation.hpp"
#include "skylink/linkbudget.hpp"
#include "skylink/synth.hpp"

namespace skylink::cli {

namespace {

using nlohmann::ordered_json;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string general(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (int j : v) s += (s.empty() ? "" : ",") + std::to_string(j);
    return s.empty() ? "-" : s;
}

// Human table on stdout next to a machine record at full precision.
class Report {
public:
    void section(const std::string& title) { lines_.push_back(lines_.empty() ? title : "\n" + title); }

    void db(const std::string& key, double ratio) {
        row(key, format_db(ratio));
        record_[key + "_db"] = to_db(ratio);
    }
    void value(const std::string& key, double v, const std::string& unit, const std::string& shown = {}) {
        row(key, (shown.empty() ? general(v) : shown) + (unit.empty() ? "" : " " + unit));
        record_[key] = v;
    }
    void text(const std::string& key, const std::string& v) {
        row(key, v);
        record_[key] = v;
    }
    void flag(const std::string& key, bool v) {
        row(key, v ? "yes" : "no");
        record_[key] = v;
    }
    void note(const std::string& line) { lines_.push_back("  " + line); }
    ordered_json& record() { return record_; }

    void print(std::ostream& out) const {
        for (const auto& l : lines_) out << l << '\n';
    }

private:
    void row(const std::string& key, const std::string& shown) {
        std::string padded = key;
        padded.resize(std::max<std::size_t>(key.size() + 1, 22), ' ');
        lines_.push_back("  " + padded + shown);
    }

    std::vector<std::string> lines_;
    ordered_json record_ = ordered_json::object();
};

std::string extension(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::string csv_cell(const ordered_json& v) {
    if (v.is_number()) return csv::format(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Scalar records become key,value rows; a "rows" array becomes a table.
void write_machine(const std::string& path, const ordered_json& record) {
    const std::string ext = extension(path);
    if (ext != ".json" && ext != ".csv") throw ConfigError("--out must end in .json or .csv: '" + path + "'");
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    if (ext == ".json") {
        f << record.dump(2) << '\n';
    } else if (record.contains("rows")) {
        const auto& rows = record["rows"];
        bool first = true;
        for (const auto& [k, v] : rows.front().items()) {
            f << (first ? "" : ",") << k;
            first = false;
        }
        f << '\n';
        for (const auto& r : rows) {
            first = true;
            for (const auto& [k, v] : r.items()) {
                f << (first ? "" : ",") << csv_cell(v);
                first = false;
            }
            f << '\n';
        }
    } else {
        f << "key,value\n";
        for (const auto& [k, v] : record.items()) f << k << ',' << csv_cell(v) << '\n';
    }
    if (!f) throw IoError("write failed for '" + path + "'");
}

/// "1-35", "4-35", "2,3,5-8"
std::vector<int> parse_modes(const std::string& text) {
    std::vector<int> modes;
    std::stringstream ss(text);
    std::string part;
    auto to_int = [&text](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad mode list '" + text + "'");
        }
    };
    while (std::getline(ss, part, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
            modes.push_back(to_int(part));
        } else {
            const int a = to_int(part.substr(0, dash));
            const int b = to_int(part.substr(dash + 1));
            if (a < 1 || b < a) throw ConfigError("bad mode range '" + part + "'");
            for (int j = a; j <= b; ++j) modes.push_back(j);
        }
    }
    if (modes.empty()) throw ConfigError("empty mode list");
    return modes;
}

OpticalPathd link_path(const RunConfig& c) { return OpticalPathd(c.wavelength_m, c.length_m); }

void add_breakdown(Report& rep, const SmfCouplingBreakdownd& b) {
    rep.db("eta0", b.eta0);
    rep.db("eta_S", b.eta_s);
    rep.db("eta_phi_ON", b.eta_phi_on);
    rep.db("eta_phi_J", b.eta_phi_residual);
    rep.db("eta_tau", b.eta_tau);
    rep.db("eta_AO", b.eta_ao);
    rep.db("eta_SMF", b.eta_smf);
}

FriedFit fit_from_log(const ZernikeSeries& series, const RunConfig& c, const std::string& modes,
                      std::optional<double> d_rx) {
    const double d = d_rx ? *d_rx
                          : (std::isnan(series.aperture_diameter()) ? c.receiver.d_rx : series.aperture_diameter());
    const std::vector<int> selected =
        modes.empty() ? mode_range(1, series.mode_count()) : parse_modes(modes);
    return fit_fried(empirical_variances(series), d, selected, series.wavelength());
}

// ---- budget ----------------------------------------------------------------

struct BudgetArgs {
    std::optional<double> r0, a_coeff, eta_smf_db, wind;
};

LinkModelInputs model_inputs(const RunConfig& c) {
    LinkModelInputs in;
    in.geometry = LinkGeometryd(link_path(c), c.w0_m, c.receiver);
    in.r0 = c.r0_at_link_wavelength();
    in.wind_speed = c.wind_m_s;
    in.absorption_db_per_km = c.absorption_db_per_km;
    in.eta_phi_on = from_db(c.eta_phi_on_db);
    return in;
}

Report cmd_budget(RunConfig c, const BudgetArgs& a) {
    if (a.r0) {
        c.r0_m = *a.r0;
        c.r0_wavelength_m.reset();
    }
    if (a.a_coeff) c.absorption_db_per_km = *a.a_coeff;
    if (a.wind) c.wind_m_s = *a.wind;
    LinkModelInputs in = model_inputs(c);
    if (a.eta_smf_db) in.eta_smf_override = from_db(*a.eta_smf_db);
    const LinkModelPoint p = evaluate_link_model(in);
    const BudgetReportd& b = p.budget;

    Report rep;
    rep.section("Link");
    rep.value("r0", in.r0, "m");
    rep.value("absorption", c.absorption_db_per_km, "dB/km");
    rep.value("rayleigh_range", in.geometry.rayleigh_range(), "m");
    rep.value("theta0", b.theta0, "rad");
    rep.value("theta_turb", b.theta_turb, "rad");
    rep.value("theta", b.theta, "rad");
    rep.value("W_L", b.w_l, "m", fixed(b.w_l, 3));
    rep.section("Coupling model");
    rep.value("beta", p.beta, "");
    rep.value("greenwood", p.greenwood, "Hz");
    rep.value("rytov_variance", p.scintillation.rytov_sigma_r2, "");
    rep.value("aperture_d", p.scintillation.aperture_d, "");
    add_breakdown(rep, p.smf);
    rep.section("Channel");
    rep.db("eta_A", b.eta_a);
    rep.db("eta_Coll", b.eta_coll);
    rep.db("eta_Focus", b.eta_focus);
    rep.db("eta_Optics", b.eta_optics);
    if (a.eta_smf_db) {
        rep.record()["eta_SMF_used_db"] = to_db(b.eta_smf);
        rep.note("eta_SMF (given)       " + format_db(b.eta_smf));
    } else {
        rep.note("eta_SMF (model)       " + format_db(b.eta_smf));
    }
    rep.db("eta_Fiber", b.eta_fiber);
    rep.db("eta_Ch", b.eta_ch);
    return rep;
}

// ---- fit-r0 ----------------------------------------------------------------

struct FitArgs {
    std::string wfs;
    std::string modes;
    std::optional<double> d_rx;
};

Report cmd_fit(const RunConfig& c, const FitArgs& a, std::ostream& err) {
    const ZernikeSeries series = load_wfs_log(a.wfs);
    const FriedFit fit = fit_from_log(series, c, a.modes, a.d_rx);
    Report rep;
    rep.section("Fried parameter fit");
    rep.value("samples", static_cast<double>(series.sample_count()), "");
    rep.value("wavelength", fit.wavelength, "m");
    rep.value("r0_hat", fit.r0_hat, "m", fixed(fit.r0_hat, 4));
    rep.value("r0_uncertainty", fit.r0_uncertainty, "m", fixed(fit.r0_uncertainty, 4));
    rep.value("r0_at_link", scale_r0(fit.r0_hat, fit.wavelength, c.wavelength_m), "m");
    rep.value("exponent_check", fit.fit_exponent_check, "");
    rep.value("residual_rms", fit.residual_rms, "");
    rep.text("modes_used", join(fit.modes_used));
    rep.text("modes_excluded", join(fit.modes_excluded));
    const bool ok = fit.kolmogorov_consistent();
    rep.flag("kolmogorov_consistent", ok);
    if (!ok)
        err << "warning: residual rms " << general(fit.residual_rms) << " exceeds " << kKolmogorovResidualLimit
            << "; the variances do not follow a Kolmogorov spectrum (closed-loop data?)\n";
    return rep;
}

// ---- predict-smf -----------------------------------------------------------

struct PredictArgs {
    std::string ao_on;
    std::string ao_off;
    std::optional<double> r0;
    std::optional<double> wind;
    std::string modes;
    std::optional<double> p_in, p_focus, eta_focus_fiber_db;
};

Report cmd_predict(const RunConfig& c, const PredictArgs& a) {
    const ZernikeSeries on = load_wfs_log(a.ao_on);
    FriedFit fit;
    if (!a.ao_off.empty()) {
        fit = fit_from_log(load_wfs_log(a.ao_off), c, a.modes, std::nullopt);
    } else {
        fit.r0_hat = *a.r0;
        fit.wavelength = c.wavelength_m;
    }
    const SmfPrediction p = predict_eta_smf(on, fit, a.wind.value_or(c.wind_m_s), c.receiver, link_path(c));

    Report rep;
    rep.section("Predicted SMF coupling");
    rep.value("r0", p.r0, "m", fixed(p.r0, 4));
    rep.value("greenwood", p.greenwood, "Hz");
    rep.value("beta", p.beta, "");
    add_breakdown(rep, p.breakdown);
    if (a.p_in || a.p_focus) {
        if (!a.p_in || !a.p_focus) throw ConfigError("--p-in and --p-focus go together");
        const double eta_ff = a.eta_focus_fiber_db ? from_db(*a.eta_focus_fiber_db) : c.receiver.eta_optics;
        const PowerCoupling m = coupling_from_power(*a.p_in, *a.p_focus, eta_ff);
        rep.section("Measured");
        rep.db("eta_SMF_measured", m.eta_smf);
        rep.value("gap_db", to_db(p.breakdown.eta_smf) - to_db(m.eta_smf), "dB", fixed(to_db(p.breakdown.eta_smf) - to_db(m.eta_smf), 1));
        rep.flag("power_consistent", m.consistent);
    }
    return rep;
}

// ---- qkd -------------------------------------------------------------------

struct QkdArgs {
    std::string log;
    std::optional<double> eta_ch_db, signal_hz, noise_hz, qber_z, qber_x;
    std::optional<std::string> detector;
};

void add_stats(Report& rep, const std::string& key, const FieldStats& s) {
    rep.value(key + "_mean", s.mean, "", general(s.mean) + " (min " + general(s.min) + ", max " + general(s.max) +
                                             ", sd " + general(s.stddev) + ")");
    rep.record()[key + "_min"] = s.min;
    rep.record()[key + "_max"] = s.max;
    rep.record()[key + "_stddev"] = s.stddev;
}

Report cmd_qkd(const RunConfig& c, const QkdArgs& a) {
    const int sources = int(!a.log.empty()) + int(a.eta_ch_db.has_value()) + int(a.signal_hz.has_value());
    if (sources != 1) throw ConfigError("give exactly one of a session log, --eta-ch or --signal-hz");
    const QkdSessionModel s = c.session(a.detector);
    s.validate();
    const double nw = c.noise_convention == NoiseConvention::raw
                          ? windowed_noise_rate(a.noise_hz.value_or(s.detector.noise_rate_hz), s.detector.window_s,
                                                s.protocol.pulse_rate_hz)
                          : a.noise_hz.value_or(s.detector.noise_rate_hz);

    Report rep;
    rep.section("Protocol (" + s.detector.label + ")");
    rep.value("detector_efficiency", s.detector.efficiency, "");
    rep.value("window", s.detector.window_s, "s");
    rep.value("reference_rate", s.reference_rate_hz, "Hz");
    rep.value("internal_loss_db", to_db(s.internal_loss), "dB", fixed(to_db(s.internal_loss), 1));
    rep.value("pulse_rate", s.protocol.pulse_rate_hz, "Hz");
    rep.value("mu_signal", s.protocol.mu_signal, "");
    rep.value("mu_decoy", s.protocol.mu_decoy, "");
    rep.value("p_signal", s.protocol.p_signal, "");
    rep.value("p_z_alice", s.protocol.p_z_alice, "");
    rep.value("p_z_bob", s.protocol.p_z_bob, "");
    rep.value("ec_efficiency", s.protocol.ec_efficiency, "");
    rep.value("eps_sec", s.protocol.eps_sec, "");
    rep.value("eps_corr", s.protocol.eps_corr, "");
    rep.value("block_bits", s.block_size_bits(), "");
    rep.text("noise_convention", c.noise_convention == NoiseConvention::raw ? "raw" : "windowed");
    rep.section("Rates");
    RateObservation obs;
    if (!a.log.empty()) {
        const auto records = load_session_log(a.log);
        const SessionSummary sum = analyze_session_log(records);
        rep.value("records", static_cast<double>(sum.records), "");
        add_stats(rep, "signal_hz", sum.signal_hz);
        add_stats(rep, "noise_hz", sum.noise_hz);
        add_stats(rep, "qber_z", sum.qber_z);
        add_stats(rep, "qber_x", sum.qber_x);
        if (sum.skr_bps) add_stats(rep, "logged_skr_bps", *sum.skr_bps);
        obs = sum.mean_observation();
    } else {
        obs.signal_hz = a.signal_hz ? *a.signal_hz : expected_signal_rate(s, from_db(*a.eta_ch_db));
        obs.noise_hz = a.noise_hz.value_or(s.detector.noise_rate_hz);
        const double q = expected_qber(obs.signal_hz, nw, c.intrinsic_qber);
        obs.qber_z = a.qber_z.value_or(q);
        obs.qber_x = a.qber_x.value_or(q);
    }
    obs.validate();
    const ChannelEstimate ch = channel_efficiency_from_rate(s, obs.signal_hz);
    rep.value("signal_hz", obs.signal_hz, "Hz");
    rep.value("noise_hz", obs.noise_hz, "Hz");
    rep.value("qber_z", obs.qber_z, "", fixed(100.0 * obs.qber_z, 2) + " %");
    rep.value("qber_x", obs.qber_x, "", fixed(100.0 * obs.qber_x, 2) + " %");
    rep.record()["eta_Ch_db"] = to_db(ch.eta_ch);
    rep.note("eta_Ch (inferred)     " + format_db(ch.eta_ch) + (ch.exceeds_unity ? "  [above unity]" : ""));
    const SkrResult skr = secret_key_rate(s, obs, c.noise_convention);
    rep.value("skr", skr.skr_bps, "bit/s", fixed(skr.skr_bps, 0));
    rep.value("block_time", skr.block_time_s, "s");
    rep.value("secret_bits_per_block", skr.secret_bits, "");
    rep.value("single_photon_lower", skr.single_lower, "");
    rep.value("phase_error_upper", skr.phase_error_upper, "");
    rep.flag("clamped", skr.clamped);
    if (!skr.diagnostic.empty()) rep.text("diagnostic", skr.diagnostic);
    return rep;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string variable = "r0";
    std::optional<double> from, to;
    int steps = 50;
};

Report cmd_sweep(const RunConfig& base, const SweepArgs& a) {
    if (a.steps < 1) throw ConfigError("--steps must be >= 1");
    const bool r0 = a.variable == "r0";
    if (!r0 && !a.from) throw ConfigError("--from is required when sweeping " + a.variable);
    const double from = a.from.value_or(0.03);
    if (a.steps > 1 && !a.to && !r0) throw ConfigError("--to is required with --steps > 1");
    const double to = a.to.value_or(0.15);
    Report rep;
    ordered_json rows = ordered_json::array();
    std::ostringstream table;
    char line[256];
    std::snprintf(line, sizeof line, "%10s %7s %7s %7s %7s %7s %7s %7s %7s %7s %7s %7s", a.variable.c_str(), "eta0",
                  "eta_S", "phi_ON", "phi_J", "tau", "SMF", "A", "Coll", "Focus", "Ch", "W_L");
    table << line << '\n';
    for (int i = 0; i < a.steps; ++i) {
        const double x = a.steps == 1 ? from : from + (to - from) * i / (a.steps - 1);
        RunConfig c = base;
        double shown = x;
        if (a.variable == "r0") {
            c.r0_m = x;
            c.r0_wavelength_m.reset();
        } else if (a.variable == "wind") {
            c.wind_m_s = x;
        } else if (a.variable == "a_coeff") {
            c.absorption_db_per_km = x;
        } else if (a.variable == "J") {
            c.receiver.ao_modes = static_cast<int>(std::lround(x));
            shown = c.receiver.ao_modes;
        } else {
            throw ConfigError("unknown sweep variable '" + a.variable + "'");
        }
        const LinkModelPoint p = evaluate_link_model(model_inputs(c));
        const auto& s = p.smf;
        const auto& b = p.budget;
        ordered_json r;
        r[a.variable] = shown;
        r["eta0_db"] = to_db(s.eta0);
        r["eta_s_db"] = to_db(s.eta_s);
        r["eta_phi_on_db"] = to_db(s.eta_phi_on);
        r["eta_phi_j_db"] = to_db(s.eta_phi_residual);
        r["eta_tau_db"] = to_db(s.eta_tau);
        r["eta_smf_db"] = to_db(s.eta_smf);
        r["eta_a_db"] = to_db(b.eta_a);
        r["eta_coll_db"] = to_db(b.eta_coll);
        r["eta_focus_db"] = to_db(b.eta_focus);
        r["eta_optics_db"] = to_db(b.eta_optics);
        r["eta_fiber_db"] = to_db(b.eta_fiber);
        r["eta_ch_db"] = to_db(b.eta_ch);
        r["w_l_m"] = b.w_l;
        r["greenwood_hz"] = p.greenwood;
        rows.push_back(r);
        std::snprintf(line, sizeof line, "%10.4g %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %+7.1f %7.3f",
                      shown, to_db(s.eta0), to_db(s.eta_s), to_db(s.eta_phi_on), to_db(s.eta_phi_residual),
                      to_db(s.eta_tau), to_db(s.eta_smf), to_db(b.eta_a), to_db(b.eta_coll), to_db(b.eta_focus),
                      to_db(b.eta_ch), b.w_l);
        table << line << '\n';
    }
    rep.section("Sweep over " + a.variable + " (dB; W_L in m)");
    std::string l;
    std::istringstream t(table.str());
    while (std::getline(t, l)) rep.note(l);
    rep.record()["variable"] = a.variable;
    rep.record()["rows"] = rows;
    return rep;
}

// ---- synth -----------------------------------------------------------------

Report cmd_synth(const SynthConfig& cfg, const std::string& out_path) {
    if (out_path.empty()) throw ConfigError("synth needs --out <file.csv>");
    const ZernikeSeries series = generate_series(cfg);
    save_wfs_log(out_path, series);
    Report rep;
    rep.section("Synthetic WFS log");
    rep.text("file", out_path);
    rep.value("samples", static_cast<double>(series.sample_count()), "");
    rep.value("modes", static_cast<double>(series.mode_count()), "");
    rep.value("r0", cfg.r0, "m");
    rep.value("greenwood", synth_greenwood(cfg), "Hz");
    rep.value("lag_one_correlation", lag_one_correlation(cfg), "");
    rep.value("target_var_j2", target_variance(cfg, 2), "rad^2");
    rep.value("target_var_jmax", target_variance(cfg, cfg.j_max), "rad^2");
    return rep;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free-space QKD link budget, AO coupling and key-rate tools", "skylink"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration (default: $SKYLINK_CONFIG)");
    app.add_option("-o,--out", out_path, "Machine-readable output (.json or .csv)");
    app.add_flag("-v,--verbose", verbose, "Print the resolved configuration to stderr");

    BudgetArgs ba;
    auto* budget = app.add_subcommand("budget", "Channel efficiency budget at one operating point");
    budget->add_option("--r0", ba.r0, "Fried parameter at the link wavelength [m]");
    budget->add_option("--a-coeff", ba.a_coeff, "Absorption coefficient [dB/km]");
    budget->add_option("--eta-smf", ba.eta_smf_db, "Use this SMF coupling [dB] instead of the model");
    budget->add_option("--wind", ba.wind, "Wind speed [m/s]");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit-r0", "Fit r0 to the mode variances of a WFS log");
    fit->add_option("wfs", fa.wfs, "WFS log (CSV)")->required();
    fit->add_option("--modes", fa.modes, "Modes to fit, e.g. 4-35 (default: all)");
    fit->add_option("--d-rx", fa.d_rx, "Aperture diameter [m] (default: log header)");

    PredictArgs pa;
    auto* predict = app.add_subcommand("predict-smf", "Expected closed-loop SMF coupling");
    predict->add_option("--ao-on", pa.ao_on, "Closed-loop WFS log")->required();
    auto* off_opt = predict->add_option("--ao-off", pa.ao_off, "Open-loop WFS log used to fit r0");
    auto* r0_opt = predict->add_option("--r0", pa.r0, "Fried parameter at the link wavelength [m]");
    off_opt->excludes(r0_opt);
    predict->add_option("--wind", pa.wind, "Wind speed [m/s]");
    predict->add_option("--modes", pa.modes, "Modes for the r0 fit");
    predict->add_option("--p-in", pa.p_in, "Power after the fiber [W]");
    predict->add_option("--p-focus", pa.p_focus, "Power at the primary focus [W]");
    predict->add_option("--eta-focus-fiber", pa.eta_focus_fiber_db,
                        "Efficiency from primary focus to fiber front [dB] (default: optics)");

    QkdArgs qa;
    auto* qkd = app.add_subcommand("qkd", "Detection rates, channel efficiency and secret key rate");
    qkd->add_option("log", qa.log, "Session log (CSV)");
    qkd->add_option("--eta-ch", qa.eta_ch_db, "Channel efficiency [dB]");
    qkd->add_option("--signal-hz", qa.signal_hz, "Detected signal rate [Hz]");
    qkd->add_option("--noise-hz", qa.noise_hz, "Noise count rate [Hz]");
    qkd->add_option("--qber-z", qa.qber_z, "Z-basis QBER");
    qkd->add_option("--qber-x", qa.qber_x, "X-basis QBER");
    qkd->add_option("--detector", qa.detector, "snspd or spad")->check(CLI::IsMember({"snspd", "spad"}));

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Efficiency terms over a parameter range");
    sweep->add_option("--variable", sa.variable, "r0 (default), wind, a_coeff or J")
        ->check(CLI::IsMember({"r0", "wind", "a_coeff", "J"}));
    sweep->add_option("--from", sa.from, "First value (r0 default: 0.03 m)");
    sweep->add_option("--to", sa.to, "Last value (r0 default: 0.15 m)");
    sweep->add_option("--steps", sa.steps, "Number of points (default: 50)");

    SynthConfig sc;
    std::optional<double> synth_d_rx, synth_wavelength;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic WFS log");
    synth->add_option("--r0", sc.r0, "Fried parameter at the log wavelength [m]");
    synth->add_option("--d-rx", synth_d_rx, "Aperture diameter [m]");
    synth->add_option("--j-max", sc.j_max, "Highest Noll mode");
    synth->add_option("--samples", sc.n_samples, "Number of samples");
    synth->add_option("--rate", sc.sample_rate_hz, "Sample rate [Hz]");
    synth->add_option("--wind", sc.wind_m_s, "Wind speed [m/s]; 0 gives white samples");
    synth->add_flag("--ao-on", sc.ao_on, "Apply the closed-loop rejection factor");
    synth->add_option("--f3db", sc.f_3db_hz, "AO rejection bandwidth [Hz]");
    synth->add_option("--corrected-modes", sc.corrected_modes, "Modes attenuated by the AO (0: all)");
    synth->add_option("--sensor-noise", sc.sensor_noise_rad2, "White sensor noise per mode [rad^2]");
    synth->add_option("--wavelength", synth_wavelength, "Wavelength [m]");
    synth->add_option("--seed", sc.seed, "Random seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (config_path.empty()) {
            if (const char* env = std::getenv("SKYLINK_CONFIG"); env && *env) config_path = env;
        }
        const RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (verbose) err << dump_run_config(config) << '\n';

        Report rep;
        if (*budget) {
            rep = cmd_budget(config, ba);
        } else if (*fit) {
            rep = cmd_fit(config, fa, err);
        } else if (*predict) {
            if (pa.ao_off.empty() && !pa.r0) throw ConfigError("predict-smf needs --ao-off or --r0");
            rep = cmd_predict(config, pa);
        } else if (*qkd) {
            rep = cmd_qkd(config, qa);
        } else if (*sweep) {
            rep = cmd_sweep(config, sa);
        } else if (*synth) {
            sc.d_rx = synth_d_rx.value_or(config.receiver.d_rx);
            sc.wavelength_m = synth_wavelength.value_or(config.wavelength_m);
            rep = cmd_synth(sc, out_path);
            rep.print(out);
            return kOk;
        }
        rep.print(out);
        if (!out_path.empty()) write_machine(out_path, rep.record());
        return kOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
}

}  // namespace skylink::cli
