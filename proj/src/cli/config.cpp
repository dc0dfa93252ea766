#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "skylink/cli.hpp"
#include "skylink/atmosphere.hpp"
#include "skylink/core.hpp"

namespace skylink::cli {

namespace {

using nlohmann::json;

// One setter per accepted key; anything else in the section is an error.
using Setter = std::function<void(RunConfig&, const json&)>;
using Section = std::map<std::string, Setter>;

double number(const json& v) {
    if (!v.is_number()) throw ConfigError("expected a number");
    return v.get<double>();
}

std::int64_t integer(const json& v) {
    if (!v.is_number_integer()) throw ConfigError("expected an integer");
    return v.get<std::int64_t>();
}

std::string text(const json& v) {
    if (!v.is_string()) throw ConfigError("expected a string");
    return v.get<std::string>();
}

template <typename Member>
Setter num(Member member) {
    return [member](RunConfig& c, const json& v) { std::invoke(member, c) = number(v); };
}

const std::map<std::string, Section>& schema() {
    static const std::map<std::string, Section> s = {
        {"link",
         {{"wavelength_m", num(&RunConfig::wavelength_m)},
          {"length_m", num(&RunConfig::length_m)},
          {"w0_m", num(&RunConfig::w0_m)},
          {"absorption_db_per_km", num(&RunConfig::absorption_db_per_km)}}},
        {"receiver",
         {{"d_rx_m", [](RunConfig& c, const json& v) { c.receiver.d_rx = number(v); }},
          {"d_obs_m", [](RunConfig& c, const json& v) { c.receiver.d_obs = number(v); }},
          {"f_eff_m", [](RunConfig& c, const json& v) { c.receiver.f_eff = number(v); }},
          {"mfd_m", [](RunConfig& c, const json& v) { c.receiver.mfd = number(v); }},
          {"eta_tel_db", [](RunConfig& c, const json& v) { c.receiver.eta_tel = from_db(number(v)); }},
          {"eta_optics_db",
           [](RunConfig& c, const json& v) { c.receiver.eta_optics = from_db(number(v)); }},
          {"eta_fiber_db",
           [](RunConfig& c, const json& v) { c.receiver.eta_fiber = from_db(number(v)); }},
          {"ao_modes",
           [](RunConfig& c, const json& v) { c.receiver.ao_modes = static_cast<int>(integer(v)); }},
          {"f_3db_hz", [](RunConfig& c, const json& v) { c.receiver.f_3db = number(v); }}}},
        {"turbulence",
         {{"r0_m", num(&RunConfig::r0_m)},
          {"r0_wavelength_m", [](RunConfig& c, const json& v) { c.r0_wavelength_m = number(v); }},
          {"wind_m_s", num(&RunConfig::wind_m_s)},
          {"eta_phi_on_db", num(&RunConfig::eta_phi_on_db)}}},
        {"detector",
         {{"type", [](RunConfig& c, const json& v) { c.detector = text(v); }},
          {"efficiency", [](RunConfig& c, const json& v) { c.detector_efficiency = number(v); }},
          {"noise_hz", [](RunConfig& c, const json& v) { c.detector_noise_hz = number(v); }},
          {"window_s", [](RunConfig& c, const json& v) { c.detector_window_s = number(v); }}}},
        {"qkd",
         {{"pulse_rate_hz", [](RunConfig& c, const json& v) { c.protocol.pulse_rate_hz = number(v); }},
          {"mu_signal", [](RunConfig& c, const json& v) { c.protocol.mu_signal = number(v); }},
          {"mu_decoy", [](RunConfig& c, const json& v) { c.protocol.mu_decoy = number(v); }},
          {"p_signal", [](RunConfig& c, const json& v) { c.protocol.p_signal = number(v); }},
          {"p_z_alice", [](RunConfig& c, const json& v) { c.protocol.p_z_alice = number(v); }},
          {"p_z_bob", [](RunConfig& c, const json& v) { c.protocol.p_z_bob = number(v); }},
          {"ec_efficiency", [](RunConfig& c, const json& v) { c.protocol.ec_efficiency = number(v); }},
          {"eps_sec", [](RunConfig& c, const json& v) { c.protocol.eps_sec = number(v); }},
          {"eps_corr", [](RunConfig& c, const json& v) { c.protocol.eps_corr = number(v); }},
          {"block_size_bytes",
           [](RunConfig& c, const json& v) { c.block_size_bytes = integer(v); }},
          {"internal_loss_db", num(&RunConfig::internal_loss_db)},
          {"reference_rate_hz",
           [](RunConfig& c, const json& v) { c.reference_rate_hz = number(v); }},
          {"intrinsic_qber", num(&RunConfig::intrinsic_qber)},
          {"noise_convention", [](RunConfig& c, const json& v) {
               const std::string s = text(v);
               if (s == "raw") c.noise_convention = NoiseConvention::raw;
               else if (s == "windowed") c.noise_convention = NoiseConvention::windowed;
               else throw ConfigError("noise_convention must be 'raw' or 'windowed'");
           }}}},
    };
    return s;
}

}  // namespace

double RunConfig::r0_at_link_wavelength() const {
    return scale_r0(r0_m, r0_wavelength_m.value_or(wavelength_m), wavelength_m);
}

QkdSessionModel RunConfig::session(std::optional<std::string> detector_type) const {
    const std::string type = detector_type.value_or(detector);
    QkdSessionModel s;
    if (type == "snspd") s = QkdSessionModel::snspd_defaults();
    else if (type == "spad") s = QkdSessionModel::spad_defaults();
    else throw ConfigError("unknown detector type '" + type + "' (expected snspd or spad)");
    // Detector overrides describe the configured detector only.
    if (type == detector) {
        if (detector_efficiency) s.detector.efficiency = *detector_efficiency;
        if (detector_noise_hz) s.detector.noise_rate_hz = *detector_noise_hz;
        if (detector_window_s) s.detector.window_s = *detector_window_s;
    }
    s.protocol = protocol;
    if (block_size_bytes) s.block_size_bytes = *block_size_bytes;
    s.internal_loss = from_db(internal_loss_db);
    if (reference_rate_hz) s.reference_rate_hz = *reference_rate_hz;
    return s;
}

RunConfig parse_run_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig config;
    for (const auto& [section_name, section] : doc.items()) {
        const auto s = schema().find(section_name);
        if (s == schema().end()) throw ConfigError("unknown section '" + section_name + "'");
        if (!section.is_object()) throw ConfigError("section '" + section_name + "' must be an object");
        for (const auto& [key, value] : section.items()) {
            const auto setter = s->second.find(key);
            if (setter == s->second.end()) throw ConfigError("unknown key '" + section_name + "." + key + "'");
            try {
                setter->second(config, value);
            } catch (const ConfigError& e) {
                throw ConfigError(section_name + "." + key + ": " + e.what());
            }
        }
    }
    if (config.detector != "snspd" && config.detector != "spad")
        throw ConfigError("detector.type must be 'snspd' or 'spad'");
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string dump_run_config(const RunConfig& c) {
    json doc;
    doc["link"] = {{"wavelength_m", c.wavelength_m},
                   {"length_m", c.length_m},
                   {"w0_m", c.w0_m},
                   {"absorption_db_per_km", c.absorption_db_per_km}};
    doc["receiver"] = {{"d_rx_m", c.receiver.d_rx},
                       {"d_obs_m", c.receiver.d_obs},
                       {"f_eff_m", c.receiver.f_eff},
                       {"mfd_m", c.receiver.mfd},
                       {"eta_tel_db", to_db(c.receiver.eta_tel)},
                       {"eta_optics_db", to_db(c.receiver.eta_optics)},
                       {"eta_fiber_db", to_db(c.receiver.eta_fiber)},
                       {"ao_modes", c.receiver.ao_modes},
                       {"f_3db_hz", c.receiver.f_3db}};
    doc["turbulence"] = {{"r0_m", c.r0_m},
                         {"r0_wavelength_m", c.r0_wavelength_m.value_or(c.wavelength_m)},
                         {"wind_m_s", c.wind_m_s},
                         {"eta_phi_on_db", c.eta_phi_on_db}};
    const QkdSessionModel s = c.session();
    doc["detector"] = {{"type", c.detector},
                       {"efficiency", s.detector.efficiency},
                       {"noise_hz", s.detector.noise_rate_hz},
                       {"window_s", s.detector.window_s}};
    doc["qkd"] = {{"pulse_rate_hz", c.protocol.pulse_rate_hz},
                  {"mu_signal", c.protocol.mu_signal},
                  {"mu_decoy", c.protocol.mu_decoy},
                  {"p_signal", c.protocol.p_signal},
                  {"p_z_alice", c.protocol.p_z_alice},
                  {"p_z_bob", c.protocol.p_z_bob},
                  {"ec_efficiency", c.protocol.ec_efficiency},
                  {"eps_sec", c.protocol.eps_sec},
                  {"eps_corr", c.protocol.eps_corr},
                  {"block_size_bytes", s.block_size_bytes},
                  {"internal_loss_db", c.internal_loss_db},
                  {"reference_rate_hz", s.reference_rate_hz},
                  {"intrinsic_qber", c.intrinsic_qber},
                  {"noise_convention", c.noise_convention == NoiseConvention::raw ? "raw" : "windowed"}};
    return doc.dump(2);
}

}  // namespace skylink::cli
