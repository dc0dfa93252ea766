#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "skylink/qkd.hpp"

namespace skylink {

namespace {
constexpr std::string_view kHeader = "t_s,signal_hz,noise_hz,qber_z,qber_x,skr_bps";
}

std::vector<RateObservation> read_session_log(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<RateObservation> out;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = csv::trim(line_no == 1 ? csv::strip_bom(line) : std::string_view(line));
        if (view.empty()) continue;
        if (!have_header) {
            if (view != kHeader) throw ParseError("expected header '" + std::string(kHeader) + "'", line_no);
            have_header = true;
            continue;
        }
        const auto fields = csv::split(view);
        if (fields.size() != 6) throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), line_no);
        RateObservation r;
        r.t_s = csv::parse_double(fields[0], line_no, "t_s");
        r.signal_hz = csv::parse_double(fields[1], line_no, "signal_hz");
        r.noise_hz = csv::parse_double(fields[2], line_no, "noise_hz");
        r.qber_z = csv::parse_double(fields[3], line_no, "qber_z");
        r.qber_x = csv::parse_double(fields[4], line_no, "qber_x");
        if (!fields[5].empty()) r.skr_bps = csv::parse_double(fields[5], line_no, "skr_bps");
        try {
            r.validate();
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no);
        }
        out.push_back(r);
    }
    if (!have_header) throw ParseError("session log is empty", 0);
    return out;
}

std::vector<RateObservation> load_session_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open session log '" + path + "'");
    return read_session_log(in);
}

void write_session_log(std::ostream& out, std::span<const RateObservation> records) {
    out << kHeader << '\n';
    for (const auto& r : records) {
        out << csv::format(r.t_s) << ',' << csv::format(r.signal_hz) << ',' << csv::format(r.noise_hz) << ','
            << csv::format(r.qber_z) << ',' << csv::format(r.qber_x) << ',';
        if (r.skr_bps) out << csv::format(*r.skr_bps);
        out << '\n';
    }
}

}  // namespace skylink
