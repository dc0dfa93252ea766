#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "skylink/estimation.hpp"

namespace skylink {

namespace {

struct Header {
    double wavelength = 0.0;
    double d_rx = std::nan("");
};

Header parse_metadata(std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() != '#') throw ParseError("expected '# wavelength_m=... d_rx_m=...'", line_no);
    line.remove_prefix(1);
    Header h;
    bool have_wavelength = false;
    std::istringstream tokens{std::string(line)};
    std::string token;
    while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ParseError("malformed metadata token '" + token + "'", line_no);
        const std::string key = token.substr(0, eq);
        const std::string_view value = std::string_view(token).substr(eq + 1);
        if (key == "wavelength_m") {
            h.wavelength = csv::parse_double(value, line_no, "wavelength_m");
            have_wavelength = true;
        } else if (key == "d_rx_m") {
            h.d_rx = csv::parse_double(value, line_no, "d_rx_m");
        } else {
            throw ParseError("unknown metadata key '" + key + "'", line_no);
        }
    }
    if (!have_wavelength) throw ParseError("metadata lacks wavelength_m", line_no);
    if (!(h.wavelength > 0.0)) throw ParseError("wavelength_m must be > 0", line_no);
    return h;
}

int parse_columns(std::string_view line, std::size_t line_no) {
    const auto cols = csv::split(line);
    if (cols.size() < 3 || cols[0] != "t_s" || cols[1] != "valid")
        throw ParseError("expected column header 't_s,valid,b1,...,bJ'", line_no);
    for (std::size_t i = 2; i < cols.size(); ++i) {
        if (cols[i] != "b" + std::to_string(i - 1))
            throw ParseError("expected column 'b" + std::to_string(i - 1) + "', found '" + std::string(cols[i]) + "'",
                             line_no);
    }
    return static_cast<int>(cols.size() - 2);
}

}  // namespace

ZernikeSeries read_wfs_log(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    Header header;
    int modes = 0;
    bool have_meta = false;
    std::vector<double> times;
    std::vector<char> valid;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = csv::trim(line_no == 1 ? csv::strip_bom(line) : std::string_view(line));
        if (view.empty()) continue;
        if (!have_meta) {
            header = parse_metadata(view, line_no);
            have_meta = true;
            continue;
        }
        if (modes == 0) {
            modes = parse_columns(view, line_no);
            continue;
        }
        const auto fields = csv::split(view);
        if (fields.size() != static_cast<std::size_t>(modes) + 2)
            throw ParseError("expected " + std::to_string(modes + 2) + " fields, found " + std::to_string(fields.size()),
                             line_no);
        const double t = csv::parse_double(fields[0], line_no, "t_s");
        if (!times.empty() && !(t > times.back())) throw ParseError("timestamps must be strictly increasing", line_no);
        if (fields[1] != "0" && fields[1] != "1") throw ParseError("valid must be 0 or 1", line_no);
        times.push_back(t);
        valid.push_back(fields[1] == "1");
        for (int m = 0; m < modes; ++m)
            values.push_back(csv::parse_double(fields[m + 2], line_no, "coefficient"));
    }
    if (!have_meta) throw ParseError("WFS log is empty", 0);
    if (modes == 0) throw ParseError("WFS log lacks the column header", line_no);
    if (times.empty()) throw ParseError("WFS log has no samples", line_no);

    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(times.data(), n);
    Eigen::MatrixXd b = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), n, modes);
    MaskArray mask(n, modes);
    for (Eigen::Index i = 0; i < n; ++i) mask.row(i).setConstant(valid[static_cast<std::size_t>(i)] != 0);
    return ZernikeSeries(std::move(t), std::move(b), std::move(mask), header.wavelength, header.d_rx);
}

ZernikeSeries load_wfs_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open WFS log '" + path + "'");
    return read_wfs_log(in);
}

void write_wfs_log(std::ostream& out, const ZernikeSeries& series) {
    out << "# wavelength_m=" << csv::format(series.wavelength()) << " d_rx_m=" << csv::format(series.aperture_diameter())
        << '\n';
    out << "t_s,valid";
    for (int j = 1; j <= series.mode_count(); ++j) out << ",b" << j;
    out << '\n';
    const auto& b = series.coefficients();
    for (Eigen::Index i = 0; i < series.sample_count(); ++i) {
        out << csv::format(series.timestamps()(i)) << ',' << (series.sample_valid(i) ? '1' : '0');
        for (Eigen::Index m = 0; m < b.cols(); ++m) out << ',' << csv::format(b(i, m));
        out << '\n';
    }
}

void save_wfs_log(const std::string& path, const ZernikeSeries& series) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write WFS log '" + path + "'");
    write_wfs_log(out, series);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace skylink
