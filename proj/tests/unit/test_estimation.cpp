#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "skylink/estimation.hpp"
#include "skylink/synth.hpp"

using namespace skylink;

namespace {

const OpticalPathd design(1.555e-6, 18e3);

ModeVarianceSet kolmogorov(double d, double r0, int modes) {
    Eigen::VectorXd v(modes);
    for (int j = 1; j <= modes; ++j) v(j - 1) = turbulence_variance(j, d, r0);
    return ModeVarianceSet::exact(v);
}

ZernikeSeries load(const std::string& name) { return load_wfs_log(std::string(SKYLINK_FIXTURES "/") + name); }

struct PowerReading {
    double p_in, p_focus, eta_focus_to_fiber_db;
};

PowerReading power_fixture() {
    std::ifstream in(SKYLINK_FIXTURES "/april2_power.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::replace(row.begin(), row.end(), ',', ' ');
    PowerReading p{};
    std::istringstream(row) >> p.p_in >> p.p_focus >> p.eta_focus_to_fiber_db;
    return p;
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("WFS log reading") {
    const ZernikeSeries s = load("wfs_three.csv");
    CHECK(s.sample_count() == 3);
    CHECK(s.mode_count() == 4);
    CHECK(s.wavelength() == 1.55532e-6);
    CHECK(s.aperture_diameter() == 0.41);
    CHECK(s.sample_valid(0));
    CHECK_FALSE(s.sample_valid(1));
    CHECK(s.coefficients()(2, 3) == -2.5e-7);
    const ModeVarianceSet v = empirical_variances(s);
    CHECK(v.sample_count(1) == 2);
    CHECK(*v.variance(1) == doctest::Approx(0.5 * 0.375 * 0.375));
}

TEST_CASE("WFS log round trip is bit-identical") {
    std::ifstream original(SKYLINK_FIXTURES "/wfs_three.csv");
    std::stringstream text;
    text << original.rdbuf();
    const ZernikeSeries s = read_wfs_log(text);
    std::stringstream written;
    write_wfs_log(written, s);
    CHECK(written.str() == text.str());

    const ZernikeSeries synthetic = generate_series(SynthConfig{.j_max = 5, .n_samples = 40, .seed = 9});
    std::stringstream io;
    write_wfs_log(io, synthetic);
    const ZernikeSeries back = read_wfs_log(io);
    CHECK((back.coefficients().array() == synthetic.coefficients().array()).all());
    CHECK((back.timestamps().array() == synthetic.timestamps().array()).all());
    CHECK(back.wavelength() == synthetic.wavelength());
    CHECK(back.aperture_diameter() == synthetic.aperture_diameter());
}

TEST_CASE("WFS log errors") {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_wfs_log(in);
    };
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("\n\n"), ParseError);
    CHECK_THROWS_AS(parse("t_s,valid,b1\n0,1,0.1\n"), ParseError);
    CHECK_THROWS_AS(parse("# d_rx_m=0.41\nt_s,valid,b1\n0,1,0.1\n"), ParseError);
    CHECK_THROWS_AS(parse("# wavelength_m=1.5e-6 colour=red\nt_s,valid,b1\n0,1,0.1\n"), ParseError);
    CHECK_THROWS_AS(parse("# wavelength_m=1.5e-6\nt_s,valid,b2\n0,1,0.1\n"), ParseError);
    CHECK_THROWS_AS(parse("# wavelength_m=1.5e-6\nt_s,valid,b1\n"), ParseError);
    CHECK_THROWS_AS(parse("# wavelength_m=1.5e-6\nt_s,valid,b1\n0,2,0.1\n"), ParseError);
    CHECK_THROWS_AS(parse("# wavelength_m=1.5e-6\nt_s,valid,b1\n0,1,x\n"), ParseError);
    try {
        parse("# wavelength_m=1.5e-6\nt_s,valid,b1\n0,1,0.1\n1,1,0.2\n1,1,0.3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
    try {
        parse("# wavelength_m=1.5e-6\nt_s,valid,b1,b2\n0,1,0.1,0.2\n1,1,0.2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(load("missing.csv"), IoError);
    const ZernikeSeries no_aperture = parse("# wavelength_m=1.5e-6\nt_s,valid,b1\n0,1,0.1\n1,1,0.2\n");
    CHECK(std::isnan(no_aperture.aperture_diameter()));
}

TEST_CASE("mode ranges") {
    CHECK(mode_range(4, 6) == std::vector<int>{4, 5, 6});
    CHECK_THROWS_AS(mode_range(0, 3), DomainError);
    CHECK_THROWS_AS(mode_range(5, 3), DomainError);
}

TEST_CASE("noiseless variances recover r0 exactly") {
    const auto fit = fit_fried(kolmogorov(0.41, 0.08, 35), 0.41, mode_range(1, 35), 1.555e-6);
    CHECK(std::abs(fit.r0_hat - 0.08) / 0.08 < 1e-10);
    CHECK(fit.fit_exponent_check == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.residual_rms < 1e-12);
    CHECK(fit.r0_uncertainty < 1e-12);
    CHECK(fit.modes_used.size() == 35);
    CHECK(fit.modes_excluded.empty());
    CHECK(fit.kolmogorov_consistent());
    CHECK(fit.wavelength == 1.555e-6);
}

TEST_CASE("dropping any single mode leaves the noiseless fit unchanged") {
    const auto set = kolmogorov(0.41, 0.0875, 35);
    const double all = fit_fried(set, 0.41, mode_range(1, 35), 1.555e-6).r0_hat;
    for (int skip = 1; skip <= 35; ++skip) {
        std::vector<int> modes;
        for (int j = 1; j <= 35; ++j)
            if (j != skip) modes.push_back(j);
        CHECK(std::abs(fit_fried(set, 0.41, modes, 1.555e-6).r0_hat - all) / all < 1e-13);
    }
}

TEST_CASE("fit is scale-consistent and order-independent") {
    std::mt19937_64 g(5);
    std::lognormal_distribution<double> noise(0.0, 0.2);
    for (int trial = 0; trial < 50; ++trial) {
        const double r0 = oracle::uniform(0.03, 0.2);
        Eigen::VectorXd v(35);
        for (int j = 1; j <= 35; ++j) v(j - 1) = turbulence_variance(j, 0.41, r0) * noise(g);
        const auto base = fit_fried(ModeVarianceSet::exact(v), 0.41, mode_range(1, 35), 1.555e-6);

        const double c = oracle::uniform(0.2, 5.0);
        const Eigen::VectorXd scaled = v * std::pow(c, 5.0 / 3.0);
        const auto s = fit_fried(ModeVarianceSet::exact(scaled), 0.41, mode_range(1, 35), 1.555e-6);
        CHECK(s.r0_hat == doctest::Approx(base.r0_hat / c).epsilon(1e-12));

        std::vector<int> shuffled = mode_range(1, 35);
        std::shuffle(shuffled.begin(), shuffled.end(), g);
        shuffled.push_back(shuffled.front());
        const auto p = fit_fried(ModeVarianceSet::exact(v), 0.41, shuffled, 1.555e-6);
        CHECK(p.r0_hat == base.r0_hat);
        CHECK(p.residual_rms == base.residual_rms);
        CHECK(p.r0_uncertainty == base.r0_uncertainty);
    }
}

TEST_CASE("fit mode handling") {
    Eigen::VectorXd v(6);
    for (int j = 1; j <= 6; ++j) v(j - 1) = turbulence_variance(j, 0.41, 0.1);
    v(2) = 0.0;
    Eigen::VectorXi counts = Eigen::VectorXi::Constant(6, 100);
    counts(4) = 1;
    const ModeVarianceSet set(v, counts);
    const auto fit = fit_fried(set, 0.41, std::vector<int>{1, 2, 3, 4, 5, 6, 9}, 1.555e-6);
    CHECK(fit.modes_used == std::vector<int>{1, 2, 4, 6});
    CHECK(fit.modes_excluded == std::vector<int>{3, 5, 9});
    CHECK(fit.r0_hat == doctest::Approx(0.1).epsilon(1e-12));

    const auto one_order = fit_fried(kolmogorov(0.41, 0.1, 6), 0.41, std::vector<int>{3, 4, 5}, 1.555e-6);
    CHECK(std::isnan(one_order.fit_exponent_check));
    CHECK_THROWS_AS(fit_fried(set, 0.41, std::vector<int>{1, 2}, 1.555e-6), DomainError);
    CHECK_THROWS_AS(fit_fried(set, 0.0, mode_range(1, 6), 1.555e-6), DomainError);
}

TEST_CASE("seeded synthetic series recovers r0 within 5%") {
    SynthConfig cfg;
    cfg.r0 = 0.05;
    cfg.j_max = 35;
    cfg.n_samples = 10000;
    const ZernikeSeries s = generate_series(cfg);
    const auto fit = fit_fried(empirical_variances(s), cfg.d_rx, mode_range(1, 35), s.wavelength());
    CHECK(std::abs(fit.r0_hat - 0.05) / 0.05 < 0.05);
    CHECK(fit.kolmogorov_consistent());
}

TEST_CASE("closed-loop variances are flagged as non-Kolmogorov") {
    const ZernikeSeries off = load("april2_ao_off.csv");
    const ZernikeSeries on = load("april2_ao_on.csv");
    const auto f_off = fit_fried(empirical_variances(off), 0.41, mode_range(1, 35), off.wavelength());
    const auto f_on = fit_fried(empirical_variances(on), 0.41, mode_range(1, 35), on.wavelength());
    CHECK(f_off.kolmogorov_consistent());
    CHECK_FALSE(f_on.kolmogorov_consistent());
    CHECK(f_on.residual_rms > 10.0 * f_off.residual_rms);
}

TEST_CASE("April 2 prediction") {
    const ZernikeSeries off = load("april2_ao_off.csv");
    const ZernikeSeries on = load("april2_ao_on.csv");
    const auto fit = fit_fried(empirical_variances(off), 0.41, mode_range(1, 35), off.wavelength());
    const ReceiverChaind rx;
    const auto p = predict_eta_smf(on, fit, 0.556, rx, design);
    CHECK(std::abs(to_db(p.breakdown.eta_smf) + 7.2) <= 0.1);
    CHECK(to_db(p.breakdown.eta_phi_on) == doctest::Approx(-2.8).epsilon(0.1 / 2.8));
    CHECK(to_db(p.breakdown.eta_phi_residual) == doctest::Approx(-0.7).epsilon(0.1 / 0.7));
    const auto& b = p.breakdown;
    CHECK(b.eta_smf == (b.eta0 * b.eta_s) * ((b.eta_phi_on * b.eta_phi_residual) * b.eta_tau));

    const PowerReading power = power_fixture();
    const auto measured = coupling_from_power(power.p_in, power.p_focus, from_db(power.eta_focus_to_fiber_db));
    CHECK(to_db(measured.eta_smf) == doctest::Approx(-9.2).epsilon(1e-9));
    CHECK(std::abs(to_db(p.breakdown.eta_smf) - to_db(measured.eta_smf) - 2.0) <= 0.1);
}

TEST_CASE("turbulence-free prediction reduces to eta0") {
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(10, 0.0, 9.0);
    const ZernikeSeries flat(t, Eigen::MatrixXd::Zero(10, 35), 1.555e-6);
    FriedFit fit;
    fit.r0_hat = 1e6;
    fit.wavelength = 1.555e-6;
    const ReceiverChaind rx;
    const auto p = predict_eta_smf(flat, fit, 0.0, rx, design);
    const double expected = eta0(mode_match_beta(rx, 1.555e-6), obscuration_ratio(rx));
    CHECK(p.breakdown.eta_smf == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("AO-ON log at another wavelength is rescaled") {
    const ZernikeSeries on = load("april2_ao_on.csv");
    const ZernikeSeries beacon = on.rescaled_to(1.54532e-6);
    FriedFit fit;
    fit.r0_hat = 0.0928;
    fit.wavelength = 1.555e-6;
    const ReceiverChaind rx;
    const auto a = predict_eta_smf(on, fit, 0.556, rx, design);
    const auto b = predict_eta_smf(beacon, fit, 0.556, rx, design);
    CHECK(b.breakdown.eta_phi_on == doctest::Approx(a.breakdown.eta_phi_on).epsilon(1e-12));

    FriedFit at_beacon = fit;
    at_beacon.r0_hat = scale_r0(0.0928, 1.555e-6, 1.54532e-6);
    at_beacon.wavelength = 1.54532e-6;
    const auto c = predict_eta_smf(on, at_beacon, 0.556, rx, design);
    CHECK(c.r0 == doctest::Approx(0.0928).epsilon(1e-14));
}

TEST_CASE("synthetic closed loop round trip") {
    SynthConfig off_cfg;
    off_cfg.r0 = 0.08;
    off_cfg.wind_m_s = 1.0;
    off_cfg.sample_rate_hz = 200.0;
    off_cfg.n_samples = 20000;
    off_cfg.seed = 77;
    SynthConfig on_cfg = off_cfg;
    on_cfg.ao_on = true;
    on_cfg.seed = 78;
    const ZernikeSeries off = generate_series(off_cfg);
    const ZernikeSeries on = generate_series(on_cfg);
    const auto fit = fit_fried(empirical_variances(off), off_cfg.d_rx, mode_range(1, 35), off.wavelength());
    const ReceiverChaind rx;
    const auto p = predict_eta_smf(on, fit, off_cfg.wind_m_s, rx, design);

    Eigen::VectorXd target(35);
    for (int j = 1; j <= 35; ++j) target(j - 1) = target_variance(on_cfg, j);
    const double fg = greenwood_frequency(off_cfg.wind_m_s, off_cfg.r0);
    const auto truth = compose_smf(eta0(mode_match_beta(rx, 1.555e-6), obscuration_ratio(rx)),
                                   scintillation_report(TurbulenceStated::from_r0(0.08, design), design, 0.41).eta_s,
                                   eta_phi_on(target), eta_phi_residual(35, 0.41, 0.08), eta_tau(fg, rx.f_3db));
    CHECK(std::abs(to_db(p.breakdown.eta_smf) - to_db(truth.eta_smf)) < 1.0);
}

}
