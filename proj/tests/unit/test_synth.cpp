#include <doctest.h>

#include "skylink/synth.hpp"
#include "skylink/zernike.hpp"

using namespace skylink;

namespace {

double lag_one(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    const Eigen::ArrayXd d = x.array() - mean;
    const Eigen::Index n = d.size();
    return (d.head(n - 1) * d.tail(n - 1)).sum() / d.square().sum();
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("splitmix64 reference values") {
    // First outputs of the reference generator seeded with 0.
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL * 0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64(1) != splitmix64(2));
}

TEST_CASE("uniform and normal streams") {
    NormalStream s(123);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);

    NormalStream n(7);
    double sum = 0.0, sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double x = n.normal();
        REQUIRE(std::isfinite(x));
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / count) < 0.01);
    CHECK(sq / count == doctest::Approx(1.0).epsilon(0.01));

    NormalStream a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(SynthConfig{}.validate());
    auto bad = [](auto edit) {
        SynthConfig c;
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.r0 = 0.0; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.d_rx = -1.0; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.j_max = 1; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.n_samples = 1; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.sample_rate_hz = 0.0; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.wind_m_s = -1.0; }).validate(), DomainError);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.sensor_noise_rad2 = -1e-3; }).validate(), DomainError);
    CHECK_THROWS_AS(generate_series(bad([](SynthConfig& c) { c.j_max = 0; })), DomainError);
}

TEST_CASE("same seed gives the same series") {
    SynthConfig cfg;
    cfg.n_samples = 500;
    cfg.wind_m_s = 0.5;
    const ZernikeSeries a = generate_series(cfg);
    const ZernikeSeries b = generate_series(cfg);
    CHECK((a.coefficients().array() == b.coefficients().array()).all());
    cfg.seed = 2;
    const ZernikeSeries c = generate_series(cfg);
    CHECK_FALSE((a.coefficients().array() == c.coefficients().array()).all());
}

TEST_CASE("series shape and metadata") {
    SynthConfig cfg;
    cfg.j_max = 12;
    cfg.n_samples = 30;
    cfg.sample_rate_hz = 5.0;
    const ZernikeSeries s = generate_series(cfg);
    CHECK(s.mode_count() == 12);
    CHECK(s.sample_count() == 30);
    CHECK(s.timestamps()(29) == doctest::Approx(29.0 / 5.0));
    CHECK(s.wavelength() == cfg.wavelength_m);
    CHECK(s.aperture_diameter() == cfg.d_rx);
    for (Eigen::Index i = 0; i < 30; ++i) CHECK(s.sample_valid(i));
}

TEST_CASE("white samples hit the Kolmogorov variances") {
    SynthConfig cfg;
    cfg.j_max = 10;
    cfg.n_samples = 100000;
    const ModeVarianceSet v = empirical_variances(generate_series(cfg));
    for (int j = 1; j <= 10; ++j) {
        const double target = turbulence_variance(j, cfg.d_rx, cfg.r0);
        CHECK(target_variance(cfg, j) == target);
        CHECK(*v.variance(j) == doctest::Approx(target).epsilon(0.03));
    }
}

TEST_CASE("AR(1) correlation and stationarity") {
    SynthConfig cfg;
    cfg.j_max = 4;
    cfg.n_samples = 100000;
    cfg.wind_m_s = 1.0;
    cfg.r0 = 0.08;
    cfg.sample_rate_hz = 100.0;
    const double rho = lag_one_correlation(cfg);
    CHECK(rho == doctest::Approx(std::exp(-2.0 * M_PI * 0.43 * 1.0 / 0.08 / 100.0)).epsilon(1e-15));
    CHECK(synth_greenwood(cfg) == doctest::Approx(0.43 / 0.08).epsilon(1e-15));
    const ZernikeSeries s = generate_series(cfg);
    const ModeVarianceSet v = empirical_variances(s);
    for (int j = 1; j <= 4; ++j) {
        const Eigen::VectorXd x = s.coefficients().col(j - 1);
        CHECK(lag_one(x) == doctest::Approx(rho).epsilon(0.05));
        CHECK(std::abs(x.mean()) < 0.05 * std::sqrt(target_variance(cfg, j)));
        CHECK(*v.variance(j) == doctest::Approx(target_variance(cfg, j)).epsilon(0.05));
    }
    cfg.wind_m_s = 0.0;
    CHECK(lag_one_correlation(cfg) == 0.0);
}

TEST_CASE("closed loop attenuates corrected modes") {
    SynthConfig off;
    off.wind_m_s = 0.556;
    off.r0 = 0.0928;
    off.j_max = 40;
    off.corrected_modes = 35;
    SynthConfig on = off;
    on.ao_on = true;
    const double factor = std::pow(synth_greenwood(on) / on.f_3db_hz, 5.0 / 3.0);
    for (int j = 1; j <= 40; ++j) {
        CHECK(ao_rejection_factor(off, j) == 1.0);
        if (j <= 35) {
            CHECK(ao_rejection_factor(on, j) == doctest::Approx(factor).epsilon(1e-15));
            CHECK(target_variance(on, j) < target_variance(off, j));
        } else {
            CHECK(target_variance(on, j) == target_variance(off, j));
        }
    }
    on.wind_m_s = 100.0;
    CHECK(ao_rejection_factor(on, 1) == 1.0);

    on.wind_m_s = 0.556;
    on.sensor_noise_rad2 = 0.01;
    CHECK(target_variance(on, 3) == doctest::Approx(factor * turbulence_variance(3, 0.41, 0.0928) + 0.01));
}

}
