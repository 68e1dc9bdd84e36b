#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fermiscale/response.hpp"
#include "fermiscale/scaling.hpp"

using namespace fermiscale;
using Catch::Approx;

namespace {

SpectrumSeries synthetic_series(double lo, double hi, double h,
                                double (*f)(double), double temperature = 0.0) {
    SpectrumSeries s;
    for (double w = lo; w <= hi + 1e-12; w += h) {
        s.omega0.push_back(w);
        s.value.push_back(f(w));
    }
    s.meta.temperature = temperature;
    return s;
}

std::pair<std::vector<double>, std::vector<double>> lorentzian_pair(double gamma, double center,
                                                                    double extent, double h) {
    std::vector<double> w, im;
    const int half = static_cast<int>(std::round(extent / h));
    for (int i = -half; i <= half; ++i) {
        const double x = i * h;
        w.push_back(x);
        im.push_back(gamma / ((x - center) * (x - center) + gamma * gamma) -
                     gamma / ((x + center) * (x + center) + gamma * gamma));
    }
    return {w, im};
}

} // namespace

TEST_CASE("drive spectra") {
    SECTION("sampled power is mirrored and interpolated") {
        auto d = DriveSpectrum::sampled({1.0, 2.0, 3.0}, {0.0, 4.0, 0.0});
        CHECK(d.power_density(2.0) == Approx(4.0));
        CHECK(d.power_density(-2.0) == Approx(4.0));
        CHECK(d.power_density(2.5) == Approx(2.0));
        CHECK(d.power_density(5.0) == 0.0);
        CHECK_FALSE(d.has_phase());
        CHECK_THROWS_AS(d.amplitude(2.0), std::invalid_argument);
    }
    SECTION("sampled form validation") {
        CHECK_THROWS_AS(DriveSpectrum::sampled({1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(DriveSpectrum::sampled({1.0, 2.0}, {1.0, -1.0}), std::invalid_argument);
    }
    SECTION("gaussian pulse integrates to the narrow-pulse normalization") {
        const double f0 = 1.3, sigma = 0.05;
        auto d = DriveSpectrum::gaussian_pulse(f0, 2.0, sigma);
        double integral = 0;
        for (double w = 1.0; w <= 3.0; w += sigma / 20) integral += d.power_density(w) * sigma / 20;
        CHECK(integral == Approx(M_PI * f0 * f0).epsilon(1e-3));
        // amplitude squared agrees with the stated power density away from w = 0
        CHECK(std::norm(d.amplitude(2.03)) == Approx(d.power_density(2.03)).epsilon(1e-9));
    }
}

TEST_CASE("dissipative part from the noise spectrum") {
    SECTION("zero noise gives zero response") {
        auto s = synthetic_series(-1, 3, 0.1, [](double) { return 0.0; });
        auto chi = im_chi_from_noise(s, Occupation::zero_temperature());
        for (double v : chi.im_chi) CHECK(v == 0.0);
    }
    SECTION("ground state: half the noise, antisymmetrized") {
        auto step = [](double w) { return (w > 1.0 && w < 2.0) ? 0.8 : 0.0; };
        auto s = synthetic_series(-0.5, 2.5, 0.05, step);
        auto chi = im_chi_from_noise(s, Occupation::zero_temperature());
        REQUIRE(chi.omega.size() % 2 == 1);
        for (std::size_t i = 0; i < chi.omega.size(); ++i) {
            const double w = chi.omega[i];
            if (w > 1.05 && w < 1.95) CHECK(chi.im_chi[i] == Approx(0.4).margin(1e-12));
            if (w < -1.05 && w > -1.95) CHECK(chi.im_chi[i] == Approx(-0.4).margin(1e-12));
        }
    }
    SECTION("output is odd in frequency") {
        auto bump = [](double w) { return w > 0 ? w * std::exp(-w) : 0.0; };
        auto s = synthetic_series(-1, 6, 0.1, bump);
        auto chi = im_chi_from_noise(s, Occupation::zero_temperature());
        const std::size_t n = chi.omega.size();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(chi.im_chi[i] == Approx(-chi.im_chi[n - 1 - i]).margin(1e-12));
    }
    SECTION("finite temperature applies the fluctuation-dissipation factor") {
        auto flat = [](double w) { return (std::abs(w) < 2.0) ? 1.0 : 0.0; };
        auto s = synthetic_series(-3, 3, 0.25, flat);
        auto occ = Occupation::thermal(1.5);
        auto chi = im_chi_from_noise(s, occ);
        for (std::size_t i = 0; i < chi.omega.size(); ++i) {
            const double w = chi.omega[i];
            CHECK(w != 0.0);   // singular point excluded
            if (std::abs(w) < 1.9) {
                const double nb = 1.0 / std::expm1(1.5 * w);
                CHECK(2.0 * (1.0 + nb) * chi.im_chi[i] == Approx(1.0).margin(1e-10));
            }
        }
    }
    SECTION("non-uniform grids are rejected") {
        SpectrumSeries s;
        s.omega0 = {0.0, 0.1, 0.3};
        s.value = {0, 0, 0};
        CHECK_THROWS_AS(im_chi_from_noise(s, Occupation::zero_temperature()),
                        std::invalid_argument);
    }
}

TEST_CASE("dissipative support mirrors the noise support") {
    auto model = qwz_model(1.0);
    auto mesh = build_mesh({12, 12});
    auto occ = Occupation::zero_temperature();
    const double dw = select_window(model, mesh, 1);
    BoxKernel kernel(dw);
    auto grid = default_omega0_grid(BandTable(model, mesh), dw);
    auto s = sbar(model, mesh, Region::box({6, 6}), occ, kernel, grid);
    auto chi = im_chi_from_noise(s, occ);
    double peak = 0;
    for (double v : chi.im_chi) peak = std::max(peak, std::abs(v));
    bool inside_seen = false;
    for (std::size_t i = 0; i < chi.omega.size(); ++i) {
        const double w = std::abs(chi.omega[i]);
        if (w < 2.0 - 2 * dw || w > 6.0 + 2 * dw)
            CHECK(std::abs(chi.im_chi[i]) < 1e-12 * peak);
        if (w > 3.5 && w < 4.5 && std::abs(chi.im_chi[i]) > 0.1 * peak) inside_seen = true;
    }
    CHECK(inside_seen);
}

TEST_CASE("principal-value reconstruction of the reactive part") {
    SECTION("zero in, zero out") {
        std::vector<double> w, im;
        for (int i = -50; i <= 50; ++i) {
            w.push_back(0.1 * i);
            im.push_back(0.0);
        }
        for (double v : re_chi_kk(w, im)) CHECK(v == Approx(0.0).margin(1e-15));
    }
    SECTION("lorentzian pair against the analytic transform") {
        const double gamma = 0.05, Omega = 1.0, h = gamma / 10;
        auto [w, im] = lorentzian_pair(gamma, Omega, 12.0, h);
        auto re = re_chi_kk(w, im);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = w[i];
            if (std::abs(std::abs(x) - Omega) <= 3 * gamma || std::abs(x) > 6.0) continue;
            const double exact = (x + Omega) / ((x + Omega) * (x + Omega) + gamma * gamma) -
                                 (x - Omega) / ((x - Omega) * (x - Omega) + gamma * gamma);
            CHECK(re[i] == Approx(exact).epsilon(1e-3));
        }
    }
    SECTION("static limit agrees with the odd-integrand quadrature") {
        const double gamma = 0.05, Omega = 1.0, h = gamma / 10;
        auto [w, im] = lorentzian_pair(gamma, Omega, 12.0, h);
        auto re = re_chi_kk(w, im);
        const std::size_t iz = w.size() / 2;
        REQUIRE(w[iz] == Approx(0.0).margin(1e-12));
        double odd = 0;
        for (std::size_t i = iz + 1; i < w.size(); ++i) odd += im[i] / w[i] * h;
        odd *= 2.0 / M_PI;
        CHECK(re[iz] == Approx(odd).epsilon(1e-3));
    }
    SECTION("round trip recovers the dissipative part to 1%") {
        const double gamma = 0.05, h = gamma / 10;
        auto [w, im] = lorentzian_pair(gamma, 1.0, 12.0, h);
        auto re = re_chi_kk(w, im);
        auto back = hilbert_pv(w, re);
        double immax = 0, err = 0;
        for (double v : im) immax = std::max(immax, std::abs(v));
        for (std::size_t i = 0; i < w.size(); ++i)
            if (std::abs(w[i]) < 6.0) err = std::max(err, std::abs(-back[i] - im[i]));
        CHECK(err / immax < 0.01);
    }
    SECTION("grid validation") {
        std::vector<double> asym{-1.0, 0.0, 1.0, 2.0}, f{0, 0, 0, 0};
        CHECK_THROWS_AS(re_chi_kk(asym, f), std::invalid_argument);
        std::vector<double> nonuni{-1.0, -0.4, 0.4, 1.0};
        CHECK_THROWS_AS(re_chi_kk(nonuni, f), std::invalid_argument);
    }
}

TEST_CASE("absorption rate") {
    SECTION("a transparent system absorbs nothing") {
        auto s = synthetic_series(-1, 5, 0.1, [](double) { return 0.0; });
        CHECK(absorption_rate(s, DriveSpectrum::gaussian_pulse(1.0, 2.0, 0.2)) == 0.0);
        CHECK(absorption_rate(s, DriveSpectrum::monochromatic(1.0, 2.0)) == 0.0);
    }
    SECTION("monochromatic drives use the narrow-pulse form") {
        auto s = synthetic_series(-1, 5, 0.1, [](double w) {
            return (w > 1 && w < 3) ? 0.7 : 0.0;
        });
        const double f0 = 1.5, W = 2.0;
        CHECK(absorption_rate(s, DriveSpectrum::monochromatic(f0, W)) ==
              Approx(0.25 * f0 * f0 * W * 0.7).margin(1e-12));
    }
    SECTION("quadratic in the drive amplitude") {
        auto s = synthetic_series(-1, 5, 0.05, [](double w) {
            return w > 0 ? std::exp(-(w - 2) * (w - 2)) : 0.0;
        });
        const double e1 = absorption_rate(s, DriveSpectrum::gaussian_pulse(1.0, 2.0, 0.3));
        const double e2 = absorption_rate(s, DriveSpectrum::gaussian_pulse(2.0, 2.0, 0.3));
        CHECK(e2 == Approx(4.0 * e1).epsilon(1e-12));
        CHECK(e1 > 0.0);
    }
    SECTION("drives outside the computed grid are rejected") {
        auto s = synthetic_series(0, 3, 0.1, [](double) { return 1.0; });
        CHECK_THROWS_AS(absorption_rate(s, DriveSpectrum::monochromatic(1.0, 4.0)),
                        std::invalid_argument);
        CHECK_THROWS_AS(absorption_rate(s, DriveSpectrum::gaussian_pulse(1.0, 2.9, 0.5)),
                        std::invalid_argument);
    }
    SECTION("ground-state dissipation is nonnegative for any real drive") {
        auto model = qwz_model(1.0);
        auto mesh = build_mesh({8, 8});
        const double dw = select_window(model, mesh, 1);
        BoxKernel kernel(dw);
        auto grid = default_omega0_grid(BandTable(model, mesh), dw);
        auto s = sbar(model, mesh, Region::box({4, 4}), Occupation::zero_temperature(), kernel,
                      grid);
        for (double center : {2.5, 4.0, 5.5})
            CHECK(absorption_rate(s, DriveSpectrum::gaussian_pulse(0.7, center, 0.3)) >= 0.0);
    }
}

TEST_CASE("particle response") {
    ResponseSeries chi;
    for (int i = -20; i <= 20; ++i) {
        chi.omega.push_back(0.25 * i);
        chi.im_chi.push_back(0.0);
        chi.re_chi.push_back(3.0);   // constant reactive response
    }
    SECTION("zero drive, zero response") {
        auto r = particle_response(chi, DriveSpectrum::gaussian_pulse(0.0, 2.0, 0.3));
        for (auto v : r.value) CHECK(std::abs(v) == 0.0);
    }
    SECTION("monochromatic amplitude is chi times f0") {
        auto r = particle_response(chi, DriveSpectrum::monochromatic(1.5, 2.0));
        REQUIRE(r.omega.size() == 2);
        CHECK(r.value[1].real() == Approx(4.5).margin(1e-12));
        CHECK(r.value[0].real() == Approx(4.5).margin(1e-12));
    }
    SECTION("linearity: doubling the drive doubles the response") {
        auto r1 = particle_response(chi, DriveSpectrum::gaussian_pulse(1.0, 2.0, 0.3));
        auto r2 = particle_response(chi, DriveSpectrum::gaussian_pulse(2.0, 2.0, 0.3));
        for (std::size_t i = 0; i < r1.value.size(); ++i)
            CHECK(std::abs(r2.value[i] - 2.0 * r1.value[i]) < 1e-12);
    }
    SECTION("phaseless drives are rejected") {
        auto d = DriveSpectrum::sampled({1.0, 2.0}, {1.0, 1.0});
        CHECK_THROWS_AS(particle_response(chi, d), std::invalid_argument);
    }
    SECTION("the reactive part must be present") {
        ResponseSeries im_only;
        im_only.omega = {-1.0, 0.0, 1.0};
        im_only.im_chi = {0.0, 0.0, 0.0};
        CHECK_THROWS_AS(particle_response(im_only, DriveSpectrum::monochromatic(1.0, 0.5)),
                        std::invalid_argument);
    }
}

TEST_CASE("absorption scales with subsystem size like the noise itself") {
    auto model = qwz_model(1.0);
    auto occ = Occupation::zero_temperature();
    const double dw = select_window(model, build_mesh({12, 12}), 1);
    BoxKernel kernel(dw);
    auto grid = default_omega0_grid(BandTable(model, build_mesh({12, 12})), dw);
    auto drive = DriveSpectrum::gaussian_pulse(1.0, 4.0, dw / 8);

    SizeSeries noise{{}, 2, "sbar"}, rate{{}, 2, "absorption"};
    std::size_t i4 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - 4.0) < std::abs(grid[i4] - 4.0)) i4 = i;
    for (int n : {12, 16, 20}) {
        auto mesh = build_mesh({n, n});
        auto s = sbar(model, mesh, Region::box({n / 2, n / 2}), occ, kernel, grid);
        noise.entries.emplace_back(n / 2.0, s.value[i4]);
        rate.entries.emplace_back(n / 2.0, absorption_rate(s, drive));
    }
    auto fn = fit_scaling(noise);
    auto fr = fit_scaling(rate);
    CHECK(fn.law == ScalingLaw::area);
    CHECK(fr.law == fn.law);
}
