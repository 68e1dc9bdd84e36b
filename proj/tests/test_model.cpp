#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fermiscale/model.hpp"

using namespace fermiscale;
using Catch::Approx;

TEST_CASE("qwz bands and projectors at high-symmetry points") {
    auto model = qwz_model(1.0);
    const double gamma[] = {0.0, 0.0};
    const double corner[] = {M_PI, M_PI};

    auto s = model.spectrum(gamma);
    CHECK(s.energies(0) == Approx(-1.0).margin(1e-14));
    CHECK(s.energies(1) == Approx(1.0).margin(1e-14));
    // d = -z at the zone center, so the valence projector is diag(1, 0)
    Eigen::MatrixXcd p = s.vectors.col(0) * s.vectors.col(0).adjoint();
    CHECK(std::abs(p(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(p(1, 1)) < 1e-14);
    CHECK(std::abs(p(0, 1)) < 1e-14);

    auto sc = model.spectrum(corner);
    CHECK(sc.energies(0) == Approx(-3.0).margin(1e-12));
    CHECK(sc.energies(1) == Approx(3.0).margin(1e-12));
}

TEST_CASE("qwz m=1 bands span (1,3) in magnitude on the reference mesh") {
    auto model = qwz_model(1.0);
    auto mesh = build_mesh({12, 12});
    BandTable table(model, mesh);
    double lo = 1e300, hi = 0;
    for (int k = 0; k < mesh.size(); ++k) {
        lo = std::min(lo, table.energy(k, 1));
        hi = std::max(hi, table.energy(k, 1));
    }
    CHECK(lo == Approx(1.0).margin(1e-12));
    CHECK(hi == Approx(3.0).margin(1e-12));
}

TEST_CASE("metal dispersions") {
    auto m2 = metal_model_2d(1.0, 1.0, 0.5);
    const double g2[] = {0.0, 0.0}, c2[] = {M_PI, M_PI};
    CHECK(m2.energy(g2, 0) == Approx(-1.5).margin(1e-14));
    CHECK(m2.energy(c2, 0) == Approx(2.5).margin(1e-14));

    auto m1 = metal_model_1d(1.0, 0.5);
    const double g1[] = {0.0}, c1[] = {M_PI};
    CHECK(m1.energy(g1, 0) == Approx(-0.5).margin(1e-14));
    CHECK(m1.energy(c1, 0) == Approx(1.5).margin(1e-14));

    // bandwidths bound the transition ranges: 4 and 2
    BandTable t2(m2, build_mesh({8, 8})), t1(m1, build_mesh({8}));
    CHECK(t2.max_energy() - t2.min_energy() == Approx(4.0).margin(1e-12));
    CHECK(t1.max_energy() - t1.min_energy() == Approx(2.0).margin(1e-12));
}

TEST_CASE("projector overlaps") {
    auto model = qwz_model(1.0);
    const double gamma[] = {0.0, 0.0};
    const double corner[] = {M_PI, M_PI};
    CHECK(projector_overlap(model, gamma, 0, gamma, 0) == Approx(1.0).margin(1e-13));
    // antiparallel d vectors: the (-,+) overlap is maximal
    CHECK(projector_overlap(model, gamma, 0, corner, 1) == Approx(1.0).margin(1e-12));

    auto metal = metal_model_1d(1.0, 0.5);
    const double ka[] = {0.3}, kb[] = {-1.1};
    CHECK(projector_overlap(metal, ka, 0, kb, 0) == 1.0);

    CHECK_THROWS_AS(projector_overlap(model, gamma, 2, corner, 0), std::out_of_range);
}

TEST_CASE("two-band overlaps follow the d-vector closed form") {
    // Tr[P_{k,m} P_{k',m'}] = (1 +- dhat(k).dhat(k'))/2 for H = d.sigma
    const double m = 1.0;
    auto model = qwz_model(m);
    auto dhat = [&](double kx, double ky) {
        Eigen::Vector3d d(std::sin(kx), std::sin(ky), m - std::cos(kx) - std::cos(ky));
        return Eigen::Vector3d(d / d.norm());
    };
    auto mesh = build_mesh({7, 7});
    for (int i = 0; i < mesh.size(); i += 6)
        for (int j = 0; j < mesh.size(); j += 5) {
            auto a = mesh.point(i), b = mesh.point(j);
            const double cosang = dhat(a[0], a[1]).dot(dhat(b[0], b[1]));
            CHECK(projector_overlap(model, a, 0, b, 0) ==
                  Approx(0.5 * (1 + cosang)).margin(1e-12));
            CHECK(projector_overlap(model, a, 0, b, 1) ==
                  Approx(0.5 * (1 - cosang)).margin(1e-12));
        }
}

TEST_CASE("projector overlap is symmetric and within [0,1]") {
    auto model = qwz_model(0.7);
    auto mesh = build_mesh({5, 5});
    for (int i = 0; i < mesh.size(); i += 3)
        for (int j = 0; j < mesh.size(); j += 4)
            for (int m = 0; m < 2; ++m)
                for (int mp = 0; mp < 2; ++mp) {
                    const double a =
                        projector_overlap(model, mesh.point(i), m, mesh.point(j), mp);
                    const double b =
                        projector_overlap(model, mesh.point(j), mp, mesh.point(i), m);
                    CHECK(a == Approx(b).margin(1e-12));
                    CHECK(a >= 0.0);
                    CHECK(a <= 1.0);
                }
}

TEST_CASE("band completeness and spectral consistency on the mesh") {
    for (double m : {1.0, 2.5}) {
        auto model = qwz_model(m);
        auto mesh = build_mesh({6, 6});
        for (int k = 0; k < mesh.size(); ++k) {
            auto s = model.spectrum(mesh.point(k));
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(2, 2);
            Eigen::MatrixXcd hrec = Eigen::MatrixXcd::Zero(2, 2);
            for (int b = 0; b < 2; ++b) {
                Eigen::MatrixXcd p = s.vectors.col(b) * s.vectors.col(b).adjoint();
                sum += p;
                hrec += s.energies(b) * p;
            }
            CHECK((sum - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-13);
            CHECK((hrec - model.bloch(mesh.point(k))).norm() < 1e-12);
            // particle-hole symmetric two-band spectrum
            CHECK(s.energies(1) == Approx(-s.energies(0)).margin(1e-12));
        }
    }
}

TEST_CASE("occupation function") {
    auto zero = Occupation::zero_temperature();
    CHECK(zero(0.5) == 0.0);
    CHECK(zero(-0.5) == 1.0);
    CHECK(zero(1e-13) == 0.5);
    CHECK(zero(-1e-13) == 0.5);

    auto th = Occupation::thermal(4.0);
    CHECK(th(0.0) == Approx(0.5));
    CHECK(th(0.3) + th(-0.3) == Approx(1.0).margin(1e-14));
    CHECK(th(1000.0) == 0.0);
    CHECK(th(-1000.0) == 1.0);
    CHECK(th.temperature() == Approx(0.25));

    CHECK_THROWS_AS(Occupation::thermal(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Occupation::from_temperature(-1.0), std::invalid_argument);
    CHECK(Occupation::from_temperature(0.0).is_zero_temperature());
}

TEST_CASE("model factory validates names and parameters") {
    CHECK_NOTHROW(make_model("qwz", {{"m", 1.0}}));
    CHECK_THROWS_AS(make_model("ising", {}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("qwz", {}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("qwz", {{"m", 1.0}, {"tilt", 0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(make_model("metal1d", {{"t", 1.0}}), std::invalid_argument);
    auto m = make_model("metal2d", {{"t1", 1.0}, {"t2", 0.5}, {"mu", 0.2}});
    CHECK(m.n_orb() == 1);
    CHECK(m.dimension() == 2);
}
