#include "instanton/errors.hpp"
#include "instanton/presets.hpp"
#include "instanton/propagator.hpp"
#include "instanton/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace instanton;

namespace {

double max_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("spectral transforms round-trip") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (const auto& d : {SpatialDomain::periodic(10.0, 64), SpatialDomain::periodic(10.0, 63),
                          SpatialDomain::neumann(std::numbers::pi, 65)}) {
        const SpectralBasis basis(d);
        std::vector<double> f(static_cast<std::size_t>(d.points));
        for (double& v : f) v = normal(rng);
        const auto back = basis.inverse(basis.forward(f));
        CHECK(max_diff(f, back) < 1e-13);
    }
}

TEST_CASE("Laplacian eigenvalues") {
    SUBCASE("neumann cosines") {
        const auto d = SpatialDomain::neumann(std::numbers::pi, 33);
        const SpectralBasis basis(d);
        const auto x = d.coordinates();
        std::vector<double> f(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) f[i] = std::cos(3.0 * x[i]);
        const auto c = basis.forward(f);
        CHECK(std::abs(c[3] - 1.0) < 1e-13);
        CHECK(basis.mode_table()[3].eigenvalue == doctest::Approx(-9.0));
    }
    SUBCASE("periodic exponentials") {
        const auto d = SpatialDomain::periodic(2.0 * std::numbers::pi, 32);
        const SpectralBasis basis(d);
        bool found = false;
        for (const Mode& m : basis.mode_table())
            if (m.wavenumber == doctest::Approx(2.0)) {
                CHECK(m.eigenvalue == doctest::Approx(-4.0));
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("coefficient inner product matches the grid quadrature") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (const auto& d : {SpatialDomain::periodic(150.0, 48), SpatialDomain::neumann(1.0, 41)}) {
        const SpectralBasis basis(d);
        Field f(1, d.points), g(1, d.points);
        for (int i = 0; i < d.points; ++i) {
            f(0, i) = normal(rng);
            g(0, i) = normal(rng);
        }
        const double grid = inner_product(f, g, d);
        const double coeff =
            basis.coefficient_inner_product(basis.forward(f.row(0)), basis.forward(g.row(0)));
        CHECK(coeff == doctest::Approx(grid).epsilon(1e-12));
    }
}

TEST_CASE("periodic rotation is exact for band-limited fields") {
    const auto d = SpatialDomain::periodic(150.0, 64);
    const SpectralBasis basis(d);
    const auto x = d.coordinates();
    const double k = 2.0 * std::numbers::pi / 150.0;
    std::vector<double> f(x.size()), expected(x.size());
    const double shift = 150.0 / 7.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        f[i] = std::sin(3.0 * k * x[i]) + 0.5 * std::cos(k * x[i]);
        expected[i] = std::sin(3.0 * k * (x[i] - shift)) + 0.5 * std::cos(k * (x[i] - shift));
    }
    CHECK(max_diff(basis.rotate(f, shift), expected) < 1e-12);
}

TEST_CASE("phi functions") {
    // Closed forms away from zero, series inside; both sides of the switch agree.
    for (double z : {-40.0, -1.0, -0.1000001, -0.0999999, -1e-8, 0.0, 0.05, 0.3}) {
        const double p1 = phi1(z).real();
        const double p2 = phi2(z).real();
        if (std::abs(z) > 1e-3) {
            CHECK(p1 == doctest::Approx(std::expm1(z) / z).epsilon(1e-14));
            CHECK(p2 == doctest::Approx((std::expm1(z) - z) / (z * z)).epsilon(1e-9));
        } else {
            CHECK(p1 == doctest::Approx(1.0 + z / 2.0).epsilon(1e-12));
            CHECK(p2 == doctest::Approx(0.5 + z / 6.0).epsilon(1e-12));
        }
    }
    const std::complex<double> z(0.03, 0.05);
    CHECK(std::abs(phi1(z) - (std::exp(z) - 1.0) / z) < 1e-13);
}

TEST_CASE("linear propagator is exact on eigenmodes with linear forcing") {
    // Allen-Cahn linear part is the Neumann Laplacian: cos(2x) has symbol -4.
    const auto model = make_model("allencahn_boundary", {}, 33);
    const double dt = 0.1;
    const LinearPropagator prop(*model, dt);
    REQUIRE(prop.spatial());
    const auto x = model->domain().coordinates();
    const double l = -4.0;
    Field mode(1, 33), zero(1, 33);
    for (int i = 0; i < 33; ++i) mode(0, i) = std::cos(2.0 * x[static_cast<std::size_t>(i)]);

    const Field e = prop.exponential(mode);
    CHECK(e(0, 5) == doctest::Approx(std::exp(l * dt) * mode(0, 5)).epsilon(1e-12));

    // Forcing f(s) = (1 + s) mode over one step: the exact Duhamel integral
    // int_0^dt e^{l(dt-s)} (1 + s) ds.
    Field f0 = mode;
    Field f1 = mode;
    f1 *= 1.0 + dt;
    Field out = prop.step(zero, zero, f0);
    out.axpy(0.5 * dt, prop.smooth(f1));
    const double exact = (std::expm1(l * dt) / l) + (std::exp(l * dt) - 1.0 - l * dt) / (l * l);
    CHECK(out(0, 5) == doctest::Approx(exact * mode(0, 5)).epsilon(1e-12));

    // Adjoint parts are the conjugate-symbol multipliers.
    const auto parts = prop.adjoint_split(mode);
    CHECK(parts.e(0, 7) == doctest::Approx(e(0, 7)).epsilon(1e-13));
}

TEST_CASE("point models have a trivial propagator") {
    const auto model = make_model("doublewell2d");
    const LinearPropagator prop(*model, 0.02);
    CHECK_FALSE(prop.spatial());
    Field x(2, 1, 1.0);
    CHECK(prop.smooth(x)(1, 0) == 1.0);
    CHECK(prop.step(x, x, x)(0, 0) == doctest::Approx(1.01));
}
