#include "instanton/errors.hpp"
#include "instanton/field.hpp"
#include "instanton/grid.hpp"
#include "instanton/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace instanton;

TEST_CASE("field arithmetic and layout") {
    Field a(2, 3, 1.0);
    Field b(2, 3);
    b(1, 2) = 4.0;
    a += b;
    CHECK(a(1, 2) == 5.0);
    CHECK(a(0, 0) == 1.0);
    a.axpy(-2.0, b);
    CHECK(a(1, 2) == -3.0);
    CHECK(max_abs(a) == 3.0);
    CHECK(a.row(1).size() == 3);
    CHECK(&a.row(1)[0] == &a.values()[3]);

    Field wrong(3, 2);
    CHECK_THROWS_AS(require_same_shape(a, wrong, "test"), ShapeError);
}

TEST_CASE("trajectory is stored as (time, component, space)") {
    Trajectory t(4, 2, 3);
    Field f(2, 3);
    f(1, 0) = 7.0;
    t.set_node(2, f);
    CHECK(t.values()[2 * 6 + 1 * 3 + 0] == 7.0);
    CHECK(t.node(2)(1, 0) == 7.0);
    CHECK(t.matches(f));
    CHECK_FALSE(t.matches(Field(1, 3)));
}

TEST_CASE("time grid nodes and trapezoid weights") {
    const TimeGrid g(10.0, 500);
    CHECK(g.nodes() == 501);
    CHECK(g.dt() == doctest::Approx(0.02));
    CHECK(g.node(500) == 10.0);
    const auto w = g.trapezoid_weights();
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(w.front() == doctest::Approx(0.01));
    CHECK(w[1] == doctest::Approx(0.02));
}

TEST_CASE("spatial quadrature integrates smooth functions") {
    const double pi = std::numbers::pi;
    SUBCASE("neumann trapezoid includes both endpoints") {
        const auto d = SpatialDomain::neumann(pi, 129);
        const auto x = d.coordinates();
        CHECK(x.front() == 0.0);
        CHECK(x.back() == doctest::Approx(pi));
        Field f(1, d.points);
        for (int i = 0; i < d.points; ++i) f(0, i) = std::cos(x[static_cast<std::size_t>(i)]);
        // int_0^pi cos^2 = pi / 2; trapezoid exact for trigonometric polynomials here.
        CHECK(inner_product(f, f, d) == doctest::Approx(pi / 2).epsilon(1e-12));
    }
    SUBCASE("periodic rectangle rule") {
        const auto d = SpatialDomain::periodic(150.0, 64);
        const auto x = d.coordinates();
        CHECK(x.back() == doctest::Approx(150.0 - 150.0 / 64));
        Field f(1, d.points, 2.0);
        CHECK(norm(f, d) == doctest::Approx(2.0 * std::sqrt(150.0)));
    }
    SUBCASE("point domain is the Euclidean product") {
        const auto d = SpatialDomain::point();
        Field f(2, 1);
        f(0, 0) = 3.0;
        f(1, 0) = 4.0;
        CHECK(norm(f, d) == doctest::Approx(5.0));
    }
}

TEST_CASE("time quadrature is the trapezoid rule") {
    const TimeGrid g(2.0, 4);
    const std::vector<double> linear = {0.0, 0.5, 1.0, 1.5, 2.0};
    CHECK(time_quadrature(linear, g) == doctest::Approx(2.0));
}

TEST_CASE("endpoint filter") {
    const auto d = SpatialDomain::periodic(150.0, 150);
    const auto f = EndpointFilter::indicator(50.0, 70.0);
    Field v(2, 150, 1.0);
    const Field out = f.apply(v, d);
    CHECK(out(0, 49) == 0.0);
    CHECK(out(0, 50) == 1.0);
    CHECK(out(1, 70) == 1.0);
    CHECK(out(1, 71) == 0.0);
    CHECK(f.describe() == "indicator[50,70]");
    CHECK(EndpointFilter::identity().apply(v, d)(0, 0) == 1.0);
    CHECK_THROWS_AS(EndpointFilter::indicator(3.0, 1.0), ConfigError);
}
