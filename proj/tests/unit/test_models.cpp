#include "instanton/errors.hpp"
#include "instanton/presets.hpp"
#include "instanton/systems.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace instanton;
using test::random_field;
using test::smooth_state;

namespace {

/// Admissible base states per preset for derivative checks.
std::vector<double> base_state(const std::string& name) {
    if (name == "doublewell2d") return {0.3, -0.2};
    if (name == "doublewell1d_validation") return {0.4};
    if (name == "allencahn_boundary") return {0.5};
    if (name == "gierer_meinhardt") return {1.2, 0.9};
    if (name == "fitzhugh_nagumo") return {-0.8, -0.4};
    return {0.7, 1.1};
}

std::shared_ptr<Model> small_model(const std::string& name) {
    const bool spatial = name != "doublewell2d" && name != "doublewell1d_validation";
    return spatial ? make_model(name, {}, 32) : make_model(name);
}

} // namespace

TEST_CASE("every model's Jacobian-adjoint matches central differences of N") {
    std::mt19937_64 rng(3);
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto m = small_model(name);
        const Field u = smooth_state(*m, base_state(name));
        const Field v = random_field(*m, rng);
        const Field w = random_field(*m, rng);
        const double h = 1e-6;
        const double fd = (inner_product(m->nonlinear(u + h * w), v, m->domain()) -
                           inner_product(m->nonlinear(u - h * w), v, m->domain())) /
                          (2.0 * h);
        const double an = inner_product(m->nonlinear_jacobian_adjoint(u, v), w, m->domain());
        CHECK(an == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("every model's covariance variation matches central differences") {
    std::mt19937_64 rng(5);
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto m = small_model(name);
        const Field u = smooth_state(*m, base_state(name));
        const Field v = random_field(*m, rng);
        const Field w = random_field(*m, rng);
        const Field dir = random_field(*m, rng);
        const double h = 1e-6;
        auto f = [&](const Field& x) {
            return inner_product(v, m->covariance_apply(x, w), m->domain());
        };
        const double fd = (f(u + h * dir) - f(u - h * dir)) / (2.0 * h);
        const double an = inner_product(m->covariance_variation(u, v, w), dir, m->domain());
        if (m->additive_noise())
            CHECK(std::abs(an) == 0.0);
        else
            CHECK(an == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("covariance is sigma sigma^* and symmetric") {
    std::mt19937_64 rng(9);
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto m = small_model(name);
        const Field u = smooth_state(*m, base_state(name));
        const Field v = random_field(*m, rng);
        const Field w = random_field(*m, rng);
        const double vaw = inner_product(v, m->covariance_apply(u, w), m->domain());
        const double avw = inner_product(m->covariance_apply(u, v), w, m->domain());
        CHECK(vaw == doctest::Approx(avw).epsilon(1e-10));
        if (m->has_sigma()) {
            const double ss = inner_product(m->sigma_apply(u, v), m->sigma_apply(u, w), m->domain());
            CHECK(vaw == doctest::Approx(ss).epsilon(1e-12));
        }
    }
}

TEST_CASE("noise leaves unforced components untouched") {
    std::mt19937_64 rng(13);
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto m = small_model(name);
        const auto forced = m->forced_components();
        const Field a = m->covariance_apply(smooth_state(*m, base_state(name)),
                                            random_field(*m, rng));
        for (int c = 0; c < m->components(); ++c)
            if (!forced[static_cast<std::size_t>(c)])
                for (int i = 0; i < a.points(); ++i) CHECK(a(c, i) == 0.0);
    }
}

TEST_CASE("Hamiltonian vanishes at zero momentum and on the escape branch") {
    const auto m = make_model("doublewell1d_validation");
    Field u(1, 1, 0.3), p(1, 1);
    CHECK(hamiltonian(*m, u, p) == 0.0);
    // Additive unit noise: H = b p + p^2 / 2 vanishes again at p = -2 b.
    p(0, 0) = -2.0 * (0.3 - 0.027);
    CHECK(std::abs(hamiltonian(*m, u, p)) < 1e-14);
}

TEST_CASE("FitzHugh-Nagumo rest state") {
    const auto generic = make_model("fitzhugh_nagumo", {}, 64);
    const auto& m = dynamic_cast<const FitzHughNagumo&>(*generic);
    const auto [u, v] = m.rest_state();
    CHECK(u == doctest::Approx(-1.19941).epsilon(1e-5));
    CHECK(v == doctest::Approx(-0.62426).epsilon(1e-5));
    Field rest(2, 64);
    for (int i = 0; i < 64; ++i) {
        rest(0, i) = u;
        rest(1, i) = v;
    }
    CHECK(max_abs(drift(m, rest)) < 1e-10);
}

TEST_CASE("Allen-Cahn boundary lifting and covariance") {
    const double pi = std::numbers::pi;
    const auto generic = make_model("allencahn_boundary", {}, 65);
    const auto& ac = dynamic_cast<const AllenCahnBoundary&>(*generic);
    const Field lift = ac.lift(1.0);
    CHECK(lift(0, 0) == doctest::Approx(-std::cosh(pi) / std::sinh(pi)).epsilon(1e-14));
    CHECK(lift(0, 0) == doctest::Approx(-1.0037).epsilon(1e-4));
    CHECK(lift(0, 64) == doctest::Approx(-1.0 / std::sinh(pi)).epsilon(1e-13));

    SUBCASE("D^* is the quadrature adjoint of D") {
        std::mt19937_64 rng(17);
        const Field f = random_field(ac, rng);
        CHECK(ac.lift_adjoint(f) == doctest::Approx(inner_product(ac.lift(1.0), f, ac.domain())));
        CHECK(ac.lift_adjoint(ac.lift(2.0)) == doctest::Approx(2.0 * ac.lift_adjoint(lift)));
    }
    SUBCASE("D^* D converges to the analytic integral") {
        const double sinh_pi = std::sinh(pi);
        const double exact = (pi / 2.0 + std::sinh(2.0 * pi) / 4.0) / (sinh_pi * sinh_pi);
        const AllenCahnBoundary fine(ac.parameters(), (1 << 17) + 1);
        CHECK(std::abs(fine.lift_adjoint(fine.lift(1.0)) - exact) < 1e-10);
        // Second-order trapezoid convergence on coarse grids.
        const AllenCahnBoundary g1(ac.parameters(), 65), g2(ac.parameters(), 129);
        const double e1 = std::abs(g1.lift_adjoint(g1.lift(1.0)) - exact);
        const double e2 = std::abs(g2.lift_adjoint(g2.lift(1.0)) - exact);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
    }
    SUBCASE("covariance has rank one") {
        const int n = ac.domain().points;
        Eigen::MatrixXd a(n, n);
        for (int j = 0; j < n; ++j) {
            Field e(1, n);
            e(0, j) = 1.0;
            const Field col = ac.boundary_covariance_apply(e);
            for (int i = 0; i < n; ++i) a(i, j) = col(0, i);
        }
        const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
        CHECK(s(0) > 1.0);
        CHECK(s(1) < 1e-10 * s(0));
    }
    SUBCASE("momentum projection onto the covariance range") {
        std::mt19937_64 rng(23);
        const Field v = random_field(ac, rng);
        Field pv = v;
        ac.project_momentum(pv);
        // a P = a, P idempotent, and P v is a multiple of a v.
        const Field av = ac.boundary_covariance_apply(v);
        const Field apv = ac.boundary_covariance_apply(pv);
        for (int i = 0; i < 65; ++i) CHECK(apv(0, i) == doctest::Approx(av(0, i)).epsilon(1e-10));
        Field ppv = pv;
        ac.project_momentum(ppv);
        for (int i = 0; i < 65; ++i) CHECK(ppv(0, i) == doctest::Approx(pv(0, i)).epsilon(1e-13));
        const double ratio = pv(0, 0) / av(0, 0);
        for (int i = 0; i < 65; i += 8)
            CHECK(pv(0, i) == doctest::Approx(ratio * av(0, i)).epsilon(1e-10));
        CHECK_FALSE(make_model("gierer_meinhardt", {}, 16)->projects_momentum());
    }
    SUBCASE("sigma0^2 prefactor") {
        Field v(1, 65, 1.0);
        const Field with = ac.covariance_apply(Field(1, 65), v);
        const Field without = ac.boundary_covariance_apply(v);
        const double s0 = ac.parameter("sigma0");
        CHECK(with(0, 3) == doctest::Approx(s0 * s0 * without(0, 3)));
    }
}

TEST_CASE("Gierer-Meinhardt guards the inhibitor") {
    const auto m = make_model("gierer_meinhardt", {}, 32);
    Field u(2, 32, 1.0);
    CHECK_NOTHROW(m->check_state(u, 0));
    u(1, 4) = -0.5;
    CHECK_THROWS_AS(m->check_state(u, 3), SolverError);
}

TEST_CASE("model parameters and overrides") {
    const auto m = make_model("allencahn_boundary", {{"alpha", 2.0}});
    CHECK(m->parameter("alpha") == 2.0);
    CHECK(m->parameter("sigma0") == 0.5);
    CHECK_THROWS_AS(make_model("allencahn_boundary", {{"nonsense", 1.0}}), ConfigError);
    CHECK_THROWS_AS(make_model("no_such_model"), ConfigError);
    CHECK_FALSE(make_model("barkley")->equations().empty());
}
