#include "instanton/errors.hpp"
#include "instanton/adjoint.hpp"
#include "instanton/forward.hpp"
#include "instanton/objective.hpp"
#include "instanton/validation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace instanton;
using test::smooth_state;

namespace {

struct Setup {
    std::shared_ptr<const Model> model;
    Field u0;
    Field uT;
    double T;
};

/// Short, cheap problems on every model with admissible synthetic endpoints.
Setup small_setup(const std::string& name) {
    if (name == "doublewell2d") {
        auto m = make_model(name);
        return {m, smooth_state(*m, {-0.5, -0.5}, 0.0), smooth_state(*m, {0.5, 0.5}, 0.0), 2.0};
    }
    if (name == "doublewell1d_validation") {
        auto m = make_model(name);
        return {m, smooth_state(*m, {-1.0}, 0.0), smooth_state(*m, {0.0}, 0.0), 2.0};
    }
    if (name == "allencahn_boundary") {
        auto m = make_model(name, {}, 33);
        return {m, smooth_state(*m, {-1.2}, 0.05), smooth_state(*m, {1.2}, 0.05), 1.0};
    }
    if (name == "gierer_meinhardt") {
        auto m = make_model(name, {}, 32);
        return {m, smooth_state(*m, {1.0, 1.2}), smooth_state(*m, {1.5, 0.8}, 0.2), 1.0};
    }
    if (name == "fitzhugh_nagumo") {
        auto m = make_model(name, {}, 32);
        return {m, smooth_state(*m, {-1.2, -0.6}), smooth_state(*m, {1.0, -0.2}, 0.3), 1.0};
    }
    auto m = make_model(name, {}, 32);
    return {m, smooth_state(*m, {0.2, 1.0}), smooth_state(*m, {1.5, 0.6}, 0.3), 1.0};
}

InstantonProblem small_problem(const std::string& name, int steps = 20, double lambda = 10.0) {
    const Setup s = small_setup(name);
    return InstantonProblem(s.model, TimeGrid(s.T, steps), s.u0, s.uT, EndpointFilter::identity(),
                            lambda);
}

} // namespace

TEST_CASE("adjoint gradient matches central differences on every model") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const InstantonProblem problem = small_problem(name);
        const Trajectory theta = random_momentum(problem, 0.3, kDefaultSeed);
        const CheckReport r = gradient_check(problem, theta);
        CHECK(r.value <= 1e-5);
        CHECK(r.pass);
        CHECK(r.probes == 10);
        CHECK(r.seed == kDefaultSeed);
    }
}

TEST_CASE("gradient with an endpoint filter") {
    const auto m = make_model("barkley", {}, 48);
    const InstantonProblem problem(m, TimeGrid(1.0, 20), smooth_state(*m, {0.2, 1.0}),
                                   smooth_state(*m, {1.5, 0.6}, 0.3),
                                   EndpointFilter::indicator(50.0, 70.0), 200.0);
    const Trajectory theta = random_momentum(problem, 0.3, 99);
    CHECK(gradient_check(problem, theta).pass);
}

TEST_CASE("corrupting the Jacobian-adjoint by 1% breaks the gradient check") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const Setup s = small_setup(name);
        const InstantonProblem broken(with_corrupted_jacobian(s.model), TimeGrid(s.T, 20), s.u0,
                                      s.uT, EndpointFilter::identity(), 10.0);
        const Trajectory theta = random_momentum(broken, 0.3, kDefaultSeed);
        CHECK_FALSE(gradient_check(broken, theta).pass);
    }
}

TEST_CASE("gradient rows of unforced components are exactly zero") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal;
    for (const std::string name : {"gierer_meinhardt", "fitzhugh_nagumo", "barkley",
                                   "doublewell2d"}) {
        CAPTURE(name);
        const InstantonProblem problem = small_problem(name);
        Trajectory theta = problem.zero_momentum();
        for (double& v : theta.values()) v = 0.2 * normal(rng);
        const ObjectiveReport r = problem.evaluate(theta);
        const auto forced = problem.model().forced_components();
        for (int k = 0; k < r.gradient.nodes(); ++k) {
            const Field g = r.gradient.node(k);
            for (int c = 0; c < g.components(); ++c)
                if (!forced[static_cast<std::size_t>(c)])
                    for (int i = 0; i < g.points(); ++i) REQUIRE(g(c, i) == 0.0);
        }
    }
}

TEST_CASE("gradient check options are validated") {
    const InstantonProblem problem = small_problem("doublewell1d_validation");
    const Trajectory theta = problem.zero_momentum();
    GradientCheckOptions o;
    o.h = 1e-2;
    CHECK_THROWS_AS(gradient_check(problem, theta, o), ConfigError);
    o.h = 1e-5;
    o.components = {true, false};
    CHECK_THROWS_AS(gradient_check(problem, theta, o), ConfigError);
}

TEST_CASE("zero momentum at a fixed point is the trivial minimiser") {
    const auto m = make_model("doublewell1d_validation");
    const Field rest = smooth_state(*m, {-1.0}, 0.0);
    const InstantonProblem problem(m, TimeGrid(5.0, 50), rest, rest, EndpointFilter::identity(),
                                   10.0);
    const ObjectiveReport r = problem.evaluate(problem.zero_momentum());
    CHECK(r.value == 0.0);
    CHECK(r.action == 0.0);
    CHECK(problem.norm(r.gradient) == 0.0);
    for (int k = 0; k < r.phi.nodes(); ++k) CHECK(r.phi.node(k)(0, 0) == -1.0);
}

TEST_CASE("action of a constant momentum") {
    // Additive unit noise: action = 1/2 int theta^2 dt exactly under the trapezoid rule.
    const auto m = make_model("doublewell1d_validation");
    const TimeGrid grid(3.0, 30);
    Trajectory theta(31, 1, 1, 0.4);
    Trajectory phi(31, 1, 1);
    CHECK(action(*m, phi, theta, grid) == doctest::Approx(0.5 * 0.16 * 3.0));
}

TEST_CASE("multiplier terminal condition") {
    // mu(T) = -lambda F^*F(phi(T) - uT) up to O(dt).
    for (const std::string name : {"doublewell1d_validation", "allencahn_boundary"}) {
        CAPTURE(name);
        const Setup s = small_setup(name);
        const TimeGrid grid(s.T, 400);
        const double lambda = 3.0;
        const Trajectory theta(grid.nodes(), s.u0.components(), s.u0.points());
        const Trajectory phi = integrate_forward(*s.model, theta, s.u0, grid);
        const Trajectory mu =
            integrate_backward(*s.model, phi, theta, lambda, EndpointFilter::identity(), s.uT, grid);
        Field expected = phi.node(grid.steps());
        expected -= s.uT;
        expected *= -lambda;
        Field err = mu.node(grid.steps());
        err -= expected;
        CHECK(norm(err, s.model->domain()) < 0.05 * norm(expected, s.model->domain()));
    }
}

TEST_CASE("the enforcer term vanishes on forward solutions") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        InstantonProblem problem = small_problem(name);
        problem.set_debug_checks(true);
        const Trajectory theta = random_momentum(problem, 0.3, 5);
        CHECK_NOTHROW(problem.evaluate(theta));
    }
}

TEST_CASE("forward scheme converges at first order or better in dt") {
    const auto m = make_model("allencahn_boundary", {}, 33);
    const Field u0 = smooth_state(*m, {0.2}, 0.5);
    auto end_state = [&](int steps) {
        const TimeGrid grid(1.0, steps);
        Trajectory theta(grid.nodes(), 1, 33, 0.1);
        return integrate_forward(*m, theta, u0, grid).node(steps);
    };
    const Field ref = end_state(3200);
    const double e1 = norm(end_state(50) - ref, m->domain());
    const double e2 = norm(end_state(100) - ref, m->domain());
    CHECK(e1 / e2 > 1.8);
}

TEST_CASE("deterministic evolution relaxes to the stable state") {
    const auto m = make_model("doublewell1d_validation");
    Field u(1, 1, -0.3);
    const Field end = evolve(*m, u, 20.0, 0.05);
    CHECK(end(0, 0) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("forward solver reports non-finite states") {
    const auto m = make_model("doublewell1d_validation");
    const TimeGrid grid(1.0, 10);
    Trajectory theta(11, 1, 1);
    Field u0(1, 1, std::nan(""));
    CHECK_THROWS_AS(integrate_forward(*m, theta, u0, grid), SolverError);
    CHECK_THROWS_AS(integrate_forward(*m, Trajectory(5, 1, 1), Field(1, 1), grid), ShapeError);
}
