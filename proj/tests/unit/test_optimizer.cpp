#include "instanton/errors.hpp"
#include "instanton/lbfgs.hpp"
#include "instanton/solver.hpp"
#include "instanton/presets.hpp"

#include <doctest.h>

#include <cmath>

using namespace instanton;

namespace {

Evaluation quadratic(const std::vector<double>& x, const std::vector<double>& target,
                     const std::vector<double>& scales) {
    Evaluation e;
    e.gradient.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - target[i];
        e.value += 0.5 * scales[i] * d * d;
        e.gradient[i] = scales[i] * d;
    }
    return e;
}

Evaluation rosenbrock(const std::vector<double>& x) {
    Evaluation e;
    e.gradient.assign(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        e.value += 100.0 * a * a + b * b;
        e.gradient[i] += -400.0 * x[i] * a - 2.0 * b;
        e.gradient[i + 1] += 200.0 * a;
    }
    return e;
}

} // namespace

TEST_CASE("isotropic quadratic converges within five iterations") {
    const std::vector<double> target = {1.0, -2.0, 0.5, 3.0};
    LbfgsOptions o;
    o.tol = 1e-10;
    o.memory = 1;
    const auto r = lbfgs_minimize(
        [&](const std::vector<double>& x) { return quadratic(x, target, {1, 1, 1, 1}); },
        std::vector<double>(4, 0.0), o);
    CHECK(r.status == OptimizerStatus::converged);
    CHECK(r.state.iteration <= 5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.state.x[i] == doctest::Approx(target[i]));
}

TEST_CASE("ill-conditioned quadratic and Rosenbrock") {
    LbfgsOptions o;
    o.tol = 1e-8;
    o.max_iters = 500;
    const std::vector<double> target = {1.0, 2.0, 3.0};
    const auto q = lbfgs_minimize(
        [&](const std::vector<double>& x) { return quadratic(x, target, {1, 100, 1e4}); },
        std::vector<double>(3, 0.0), o);
    CHECK(q.status == OptimizerStatus::converged);
    CHECK(q.grad_norm <= 1e-8);

    const auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0, -0.5, 0.8}, o);
    CHECK(r.status == OptimizerStatus::converged);
    for (double v : r.state.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("accepted steps never increase the objective") {
    LbfgsOptions o;
    o.tol = 1e-9;
    o.max_iters = 300;
    const auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0, 0.3}, o);
    REQUIRE(r.state.history.size() > 2);
    for (std::size_t i = 1; i < r.state.history.size(); ++i)
        CHECK(r.state.history[i].value <= r.state.history[i - 1].value);
}

TEST_CASE("weighted inner product changes the gradient norm, not the minimiser") {
    const std::vector<double> metric = {0.5, 2.0};
    LbfgsOptions o;
    o.tol = 1e-10;
    const Lbfgs solver(o, metric);
    CHECK(solver.norm({1.0, 1.0}) == doctest::Approx(std::sqrt(2.5)));
    // Riesz representer of d/dx (x - t)^2 / 2 sums in the metric: g_i / m_i.
    const auto r = solver.minimize(
        [&](const std::vector<double>& x) {
            Evaluation e = quadratic(x, {3.0, -1.0}, {1.0, 1.0});
            for (std::size_t i = 0; i < 2; ++i) e.gradient[i] /= metric[i];
            return e;
        },
        {0.0, 0.0});
    CHECK(r.status == OptimizerStatus::converged);
    CHECK(r.state.x[0] == doctest::Approx(3.0));
    CHECK(r.state.x[1] == doctest::Approx(-1.0));
}

TEST_CASE("resume continues bit-identically") {
    LbfgsOptions o;
    o.tol = 1e-10;
    o.max_iters = 400;
    const Lbfgs solver(o, std::vector<double>(3, 1.0));
    const auto full = solver.minimize(rosenbrock, {-1.2, 1.0, 0.3});

    LbfgsOptions shorter = o;
    shorter.max_iters = 10;
    const auto partial = Lbfgs(shorter, std::vector<double>(3, 1.0)).minimize(rosenbrock, {-1.2, 1.0, 0.3});
    CHECK(partial.status == OptimizerStatus::max_iters);
    const auto resumed = solver.resume(rosenbrock, partial.state);
    CHECK(resumed.status == full.status);
    CHECK(resumed.state.iteration == full.state.iteration);
    for (std::size_t i = 0; i < 3; ++i) CHECK(resumed.state.x[i] == full.state.x[i]);
}

TEST_CASE("direction projector keeps iterates in the active subspace") {
    // f depends on x0 + x1 only; the projector maps onto span{(1, 1)}.
    LbfgsOptions o;
    o.tol = 1e-10;
    Lbfgs solver(o, {1.0, 1.0});
    solver.set_projector([](std::vector<double>& d) {
        const double m = 0.5 * (d[0] + d[1]);
        d = {m, m};
    });
    const auto r = solver.minimize(
        [](const std::vector<double>& x) {
            const double s = x[0] + x[1] - 3.0;
            Evaluation e;
            e.value = 0.5 * s * s * s * s + 0.5 * s * s;
            const double ds = 2.0 * s * s * s + s;
            e.gradient = {ds, ds};
            return e;
        },
        {0.25, 0.25});
    CHECK(r.status == OptimizerStatus::converged);
    CHECK(r.state.x[0] == r.state.x[1]);
    CHECK(r.state.x[0] == doctest::Approx(1.5));
}

TEST_CASE("objective failures shorten the step instead of aborting") {
    LbfgsOptions o;
    o.tol = 1e-8;
    // Undefined for x > 2: the line search must back off.
    const auto r = lbfgs_minimize(
        [](const std::vector<double>& x) {
            if (x[0] > 2.0) throw SolverError("outside the domain", 0);
            return quadratic(x, {1.5}, {1.0});
        },
        {-30.0}, o);
    CHECK(r.status == OptimizerStatus::converged);
    CHECK(r.state.x[0] == doctest::Approx(1.5));
}

TEST_CASE("optimizer options are validated") {
    LbfgsOptions o;
    o.c1 = 0.95;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = {};
    o.tol = 0.0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    OptimizerConfig c;
    c.continuation = Continuation{1.0, 0.5, 3};
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("stage schedule") {
    OptimizerConfig c;
    c.lambda = 7.0;
    auto stages = c.stages();
    REQUIRE(stages.size() == 1);
    CHECK(stages[0].lambda == 7.0);

    c.continuation = Continuation{2.0, 10.0, 3};
    c.warmup = Warmup{25.0, 1e-2, 300};
    stages = c.stages();
    REQUIRE(stages.size() == 4);
    CHECK(stages[0].warmup);
    CHECK(stages[0].lambda == 25.0);
    CHECK(stages[1].lambda == 2.0);
    CHECK(stages[3].lambda == doctest::Approx(200.0));
}

TEST_CASE("double-well validation instanton") {
    const ModelPreset p = preset("doublewell1d_validation");
    InstantonProblem problem = p.problem();
    const InstantonResult r = solve_instanton(problem, p.optimizer());
    CHECK(r.status == OptimizerStatus::converged);
    CHECK(r.grad_norm <= p.tol);
    // Quasipotential oracle: 2 (V(0) - V(-1)) = 1/2.
    CHECK(r.action == doctest::Approx(0.5).epsilon(0.05));
    CHECK(r.hamiltonian.size() == static_cast<std::size_t>(p.Nt + 1));
    CHECK_FALSE(r.history.empty());
}

TEST_CASE("continuation over lambda reaches the final penalty") {
    const ModelPreset p = preset("doublewell1d_validation");
    InstantonProblem problem = p.problem();
    OptimizerConfig c = p.optimizer();
    c.continuation = Continuation{1.0, 10.0, 2};
    const InstantonResult r = solve_instanton(problem, c);
    CHECK(r.lambda == 10.0);
    CHECK(r.stages.size() == 2);
    CHECK(r.stages[0].lambda == 1.0);
    CHECK(r.status == OptimizerStatus::converged);
}

TEST_CASE("solver resume from a checkpoint matches the uninterrupted run") {
    const ModelPreset p = preset("doublewell1d_validation");
    InstantonProblem problem = p.problem();
    const InstantonResult full = solve_instanton(problem, p.optimizer());

    std::optional<SolverCheckpoint> saved;
    struct Interrupt {};
    InstantonProblem again = p.problem();
    try {
        solve_instanton(again, p.optimizer(), nullptr, [&](const SolverCheckpoint& cp) {
            if (cp.state.iteration == 15) {
                saved = cp;
                throw Interrupt{};
            }
        });
    } catch (const Interrupt&) {
    }
    REQUIRE(saved.has_value());
    InstantonProblem resumed_problem = p.problem();
    const InstantonResult resumed = solve_instanton(resumed_problem, p.optimizer(), &*saved);
    CHECK(resumed.status == full.status);
    CHECK(std::abs(resumed.action - full.action) <= 1e-8);
    CHECK(resumed.iterations == full.iterations);
}

TEST_CASE("boundary-noise momentum stays in the covariance range") {
    PresetOverrides o;
    o.Nx = 33;
    o.Nt = 40;
    o.T = 2.0;
    const ModelPreset p = preset("allencahn_boundary", o);
    InstantonProblem problem = p.problem();
    OptimizerConfig c = p.optimizer();
    c.lbfgs.max_iters = 30;
    const InstantonResult r = solve_instanton(problem, c);
    REQUIRE(r.iterations > 0);
    for (int k = 0; k < r.theta.nodes(); ++k) {
        const Field t = r.theta.node(k);
        Field pt = t;
        p.model->project_momentum(pt);
        for (int i = 0; i < t.points(); ++i)
            CHECK(pt(0, i) == doctest::Approx(t(0, i)).epsilon(1e-9).scale(1e-12));
    }
}
