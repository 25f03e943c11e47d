#include "instanton/forward.hpp"

#include "fixed_point.hpp"
#include "point_implicit.hpp"
#include "instanton/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace instanton {

ForwardSolver::ForwardSolver(const Model& model, const TimeGrid& grid)
    : model_(model), grid_(grid), prop_(model, grid.dt()) {}

Field ForwardSolver::explicit_part(const Field& phi_k, const Field& forcing_k) const {
    if (!prop_.spatial()) {
        Field x = phi_k;
        x.axpy(0.5 * grid_.dt(), forcing_k);
        return x;
    }
    return prop_.step(phi_k, model_.nonlinear(phi_k), forcing_k);
}

Field ForwardSolver::implicit_map(const Field& base, const Field& x,
                                  const Field& theta_next) const {
    Field out = base;
    const Field forcing = model_.covariance_apply(x, theta_next);
    if (prop_.spatial()) {
        out.axpy(0.5 * grid_.dt(), prop_.smooth(forcing));
    } else {
        out.axpy(0.5 * grid_.dt(), forcing);
        out.axpy(grid_.dt(), model_.nonlinear(x));
    }
    return out;
}

Trajectory ForwardSolver::solve(const Trajectory& theta, const Field& u0) const {
    model_.require_shape(u0, "integrate_forward");
    if (theta.nodes() != grid_.nodes() || !theta.matches(u0))
        throw ShapeError("integrate_forward: theta must have Nt+1 nodes shaped like u0");
    if (!u0.all_finite()) throw SolverError("integrate_forward: non-finite initial state", 0);
    model_.check_state(u0, 0);

    Trajectory phi(grid_.nodes(), u0.components(), u0.points());
    phi.set_node(0, u0);
    Field current = u0;
    Field forcing = model_.covariance_apply(current, theta.node(0));
    const bool explicit_step = prop_.spatial() && model_.additive_noise();

    for (int k = 0; k < grid_.steps(); ++k) {
        const Field theta_next = theta.node(k + 1);
        const Field base = explicit_part(current, forcing);
        Field next;
        if (explicit_step) {
            next = implicit_map(base, current, theta_next);
        } else if (!prop_.spatial()) {
            next = detail::solve_point_step(model_, base, theta_next, grid_.dt(), current, k + 1,
                                            "integrate_forward");
        } else {
            auto g = [&](const Field& x) { return implicit_map(base, x, theta_next); };
            next = detail::solve_fixed_point(g, g(base), k + 1,
                                             "integrate_forward");
        }
        if (!next.all_finite()) throw SolverError("integrate_forward: solver blow-up", k + 1);
        model_.check_state(next, k + 1);
        phi.set_node(k + 1, next);
        forcing = model_.covariance_apply(next, theta_next);
        current = std::move(next);
    }
    return phi;
}

Field ForwardSolver::step_residual(const Trajectory& phi, const Trajectory& theta, int k) const {
    const Field phi_k = phi.node(k);
    const Field phi_next = phi.node(k + 1);
    const Field base = explicit_part(phi_k, model_.covariance_apply(phi_k, theta.node(k)));
    return phi_next - implicit_map(base, phi_next, theta.node(k + 1));
}

Trajectory integrate_forward(const Model& model, const Trajectory& theta, const Field& u0,
                             const TimeGrid& grid) {
    return ForwardSolver(model, grid).solve(theta, u0);
}

Field evolve(const Model& model, Field u, double duration, double max_dt) {
    model.require_shape(u, "evolve");
    if (!(duration >= 0.0) || !(max_dt > 0.0)) throw std::invalid_argument("evolve: bad duration");
    if (duration == 0.0) return u;
    const int steps = static_cast<int>(std::ceil(duration / max_dt - 1e-12));
    const double dt = duration / steps;
    const LinearPropagator prop(model, dt);
    const Field zero = model.zero_field();
    for (int k = 0; k < steps; ++k) {
        if (prop.spatial())
            u = prop.step(u, model.nonlinear(u));
        else
            u = detail::solve_point_step(model, u, zero, dt, u, k + 1, "evolve");
        if (!u.all_finite()) throw SolverError("evolve: blow-up", k + 1);
        model.check_state(u, k + 1);
    }
    return u;
}

} // namespace instanton
