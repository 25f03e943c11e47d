#include "instanton/adjoint.hpp"

#include "fixed_point.hpp"
#include "point_implicit.hpp"
#include "instanton/errors.hpp"

namespace instanton {

// Negative-control builds flip the sign of the endpoint error term.
#ifdef INSTANTON_FLIP_TERMINAL_SIGN
constexpr double kTerminalSign = 1.0;
#else
constexpr double kTerminalSign = -1.0;
#endif

AdjointSolver::AdjointSolver(const Model& model, const TimeGrid& grid)
    : model_(model), grid_(grid), prop_(model, grid.dt()) {}

Field AdjointSolver::solve_implicit(const Field& phi_k, const Field& theta_k, const Field& rhs,
                                    int k) const {
    const bool spatial = prop_.spatial();
    if (spatial && model_.additive_noise()) return rhs;
    const double dt = grid_.dt();
    if (!spatial) return detail::solve_point_adjoint(model_, phi_k, theta_k, dt, rhs);
    auto g = [&](const Field& nu) {
        Field out = rhs;
        if (!model_.additive_noise())
            out.axpy(0.5 * dt, model_.covariance_variation(phi_k, prop_.smooth_adjoint(nu), theta_k));
        return out;
    };
    return detail::solve_fixed_point(g, rhs, k, "integrate_backward");
}

AdjointSolution AdjointSolver::solve(const Trajectory& phi, const Trajectory& theta,
                                     double lambda, const EndpointFilter& filter,
                                     const Field& target) const {
    const int n = grid_.steps();
    if (phi.nodes() != grid_.nodes() || !theta.same_shape(phi))
        throw ShapeError("integrate_backward: phi and theta must have Nt+1 aligned nodes");
    model_.require_shape(target, "integrate_backward");

    const double dt = grid_.dt();
    const auto w = grid_.trapezoid_weights();
    const auto& domain = model_.domain();
    const bool additive = model_.additive_noise();

    AdjointSolution out{Trajectory(phi.nodes(), phi.components(), phi.points()),
                        Trajectory(phi.nodes(), phi.components(), phi.points())};

    Field phi_k = phi.node(n);
    Field theta_k = theta.node(n);
    Field rhs = filter.apply(filter_residual(filter, phi_k, target, domain), domain);
    rhs *= kTerminalSign * lambda;
    if (!additive)
        rhs.axpy(-0.5 * w[static_cast<std::size_t>(n)],
                 model_.covariance_variation(phi_k, theta_k, theta_k));
    Field nu = solve_implicit(phi_k, theta_k, rhs, n);
    if (!nu.all_finite()) throw SolverError("integrate_backward: solver blow-up", n);
    out.step_multipliers.set_node(n, nu);
    out.mu.set_node(n, prop_.smooth_adjoint(nu));

    for (int j = n - 1; j >= 0; --j) {
        phi_k = phi.node(j);
        theta_k = theta.node(j);
        auto parts = prop_.adjoint_split(nu);
        if (j == 0) {
            out.mu.set_node(0, parts.a);
            break;
        }
        Field next_rhs = parts.e;
        if (prop_.spatial()) next_rhs += model_.nonlinear_jacobian_adjoint(phi_k, parts.p);
        if (!additive) {
            next_rhs.axpy(0.5 * dt, model_.covariance_variation(phi_k, parts.a, theta_k));
            next_rhs.axpy(-0.5 * w[static_cast<std::size_t>(j)],
                          model_.covariance_variation(phi_k, theta_k, theta_k));
        }
        Field nu_j = solve_implicit(phi_k, theta_k, next_rhs, j);
        if (!nu_j.all_finite()) throw SolverError("integrate_backward: solver blow-up", j);
        out.step_multipliers.set_node(j, nu_j);
        Field mu_j = parts.a + prop_.smooth_adjoint(nu_j);
        mu_j *= 0.5;
        out.mu.set_node(j, mu_j);
        nu = std::move(nu_j);
    }
    return out;
}

Trajectory integrate_backward(const Model& model, const Trajectory& phi, const Trajectory& theta,
                              double lambda, const EndpointFilter& filter, const Field& target,
                              const TimeGrid& grid) {
    return AdjointSolver(model, grid).solve(phi, theta, lambda, filter, target).mu;
}

} // namespace instanton
