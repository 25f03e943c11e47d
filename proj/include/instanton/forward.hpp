#pragma once

#include "instanton/field.hpp"
#include "instanton/grid.hpp"
#include "instanton/model.hpp"
#include "instanton/propagator.hpp"

namespace instanton {

/// Integrates the first Hamilton equation  phi' = b(phi) + a(phi) theta  from
/// phi(0) = u0.
///
/// Spatial models: exponential Euler for L u + N(u), with the forcing
/// f = a(phi) theta interpolated linearly over the step and integrated exactly
/// against the linear semigroup,
///   phi_{k+1} = E phi_k + P N(phi_k) + dt/2 (A f_k + B f_{k+1})
/// (see LinearPropagator). Point models: implicit Euler for b with the
/// trapezoid forcing,
///   phi_{k+1} - dt b(phi_{k+1}) = phi_k + dt/2 (f_k + f_{k+1}).
/// The implicit point step is solved by Newton's method; the implicit forcing
/// of spatial multiplicative models by damped fixed-point iteration. Both
/// forcings pair exactly with trapezoid time weights in the discrete adjoint.
class ForwardSolver {
public:
    ForwardSolver(const Model& model, const TimeGrid& grid);

    const Model& model() const noexcept { return model_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    const LinearPropagator& propagator() const noexcept { return prop_; }

    Trajectory solve(const Trajectory& theta, const Field& u0) const;

    /// R_k: residual of step k -> k+1 evaluated on given trajectories.
    Field step_residual(const Trajectory& phi, const Trajectory& theta, int k) const;

private:
    Field explicit_part(const Field& phi_k, const Field& forcing_k) const;
    Field implicit_map(const Field& base, const Field& x, const Field& theta_next) const;

    const Model& model_;
    TimeGrid grid_;
    LinearPropagator prop_;
};

Trajectory integrate_forward(const Model& model, const Trajectory& theta, const Field& u0,
                             const TimeGrid& grid);

/// Deterministic evolution (theta = 0) over `duration` with the forward
/// scheme, using the largest step <= max_dt that divides the duration.
Field evolve(const Model& model, Field u, double duration, double max_dt);

} // namespace instanton
