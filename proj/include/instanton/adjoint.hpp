#pragma once

#include "instanton/field.hpp"
#include "instanton/forward.hpp"
#include "instanton/grid.hpp"
#include "instanton/model.hpp"

namespace instanton {

/// Backward solution of the adjoint equation.
struct AdjointSolution {
    /// Adjoint state at every node; the reduced gradient is a(phi_k)(theta_k - mu_k).
    Trajectory mu;
    /// Multipliers of the individual forward steps (node k pairs with the
    /// step ending at k; node 0 is unused and zero).
    Trajectory step_multipliers;
};

/// Exact discrete adjoint of ForwardSolver for the penalised cost
///   J = sum_k w_k 1/2 <theta_k, a(phi_k) theta_k> + lambda/2 |F(phi_N - uT)|^2
/// with trapezoid weights w_k. The step multipliers nu_k solve
///   nu_N - dt/2 V_N(B^* nu_N) = -lambda F*F(phi_N - uT) - w_N/2 V_N(theta_N),
///   nu_k - dt/2 V_k(B^* nu_k) = E^* nu_{k+1} + N'(phi_k)^* P^* nu_{k+1}
///                              + dt/2 V_k(A^* nu_{k+1}) - w_k/2 V_k(theta_k),
/// where V_k(v) is the covariance variation at phi_k against theta_k (plus
/// -dt b'(phi_k)^* for point models), and
///   mu_0 = A^* nu_1,  mu_k = (A^* nu_{k+1} + B^* nu_k) / 2,  mu_N = B^* nu_N.
/// This discretises
///   mu' = -(b'(phi))^* mu - 1/2 a'(phi)[mu, mu] + 1/2 a'(phi)[theta - mu, theta - mu]
/// backward in time, with mu(T) = -lambda F*F(phi(T) - uT) up to O(dt).
class AdjointSolver {
public:
    AdjointSolver(const Model& model, const TimeGrid& grid);

    AdjointSolution solve(const Trajectory& phi, const Trajectory& theta, double lambda,
                          const EndpointFilter& filter, const Field& target) const;

private:
    Field solve_implicit(const Field& phi_k, const Field& theta_k, const Field& rhs,
                         int k) const;

    const Model& model_;
    TimeGrid grid_;
    LinearPropagator prop_;
};

/// Returns mu only.
Trajectory integrate_backward(const Model& model, const Trajectory& phi, const Trajectory& theta,
                              double lambda, const EndpointFilter& filter, const Field& target,
                              const TimeGrid& grid);

} // namespace instanton
