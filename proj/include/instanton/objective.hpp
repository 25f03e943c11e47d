#pragma once

#include "instanton/adjoint.hpp"
#include "instanton/field.hpp"
#include "instanton/forward.hpp"
#include "instanton/grid.hpp"
#include "instanton/model.hpp"

#include <memory>
#include <vector>

namespace instanton {

struct ObjectiveReport {
    double value = 0.0;   ///< J = action + penalty
    double action = 0.0;
    double penalty = 0.0;
    double endpoint_error = 0.0;  ///< |F(phi(T) - uT)|
    Trajectory gradient;          ///< a(phi_k)(theta_k - mu_k)
    Trajectory phi;
    Trajectory mu;
};

/// 1/2 int <theta, a(phi) theta> dt, trapezoid in time.
double action(const Model& model, const Trajectory& phi, const Trajectory& theta,
              const TimeGrid& grid);

/// The penalised transition problem u0 -> F uT over [0, T] for one model.
/// The reduced objective is a function of the momentum trajectory theta only;
/// gradients are Riesz representers for the pairing
///   <<x, y>> = sum_k w_k <x_k, y_k>   (trapezoid w_k, spatial quadrature).
class InstantonProblem {
public:
    InstantonProblem(std::shared_ptr<const Model> model, TimeGrid grid, Field u0, Field target,
                     EndpointFilter filter, double lambda);

    const Model& model() const noexcept { return *model_; }
    std::shared_ptr<const Model> model_ptr() const noexcept { return model_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    const Field& initial_state() const noexcept { return u0_; }
    const Field& target() const noexcept { return target_; }
    const EndpointFilter& filter() const noexcept { return filter_; }
    double lambda() const noexcept { return lambda_; }
    void set_lambda(double lambda);

    /// Re-evaluates the dropped enforcer term and throws on inconsistency.
    void set_debug_checks(bool enabled) noexcept { debug_ = enabled; }

    Trajectory zero_momentum() const;

    ObjectiveReport evaluate(const Trajectory& theta) const;
    /// J only (forward solve, no adjoint).
    double value(const Trajectory& theta) const;

    double pairing(const Trajectory& x, const Trajectory& y) const;
    double norm(const Trajectory& x) const;
    /// Per-entry weights of the pairing for a flattened trajectory.
    std::vector<double> metric_weights() const;

    /// sum_k <nu_{k+1}, R_k>: the discrete first-Hamilton-equation enforcer.
    double enforcer_term(const Trajectory& phi, const Trajectory& theta,
                         const Trajectory& step_multipliers) const;

    const ForwardSolver& forward_solver() const noexcept { return forward_; }
    const AdjointSolver& adjoint_solver() const noexcept { return adjoint_; }

private:
    double penalty_of(const Field& end, double* endpoint_error) const;

    std::shared_ptr<const Model> model_;
    TimeGrid grid_;
    Field u0_;
    Field target_;
    EndpointFilter filter_;
    double lambda_;
    bool debug_ = false;
    ForwardSolver forward_;
    AdjointSolver adjoint_;
};

ObjectiveReport reduced_objective(std::shared_ptr<const Model> model, const Trajectory& theta,
                                  const Field& u0, const Field& target, double lambda,
                                  const EndpointFilter& filter, const TimeGrid& grid);

struct NoiseTrajectory {
    Trajectory values;
    /// Set when the model defines no sigma and the values are a(phi) mu.
    bool covariance_form = false;
};

/// sigma(phi_k) mu_k at every node (a(phi_k) mu_k for covariance-only models).
NoiseTrajectory optimal_noise(const Model& model, const Trajectory& phi, const Trajectory& mu);

} // namespace instanton
