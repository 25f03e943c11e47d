#include "instanton/objective.hpp"

#include "instanton/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace instanton {

double action(const Model& model, const Trajectory& phi, const Trajectory& theta,
              const TimeGrid& grid) {
    if (!phi.same_shape(theta) || phi.nodes() != grid.nodes())
        throw ShapeError("action: trajectories not aligned with the time grid");
    const auto weights = model.domain().quadrature_weights();
    std::vector<double> density(static_cast<std::size_t>(grid.nodes()));
    for (int k = 0; k < grid.nodes(); ++k) {
        const Field t = theta.node(k);
        density[static_cast<std::size_t>(k)] =
            0.5 * inner_product(t, model.covariance_apply(phi.node(k), t), weights);
    }
    return time_quadrature(density, grid);
}

InstantonProblem::InstantonProblem(std::shared_ptr<const Model> model, TimeGrid grid, Field u0,
                                   Field target, EndpointFilter filter, double lambda)
    : model_(std::move(model)), grid_(grid), u0_(std::move(u0)), target_(std::move(target)),
      filter_(filter), lambda_(lambda), forward_(*model_, grid_), adjoint_(*model_, grid_) {
    model_->require_shape(u0_, "InstantonProblem");
    model_->require_shape(target_, "InstantonProblem");
    set_lambda(lambda);
}

void InstantonProblem::set_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
    lambda_ = lambda;
}

Trajectory InstantonProblem::zero_momentum() const {
    return Trajectory(grid_.nodes(), model_->components(), model_->domain().points);
}

double InstantonProblem::penalty_of(const Field& end, double* endpoint_error) const {
    const auto& domain = model_->domain();
    const Field r = filter_residual(filter_, end, target_, domain);
    const double sq = inner_product(r, r, domain);
    if (endpoint_error) *endpoint_error = std::sqrt(sq);
    return 0.5 * lambda_ * sq;
}

ObjectiveReport InstantonProblem::evaluate(const Trajectory& theta) const {
    ObjectiveReport report;
    report.phi = forward_.solve(theta, u0_);
    report.action = action(*model_, report.phi, theta, grid_);
    report.penalty = penalty_of(report.phi.node(grid_.steps()), &report.endpoint_error);
    report.value = report.action + report.penalty;

    AdjointSolution adj = adjoint_.solve(report.phi, theta, lambda_, filter_, target_);
    report.gradient = Trajectory(theta.nodes(), theta.components(), theta.points());
    for (int k = 0; k < grid_.nodes(); ++k) {
        const Field diff = theta.node(k) - adj.mu.node(k);
        report.gradient.set_node(k, model_->covariance_apply(report.phi.node(k), diff));
    }
    if (debug_) {
        const double enforcer = enforcer_term(report.phi, theta, adj.step_multipliers);
        if (!(std::abs(enforcer) <= 1e-8 * (1.0 + std::abs(report.value))))
            throw Error("forward/adjoint inconsistency: enforcer term " + std::to_string(enforcer));
    }
    report.mu = std::move(adj.mu);
    return report;
}

double InstantonProblem::value(const Trajectory& theta) const {
    const Trajectory phi = forward_.solve(theta, u0_);
    return action(*model_, phi, theta, grid_) + penalty_of(phi.node(grid_.steps()), nullptr);
}

double InstantonProblem::pairing(const Trajectory& x, const Trajectory& y) const {
    if (!x.same_shape(y) || x.nodes() != grid_.nodes())
        throw ShapeError("pairing: trajectories not aligned");
    const auto tw = grid_.trapezoid_weights();
    const auto sw = model_->domain().quadrature_weights();
    double sum = 0.0;
    for (int k = 0; k < x.nodes(); ++k) {
        auto a = x.node_values(k);
        auto b = y.node_values(k);
        double local = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) local += sw[i % sw.size()] * a[i] * b[i];
        sum += tw[static_cast<std::size_t>(k)] * local;
    }
    return sum;
}

double InstantonProblem::norm(const Trajectory& x) const { return std::sqrt(pairing(x, x)); }

std::vector<double> InstantonProblem::metric_weights() const {
    const auto tw = grid_.trapezoid_weights();
    const auto sw = model_->domain().quadrature_weights();
    const auto per_node = static_cast<std::size_t>(model_->components()) * sw.size();
    std::vector<double> w(tw.size() * per_node);
    for (std::size_t k = 0; k < tw.size(); ++k)
        for (std::size_t i = 0; i < per_node; ++i) w[k * per_node + i] = tw[k] * sw[i % sw.size()];
    return w;
}

double InstantonProblem::enforcer_term(const Trajectory& phi, const Trajectory& theta,
                                       const Trajectory& step_multipliers) const {
    const auto& domain = model_->domain();
    double sum = 0.0;
    for (int k = 0; k < grid_.steps(); ++k)
        sum += inner_product(step_multipliers.node(k + 1), forward_.step_residual(phi, theta, k),
                             domain);
    return sum;
}

ObjectiveReport reduced_objective(std::shared_ptr<const Model> model, const Trajectory& theta,
                                  const Field& u0, const Field& target, double lambda,
                                  const EndpointFilter& filter, const TimeGrid& grid) {
    InstantonProblem problem(std::move(model), grid, u0, target, filter, lambda);
    return problem.evaluate(theta);
}

NoiseTrajectory optimal_noise(const Model& model, const Trajectory& phi, const Trajectory& mu) {
    if (!phi.same_shape(mu)) throw ShapeError("optimal_noise: trajectories not aligned");
    NoiseTrajectory out{Trajectory(phi.nodes(), phi.components(), phi.points()),
                        !model.has_sigma()};
    for (int k = 0; k < phi.nodes(); ++k) {
        const Field u = phi.node(k);
        const Field m = mu.node(k);
        out.values.set_node(k, out.covariance_form ? model.covariance_apply(u, m)
                                                   : model.sigma_apply(u, m));
    }
    return out;
}

} // namespace instanton
