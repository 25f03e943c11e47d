#include "instanton/solver.hpp"

#include "instanton/errors.hpp"

#include <algorithm>
#include <cmath>

namespace instanton {

void OptimizerConfig::validate() const {
    lbfgs.validate();
    if (continuation) {
        if (!(continuation->lambda0 > 0.0))
            throw ConfigError("optimizer: continuation lambda0 must be positive");
        if (!(continuation->growth >= 1.0))
            throw ConfigError("optimizer: continuation growth must be >= 1");
        if (continuation->stages < 1)
            throw ConfigError("optimizer: continuation needs at least one stage");
    } else if (!(lambda > 0.0)) {
        throw ConfigError("optimizer: lambda must be positive");
    }
    if (warmup) {
        if (!(warmup->lambda > 0.0)) throw ConfigError("optimizer: warmup lambda must be positive");
        if (!(warmup->tol > 0.0)) throw ConfigError("optimizer: warmup tol must be positive");
        if (warmup->max_iters < 0)
            throw ConfigError("optimizer: warmup max_iters must be non-negative");
    }
}

std::vector<double> OptimizerConfig::lambda_schedule() const {
    if (!continuation) return {lambda};
    std::vector<double> out;
    double l = continuation->lambda0;
    for (int s = 0; s < continuation->stages; ++s, l *= continuation->growth) out.push_back(l);
    return out;
}

std::vector<Stage> OptimizerConfig::stages() const {
    std::vector<Stage> out;
    if (warmup) out.push_back({warmup->lambda, warmup->tol, warmup->max_iters, true});
    for (double l : lambda_schedule()) out.push_back({l, lbfgs.tol, lbfgs.max_iters, false});
    return out;
}

std::vector<double> hamiltonian_trace(const Model& model, const Trajectory& phi,
                                      const Trajectory& p) {
    if (!phi.same_shape(p)) throw ShapeError("hamiltonian_trace: trajectories not aligned");
    std::vector<double> h(static_cast<std::size_t>(phi.nodes()));
    for (int k = 0; k < phi.nodes(); ++k)
        h[static_cast<std::size_t>(k)] = hamiltonian(model, phi.node(k), p.node(k));
    return h;
}

Trajectory shift_by_one_node(const Trajectory& theta) {
    Trajectory out(theta.nodes(), theta.components(), theta.points());
    for (int k = 1; k < theta.nodes(); ++k) {
        auto src = theta.node_values(k - 1);
        std::copy(src.begin(), src.end(), out.node_values(k).begin());
    }
    return out;
}

namespace {

Trajectory as_trajectory(const InstantonProblem& problem, const std::vector<double>& x) {
    Trajectory t = problem.zero_momentum();
    std::copy(x.begin(), x.end(), t.values().begin());
    return t;
}

} // namespace

InstantonResult solve_instanton(InstantonProblem& problem, const OptimizerConfig& config,
                                const SolverCheckpoint* resume_from,
                                const CheckpointCallback& on_iteration) {
    config.validate();
    problem.set_debug_checks(config.debug_checks);
    const auto schedule = config.stages();
    const auto metric = problem.metric_weights();

    auto objective = [&problem](const std::vector<double>& x) {
        ObjectiveReport r = problem.evaluate(as_trajectory(problem, x));
        Evaluation e;
        e.value = r.value;
        const auto g = r.gradient.values();
        e.gradient.assign(g.begin(), g.end());
        e.aux = {r.action, r.endpoint_error};
        return e;
    };

    InstantonResult result;
    SolverCheckpoint progress;
    int first_stage = 0;
    std::vector<double> x(problem.zero_momentum().values().size(), 0.0);
    if (resume_from) {
        if (resume_from->stage < 0 || resume_from->stage >= static_cast<int>(schedule.size()))
            throw ConfigError("checkpoint stage does not match the lambda schedule");
        progress = *resume_from;
        first_stage = resume_from->stage;
    }

    for (int stage = first_stage; stage < static_cast<int>(schedule.size()); ++stage) {
        const Stage& spec = schedule[static_cast<std::size_t>(stage)];
        const double lambda = spec.lambda;
        problem.set_lambda(lambda);
        LbfgsOptions options = config.lbfgs;
        options.tol = spec.tol;
        options.max_iters = spec.max_iters;
        Lbfgs optimizer(options, metric);
        if (problem.model().projects_momentum()) {
            const std::size_t width = problem.zero_momentum().node_size();
            optimizer.set_projector([&problem, width](std::vector<double>& d) {
                const Model& model = problem.model();
                Field f = model.zero_field();
                for (std::size_t k = 0; k < d.size(); k += width) {
                    std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(k), width,
                                f.values().begin());
                    model.project_momentum(f);
                    std::copy(f.values().begin(), f.values().end(),
                              d.begin() + static_cast<std::ptrdiff_t>(k));
                }
            });
        }
        progress.stage = stage;

        auto record = [&](const LbfgsState& st) {
            const IterationRecord& rec = st.history.back();
            progress.history.push_back({stage, rec.iteration, lambda, rec.value, rec.grad_norm,
                                        rec.aux.at(0), rec.aux.at(1)});
        };
        auto callback = [&](const LbfgsState& st) {
            record(st);
            if (on_iteration) {
                progress.state = st;
                on_iteration(progress);
            }
        };

        LbfgsResult run;
        if (resume_from && stage == first_stage) {
            run = optimizer.resume(objective, resume_from->state, callback);
        } else {
            // Warm start: re-evaluate at the previous stage's theta with the new lambda.
            LbfgsState start;
            start.x = x;
            start.current = objective(x);
            start.history.push_back({0, start.current.value, optimizer.norm(start.current.gradient),
                                     start.current.aux});
            record(start);
            progress.evaluations += 1;
            run = optimizer.resume(objective, std::move(start), callback);
        }
        progress.evaluations += run.evaluations;
        x = run.state.x;
        const IterationRecord& last = run.state.history.back();
        progress.completed.push_back({lambda, spec.warmup, run.status, run.state.iteration,
                                      last.aux.at(0), last.aux.at(1)});
        result.status = run.status;
        result.grad_norm = run.grad_norm;
        // A warmup only seeds theta; its status does not end the solve.
        if (!spec.warmup && run.status == OptimizerStatus::linesearch_failure) break;
    }

    result.theta = as_trajectory(problem, x);
    result.lambda = problem.lambda();
    const ObjectiveReport final_report = problem.evaluate(result.theta);
    result.phi = final_report.phi;
    result.mu = final_report.mu;
    result.value = final_report.value;
    result.action = final_report.action;
    result.penalty = final_report.penalty;
    result.endpoint_error = final_report.endpoint_error;
    result.hamiltonian = hamiltonian_trace(problem.model(), result.phi, result.mu);
    result.history = std::move(progress.history);
    result.stages = std::move(progress.completed);
    result.evaluations = progress.evaluations;
    for (const auto& s : result.stages) result.iterations += s.iterations;
    try {
        result.time_shift_sensitivity = problem.value(shift_by_one_node(result.theta)) - result.value;
    } catch (const Error&) {
        result.time_shift_sensitivity = std::nan("");
    }
    return result;
}

} // namespace instanton
