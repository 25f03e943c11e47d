#pragma once

#include <deque>
#include <functional>
#include <string_view>
#include <vector>

namespace instanton {

struct LbfgsOptions {
    double tol = 1e-4;       ///< stop when the gradient norm drops to this
    int max_iters = 1000;
    int memory = 10;
    double c1 = 1e-4;        ///< sufficient decrease
    double c2 = 0.9;         ///< curvature
    int max_linesearch = 40; ///< objective evaluations per line search

    void validate() const;
};

enum class OptimizerStatus { converged, max_iters, linesearch_failure };

std::string_view to_string(OptimizerStatus status);

/// Objective value with its gradient, expressed as the Riesz representer in
/// the optimizer's weighted inner product. `aux` carries caller diagnostics.
struct Evaluation {
    double value = 0.0;
    std::vector<double> gradient;
    std::vector<double> aux;
};

struct IterationRecord {
    int iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0;
    std::vector<double> aux;
};

/// Everything needed to continue a run bit-identically.
struct LbfgsState {
    int iteration = 0;
    std::vector<double> x;
    Evaluation current;
    std::deque<std::vector<double>> s;
    std::deque<std::vector<double>> y;
    std::vector<IterationRecord> history;
};

struct LbfgsResult {
    LbfgsState state;
    OptimizerStatus status = OptimizerStatus::max_iters;
    double grad_norm = 0.0;
    int evaluations = 0;
};

using ObjectiveFunction = std::function<Evaluation(const std::vector<double>&)>;
using IterationCallback = std::function<void(const LbfgsState&)>;
/// Maps a search direction into the subspace the objective depends on.
using DirectionProjector = std::function<void(std::vector<double>&)>;

/// Limited-memory BFGS in the inner product <a, b> = sum_i m_i a_i b_i, with a
/// strong-Wolfe line search. Curvature pairs with <s, y> <= 0 are skipped; a
/// non-descent direction triggers a steepest-descent restart. An objective
/// that throws instanton::Error is treated as +inf (step too long).
class Lbfgs {
public:
    Lbfgs(LbfgsOptions options, std::vector<double> metric);

    LbfgsResult minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                         const IterationCallback& on_iteration = {}) const;
    LbfgsResult resume(const ObjectiveFunction& objective, LbfgsState state,
                       const IterationCallback& on_iteration = {}) const;

    /// Applied to every search direction. Without it, rounding in the
    /// two-loop recursion can seed components along flat directions that no
    /// gradient difference ever removes, and they grow from step to step.
    void set_projector(DirectionProjector projector) { projector_ = std::move(projector); }

    double inner(const std::vector<double>& a, const std::vector<double>& b) const;
    double norm(const std::vector<double>& a) const;

private:
    struct LineSearchOutcome {
        bool accepted = false;
        double step = 0.0;
        Evaluation eval;
        int evaluations = 0;
    };

    LbfgsResult run(const ObjectiveFunction& objective, LbfgsState state, int evaluations,
                    const IterationCallback& on_iteration) const;
    std::vector<double> direction(const LbfgsState& state) const;
    LineSearchOutcome line_search(const ObjectiveFunction& objective,
                                  const std::vector<double>& x, const Evaluation& at_x,
                                  const std::vector<double>& d, double initial_step) const;

    LbfgsOptions options_;
    std::vector<double> metric_;
    DirectionProjector projector_;
};

/// Convenience wrapper with unit metric.
LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                           const LbfgsOptions& options);

} // namespace instanton
