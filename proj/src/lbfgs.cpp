#include "instanton/lbfgs.hpp"

#include "instanton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace instanton {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& d) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * d[i];
    return out;
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

// Minimiser of the cubic through (a, fa, da), (b, fb, db); NaN if degenerate.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

} // namespace

void LbfgsOptions::validate() const {
    if (!(tol > 0.0)) throw ConfigError("optimizer: tol must be positive");
    if (max_iters < 0) throw ConfigError("optimizer: max_iters must be non-negative");
    if (memory < 1) throw ConfigError("optimizer: lbfgs_memory must be at least 1");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0))
        throw ConfigError("optimizer: Wolfe constants need 0 < c1 < c2 < 1");
    if (max_linesearch < 1) throw ConfigError("optimizer: max_linesearch must be at least 1");
}

std::string_view to_string(OptimizerStatus status) {
    switch (status) {
    case OptimizerStatus::converged: return "converged";
    case OptimizerStatus::max_iters: return "max_iters";
    case OptimizerStatus::linesearch_failure: return "linesearch_failure";
    }
    return "unknown";
}

Lbfgs::Lbfgs(LbfgsOptions options, std::vector<double> metric)
    : options_(options), metric_(std::move(metric)) {
    options_.validate();
    for (double m : metric_)
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("Lbfgs: metric weights must be positive");
}

double Lbfgs::inner(const std::vector<double>& a, const std::vector<double>& b) const {
    if (a.size() != metric_.size() || b.size() != metric_.size())
        throw ShapeError("Lbfgs: vector size does not match the metric");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += metric_[i] * a[i] * b[i];
    return sum;
}

double Lbfgs::norm(const std::vector<double>& a) const { return std::sqrt(inner(a, a)); }

LbfgsResult Lbfgs::minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                            const IterationCallback& on_iteration) const {
    LbfgsState state;
    state.x = std::move(x0);
    state.current = objective(state.x);
    if (!std::isfinite(state.current.value))
        throw SolverError("objective not finite at the initial point", -1);
    state.history.push_back({0, state.current.value, norm(state.current.gradient),
                             state.current.aux});
    return run(objective, std::move(state), 1, on_iteration);
}

LbfgsResult Lbfgs::resume(const ObjectiveFunction& objective, LbfgsState state,
                          const IterationCallback& on_iteration) const {
    if (state.x.size() != metric_.size() || state.current.gradient.size() != metric_.size() ||
        state.s.size() != state.y.size())
        throw ShapeError("Lbfgs: checkpoint does not match the problem size");
    return run(objective, std::move(state), 0, on_iteration);
}

std::vector<double> Lbfgs::direction(const LbfgsState& state) const {
    std::vector<double> q = state.current.gradient;
    const std::size_t m = state.s.size();
    std::vector<double> alpha(m), rho(m);
    for (std::size_t j = m; j-- > 0;) {
        rho[j] = 1.0 / inner(state.s[j], state.y[j]);
        alpha[j] = rho[j] * inner(state.s[j], q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * state.y[j][i];
    }
    if (m > 0) {
        const double gamma = inner(state.s[m - 1], state.y[m - 1]) /
                             inner(state.y[m - 1], state.y[m - 1]);
        for (double& v : q) v *= gamma;
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double beta = rho[j] * inner(state.y[j], q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[j] - beta) * state.s[j][i];
    }
    for (double& v : q) v = -v;
    return q;
}

LbfgsResult Lbfgs::run(const ObjectiveFunction& objective, LbfgsState state, int evaluations,
                       const IterationCallback& on_iteration) const {
    LbfgsResult result;
    result.evaluations = evaluations;
    result.status = OptimizerStatus::max_iters;

    while (true) {
        const double gnorm = norm(state.current.gradient);
        result.grad_norm = gnorm;
        if (gnorm <= options_.tol) {
            result.status = OptimizerStatus::converged;
            break;
        }
        if (state.iteration >= options_.max_iters) break;

        std::vector<double> d = direction(state);
        double slope = inner(state.current.gradient, d);
        bool steepest = state.s.empty();
        if (!(slope < 0.0)) {
            state.s.clear();
            state.y.clear();
            d = state.current.gradient;
            for (double& v : d) v = -v;
            slope = -gnorm * gnorm;
            steepest = true;
        }
        if (projector_) {
            projector_(d);
            slope = inner(state.current.gradient, d);
        }
        // Unit trial step in the first iteration after a restart.
        const double initial = steepest ? std::min(1.0, 1.0 / gnorm) : 1.0;

        LineSearchOutcome ls = line_search(objective, state.x, state.current, d, initial);
        result.evaluations += ls.evaluations;
        if (!ls.accepted) {
            result.status = OptimizerStatus::linesearch_failure;
            break;
        }

        std::vector<double> x_new = axpy(state.x, ls.step, d);
        std::vector<double> s = difference(x_new, state.x);
        std::vector<double> y = difference(ls.eval.gradient, state.current.gradient);
        const double sy = inner(s, y);
        if (sy > std::numeric_limits<double>::epsilon() * norm(s) * norm(y)) {
            state.s.push_back(std::move(s));
            state.y.push_back(std::move(y));
            if (static_cast<int>(state.s.size()) > options_.memory) {
                state.s.pop_front();
                state.y.pop_front();
            }
        }
        state.x = std::move(x_new);
        state.current = std::move(ls.eval);
        ++state.iteration;
        state.history.push_back({state.iteration, state.current.value,
                                 norm(state.current.gradient), state.current.aux});
        if (on_iteration) on_iteration(state);
    }
    result.state = std::move(state);
    return result;
}

Lbfgs::LineSearchOutcome Lbfgs::line_search(const ObjectiveFunction& objective,
                                            const std::vector<double>& x,
                                            const Evaluation& at_x, const std::vector<double>& d,
                                            double initial_step) const {
    struct Trial {
        double step = 0.0;
        double value = kInf;
        double slope = kInf;
        Evaluation eval;
    };

    LineSearchOutcome out;
    const double f0 = at_x.value;
    const double g0 = inner(at_x.gradient, d);

    auto evaluate = [&](double step) {
        Trial t;
        t.step = step;
        ++out.evaluations;
        try {
            t.eval = objective(axpy(x, step, d));
            if (std::isfinite(t.eval.value)) {
                t.value = t.eval.value;
                t.slope = inner(t.eval.gradient, d);
            }
        } catch (const Error&) {
            // failed solve: treated as an infinite value
        }
        return t;
    };
    auto armijo = [&](const Trial& t) { return t.value <= f0 + options_.c1 * t.step * g0; };
    auto curvature = [&](const Trial& t) { return std::abs(t.slope) <= -options_.c2 * g0; };

    // Best sufficient-decrease point, used if the budget runs out before Wolfe.
    Trial best;
    auto remember = [&](const Trial& t) {
        if (armijo(t) && t.value < best.value) best = t;
    };
    auto finish = [&](Trial t) {
        out.accepted = true;
        out.step = t.step;
        out.eval = std::move(t.eval);
        return out;
    };
    auto fallback = [&]() {
        if (std::isfinite(best.value) && best.value < f0) return finish(std::move(best));
        out.accepted = false;
        return out;
    };

    auto zoom = [&](Trial lo, Trial hi) {
        double previous_width = kInf;
        while (out.evaluations < options_.max_linesearch) {
            const double width = hi.step - lo.step;
            if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
            double step = std::numeric_limits<double>::quiet_NaN();
            // Cubic interpolation unless the bracket failed to shrink enough.
            if (std::isfinite(hi.value) && std::isfinite(hi.slope) &&
                std::abs(width) <= 0.66 * previous_width)
                step = cubic_minimizer(lo.step, lo.value, lo.slope, hi.step, hi.value, hi.slope);
            const double a = std::min(lo.step, hi.step) + 0.1 * std::abs(width);
            const double b = std::max(lo.step, hi.step) - 0.1 * std::abs(width);
            if (!(step >= a && step <= b)) step = lo.step + 0.5 * width;
            previous_width = std::abs(width);

            Trial t = evaluate(step);
            remember(t);
            if (!armijo(t) || t.value >= lo.value) {
                hi = std::move(t);
            } else {
                if (curvature(t)) return finish(std::move(t));
                if (t.slope * (hi.step - lo.step) >= 0.0) hi = lo;
                lo = std::move(t);
            }
        }
        return fallback();
    };

    Trial prev;
    prev.step = 0.0;
    prev.value = f0;
    prev.slope = g0;
    double step = initial_step;
    for (int i = 0; out.evaluations < options_.max_linesearch; ++i) {
        Trial t = evaluate(step);
        remember(t);
        if (!armijo(t) || (i > 0 && t.value >= prev.value)) return zoom(std::move(prev), std::move(t));
        if (curvature(t)) return finish(std::move(t));
        if (t.slope >= 0.0) return zoom(std::move(t), std::move(prev));
        prev = std::move(t);
        step *= 2.0;
    }
    return fallback();
}

LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, std::vector<double> x0,
                           const LbfgsOptions& options) {
    std::vector<double> metric(x0.size(), 1.0);
    return Lbfgs(options, std::move(metric)).minimize(objective, std::move(x0));
}

} // namespace instanton
