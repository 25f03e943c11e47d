#include "instanton/validation.hpp"

#include "instanton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace instanton {
namespace {

class CorruptedJacobian final : public Model {
public:
    CorruptedJacobian(std::shared_ptr<const Model> inner, double factor)
        : Model(inner->name() + "+corrupted_jacobian", inner->components(), inner->domain(),
                inner->parameters()),
          inner_(std::move(inner)), factor_(factor) {}

    std::complex<double> linear_symbol(int c, const Mode& m) const override {
        return inner_->linear_symbol(c, m);
    }
    Field nonlinear(const Field& u) const override { return inner_->nonlinear(u); }
    Field nonlinear_jacobian_adjoint(const Field& u, const Field& v) const override {
        Field out = inner_->nonlinear_jacobian_adjoint(u, v);
        out *= factor_;
        return out;
    }
    bool has_sigma() const override { return inner_->has_sigma(); }
    Field sigma_apply(const Field& u, const Field& w) const override {
        return inner_->sigma_apply(u, w);
    }
    Field covariance_apply(const Field& u, const Field& v) const override {
        return inner_->covariance_apply(u, v);
    }
    Field covariance_variation(const Field& u, const Field& v, const Field& w) const override {
        return inner_->covariance_variation(u, v, w);
    }
    bool additive_noise() const override { return inner_->additive_noise(); }
    std::vector<bool> forced_components() const override { return inner_->forced_components(); }
    void check_state(const Field& u, int k) const override { inner_->check_state(u, k); }

private:
    std::shared_ptr<const Model> inner_;
    double factor_;
};

CheckReport make_report(std::string name, std::string metric, double value, double threshold,
                        int probes, std::uint64_t seed) {
    CheckReport r;
    r.name = std::move(name);
    r.metric = std::move(metric);
    r.value = value;
    r.threshold = threshold;
    r.pass = value <= threshold;
    r.probes = probes;
    r.seed = seed;
    return r;
}

} // namespace

Trajectory random_momentum(const InstantonProblem& problem, double amplitude,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Trajectory theta = problem.zero_momentum();
    const auto forced = problem.model().forced_components();
    for (int k = 0; k < theta.nodes(); ++k)
        for (int c = 0; c < theta.components(); ++c)
            for (int i = 0; i < theta.points(); ++i) {
                const double v = amplitude * normal(rng);
                if (forced[static_cast<std::size_t>(c)])
                    theta.node_values(k)[static_cast<std::size_t>(c * theta.points() + i)] = v;
            }
    return theta;
}

CheckReport gradient_check(const InstantonProblem& problem, const Trajectory& theta,
                           const GradientCheckOptions& options) {
    if (!(options.h >= 1e-7 && options.h <= 1e-3))
        throw ConfigError("gradient_check: h must lie in [1e-7, 1e-3]");
    if (options.probes < 1) throw ConfigError("gradient_check: at least one probe required");
    const int comps = problem.model().components();
    if (!options.components.empty() && static_cast<int>(options.components.size()) != comps)
        throw ConfigError("gradient_check: component mask has the wrong length");

    const ObjectiveReport at = problem.evaluate(theta);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int p = 0; p < options.probes; ++p) {
        Trajectory d = problem.zero_momentum();
        for (int k = 0; k < d.nodes(); ++k) {
            auto node = d.node_values(k);
            for (int c = 0; c < comps; ++c)
                for (int i = 0; i < d.points(); ++i) {
                    const double v = normal(rng);
                    if (options.components.empty() || options.components[static_cast<std::size_t>(c)])
                        node[static_cast<std::size_t>(c * d.points() + i)] = v;
                }
        }
        const double scale = problem.norm(d);
        if (scale > 0.0)
            for (double& v : d.values()) v /= scale;

        Trajectory plus = theta;
        Trajectory minus = theta;
        for (std::size_t i = 0; i < d.values().size(); ++i) {
            plus.values()[i] += options.h * d.values()[i];
            minus.values()[i] -= options.h * d.values()[i];
        }
        const double fd = (problem.value(plus) - problem.value(minus)) / (2.0 * options.h);
        const double an = problem.pairing(at.gradient, d);
        const double denom = std::max(std::abs(fd), std::abs(an));
        const double err = denom > 0.0 ? std::abs(fd - an) / denom : 0.0;
        worst = std::max(worst, err);
    }
    return make_report("gradient_check:" + problem.model().name(), "max_relative_error", worst,
                       options.threshold, options.probes, options.seed);
}

CheckReport hamiltonian_drift(const Model& model, const Trajectory& phi, const Trajectory& mu,
                              double threshold) {
    const std::vector<double> h = hamiltonian_trace(model, phi, mu);
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= static_cast<double>(h.size());
    double drift = 0.0;
    for (double v : h) drift = std::max(drift, std::abs(v - mean));
    return make_report("hamiltonian_drift:" + model.name(), "max_abs_deviation", drift, threshold,
                       0, 0);
}

double noise_residual(const Model& model, const Trajectory& phi, const Trajectory& theta,
                      const Trajectory& mu) {
    if (!phi.same_shape(theta) || !phi.same_shape(mu))
        throw ShapeError("noise_residual: trajectories not aligned");
    double worst = 0.0;
    for (int k = 0; k < phi.nodes(); ++k) {
        Field diff = theta.node(k);
        diff -= mu.node(k);
        const Field u = phi.node(k);
        const Field noise =
            model.has_sigma() ? model.sigma_apply(u, diff) : model.covariance_apply(u, diff);
        worst = std::max(worst, norm(noise, model.domain()));
    }
    return worst;
}

RefinementReport refinement_study(const std::string& name, const std::vector<int>& factors,
                                  const PresetOverrides& overrides, bool scale_space,
                                  double threshold) {
    if (factors.empty()) throw ConfigError("refinement_study: no factors given");
    for (int f : factors)
        if (f != 1 && f != 2 && f != 4)
            throw ConfigError("refinement_study: factors must be drawn from {1, 2, 4}");

    const ModelPreset base = preset(name, overrides);
    const bool spatial = !base.model->domain().is_point();
    RefinementReport report;
    for (int f : factors) {
        PresetOverrides o = overrides;
        o.Nt = base.Nt * f;
        if (scale_space && spatial) o.Nx = base.Nx * f;
        const ModelPreset p = preset(name, o);
        InstantonProblem problem = p.problem();
        const InstantonResult r = solve_instanton(problem, p.optimizer());
        RefinementEntry e;
        e.factor = f;
        e.Nt = p.Nt;
        e.Nx = p.Nx;
        e.action = r.action;
        e.status = r.status;
        e.hamiltonian_drift = hamiltonian_drift(*p.model, r.phi, r.mu, 0.0).value;
        report.entries.push_back(e);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const double a = report.entries[i - 1].action;
        const double b = report.entries[i].action;
        const double scale = std::max(std::abs(a), std::abs(b));
        if (scale > 0.0) worst = std::max(worst, std::abs(b - a) / scale);
    }
    report.check = make_report("refinement:" + name, "max_relative_action_change", worst,
                               threshold, static_cast<int>(factors.size()), 0);
    return report;
}

std::shared_ptr<const Model> with_corrupted_jacobian(std::shared_ptr<const Model> model,
                                                     double factor) {
    return std::make_shared<CorruptedJacobian>(std::move(model), factor);
}

} // namespace instanton
