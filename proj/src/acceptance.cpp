#include "instanton/acceptance.hpp"

#include "instanton/errors.hpp"
#include "instanton/presets.hpp"
#include "instanton/systems.hpp"
#include "instanton/validation.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>

namespace instanton {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Measurement at_most(std::string metric, double value, double upper) {
    return {std::move(metric), value, -kInf, upper};
}

Measurement at_least(std::string metric, double value, double lower) {
    return {std::move(metric), value, lower, kInf};
}

Measurement within(std::string metric, double value, double lower, double upper) {
    return {std::move(metric), value, lower, upper};
}

Measurement converged(const std::string& label, const InstantonResult& r) {
    return within(label + "converged", r.status == OptimizerStatus::converged ? 1.0 : 0.0, 1.0,
                  1.0);
}

struct Solved {
    ModelPreset preset;
    InstantonResult result;
};

Solved solve_preset(const std::string& name, const PresetOverrides& overrides = {}) {
    ModelPreset p = preset(name, overrides);
    InstantonProblem problem = p.problem();
    InstantonResult r = solve_instanton(problem, p.optimizer());
    return {std::move(p), std::move(r)};
}

Field final_state(const InstantonResult& r) { return r.phi.node(r.phi.nodes() - 1); }

std::string describe_result(const std::string& label, const InstantonResult& r) {
    std::ostringstream os;
    os << label << ": " << to_string(r.status) << " after " << r.iterations
       << " iterations, action " << std::setprecision(8) << r.action << ", |grad| "
       << std::setprecision(3) << r.grad_norm << "; ";
    return os.str();
}

double relative_error(const Field& a, const Field& b, const SpatialDomain& domain) {
    Field d = a;
    d -= b;
    return norm(d, domain) / norm(b, domain);
}

/// Largest |mu| entry over nodes with t >= from, relative to the overall peak.
double late_peak_fraction(const Trajectory& mu, const TimeGrid& grid, double from) {
    double peak = 0.0;
    double late = 0.0;
    for (int k = 0; k < mu.nodes(); ++k) {
        double m = 0.0;
        for (double v : mu.node_values(k)) m = std::max(m, std::abs(v));
        peak = std::max(peak, m);
        if (grid.node(k) >= from - 1e-12) late = std::max(late, m);
    }
    return late / peak;
}

/// int_{t > from} |mu|^2 dt over the total, trapezoid weights in time.
double late_mass_fraction(const Model& model, const Trajectory& mu, const TimeGrid& grid,
                          double from) {
    const auto w = grid.trapezoid_weights();
    double total = 0.0;
    double late = 0.0;
    for (int k = 0; k < mu.nodes(); ++k) {
        const double n = norm(mu.node(k), model.domain());
        const double q = w[static_cast<std::size_t>(k)] * n * n;
        total += q;
        if (grid.node(k) > from) late += q;
    }
    return late / total;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// A1 -------------------------------------------------------------------------

std::vector<Measurement> gradient_oracle(std::string& note) {
    std::vector<Measurement> out;
    for (const std::string name : {"doublewell2d", "doublewell1d_validation"}) {
        const ModelPreset p = preset(name);
        const InstantonProblem problem = p.problem();
        const Trajectory theta = random_momentum(problem, 0.5, kDefaultSeed);
        const CheckReport good = gradient_check(problem, theta);
        out.push_back(at_most(name + ".max_relative_error", good.value, 1e-5));

        // The checker must be able to fail: a 1% error in the Jacobian-adjoint
        // has to show up well above the threshold.
        const InstantonProblem broken(with_corrupted_jacobian(p.model), p.grid(), p.u0, p.uT,
                                      p.filter, p.lambda);
        const CheckReport bad = gradient_check(broken, theta);
        out.push_back(at_least(name + ".corrupted_jacobian_error", bad.value, 1e-5));
    }
    note = "10 probes, h = 1e-5, seed " + std::to_string(kDefaultSeed);
    return out;
}

// A2 -------------------------------------------------------------------------

std::vector<Measurement> convergence_certificate(std::string& note) {
    const Solved coarse = solve_preset("doublewell2d");
    PresetOverrides fine_grid;
    fine_grid.Nt = coarse.preset.Nt * 2;
    const Solved fine = solve_preset("doublewell2d", fine_grid);
    const double tol = coarse.preset.tol;

    const auto& m = *coarse.preset.model;
    const double drift_coarse = hamiltonian_drift(m, coarse.result.phi, coarse.result.mu, 0).value;
    const double drift_fine = hamiltonian_drift(m, fine.result.phi, fine.result.mu, 0).value;
    note = describe_result("Nt=" + std::to_string(coarse.preset.Nt), coarse.result) +
           describe_result("Nt=" + std::to_string(fine.preset.Nt), fine.result);
    return {
        converged("", coarse.result),
        converged("refined.", fine.result),
        at_most("noise_residual",
                noise_residual(m, coarse.result.phi, coarse.result.theta, coarse.result.mu),
                10.0 * tol),
        at_most("refined.noise_residual",
                noise_residual(m, fine.result.phi, fine.result.theta, fine.result.mu), 10.0 * tol),
        within("hamiltonian_drift_ratio", drift_fine / drift_coarse, 0.35, 0.65),
    };
}

// A3 -------------------------------------------------------------------------

std::vector<Measurement> quasipotential_oracle(std::string& note) {
    const Solved s = solve_preset("doublewell1d_validation");
    // Gradient system with V = u^4/4 - u^2/2: the action of the uphill path
    // from -1 to the saddle at 0 is 2 (V(0) - V(-1)) = 1/2.
    const double expected = 0.5;
    note = describe_result("doublewell1d_validation", s.result);
    return {
        converged("", s.result),
        at_most("action_relative_error", std::abs(s.result.action - expected) / expected, 0.05),
    };
}

// A4 -------------------------------------------------------------------------

std::vector<Measurement> degenerate_mechanism(std::string& note) {
    const Solved s = solve_preset("doublewell2d");
    const auto& phi = s.result.phi;
    double closest = kInf;
    for (int k = 0; k < phi.nodes(); ++k) {
        double r2 = 0.0;
        for (double v : phi.node_values(k)) r2 += v * v;
        closest = std::min(closest, std::sqrt(r2));
    }
    note = describe_result("doublewell2d", s.result);
    return {
        converged("", s.result),
        at_most("saddle_distance", closest, 0.1),
        at_most("late_multiplier_fraction", late_peak_fraction(s.result.mu, s.preset.grid(), 7.5),
                0.05),
    };
}

// A5 -------------------------------------------------------------------------

std::vector<Measurement> kernel_zero(std::string& note) {
    struct Case {
        std::string name;
        std::vector<double> start;
        std::vector<double> end;
    };
    const std::vector<Case> cases = {
        {"gierer_meinhardt", {1.0, 1.2}, {1.5, 0.8}},
        {"fitzhugh_nagumo", {-1.2, -0.6}, {1.0, -0.2}},
        {"barkley", {0.2, 1.0}, {1.5, 0.6}},
    };
    std::vector<Measurement> out;
    std::mt19937_64 rng(kDefaultSeed);
    std::normal_distribution<double> normal;
    for (const Case& c : cases) {
        const auto model = make_model(c.name);
        const auto& domain = model->domain();
        const auto x = domain.coordinates();
        Field u0(model->components(), domain.points);
        Field uT(model->components(), domain.points);
        for (int comp = 0; comp < model->components(); ++comp)
            for (int i = 0; i < domain.points; ++i) {
                const double wave =
                    0.1 * std::cos(2.0 * std::numbers::pi * x[static_cast<std::size_t>(i)] /
                                   domain.length);
                u0(comp, i) = c.start[static_cast<std::size_t>(comp)] + wave;
                uT(comp, i) = c.end[static_cast<std::size_t>(comp)] - wave;
            }
        const InstantonProblem problem(model, TimeGrid(2.0, 40), u0, uT,
                                       EndpointFilter::identity(), 10.0);
        const auto forced = model->forced_components();
        double unforced = 0.0;
        double forced_norm = kInf;
        for (int probe = 0; probe < 3; ++probe) {
            Trajectory theta = problem.zero_momentum();
            for (double& v : theta.values()) v = 0.1 * normal(rng);
            const ObjectiveReport r = problem.evaluate(theta);
            double forced_sq = 0.0;
            for (int k = 0; k < r.gradient.nodes(); ++k) {
                const auto node = r.gradient.node_values(k);
                for (int comp = 0; comp < model->components(); ++comp)
                    for (int i = 0; i < domain.points; ++i) {
                        const double g = node[static_cast<std::size_t>(comp * domain.points + i)];
                        if (forced[static_cast<std::size_t>(comp)])
                            forced_sq += g * g;
                        else
                            unforced = std::max(unforced, std::abs(g));
                    }
            }
            forced_norm = std::min(forced_norm, std::sqrt(forced_sq));
        }
        out.push_back(within(c.name + ".max_unforced_gradient", unforced, 0.0, 0.0));
        // Guards against a vacuous pass through an identically zero gradient.
        out.push_back(at_least(c.name + ".forced_gradient_norm", forced_norm, 1e-12));
    }
    note = "T = 2, Nt = 40, three random momenta per model on all components";
    return out;
}

// A6 -------------------------------------------------------------------------

std::vector<Measurement> boundary_covariance(std::string& note) {
    const double pi = std::numbers::pi;
    const auto generic = make_model("allencahn_boundary");
    const auto& ac = dynamic_cast<const AllenCahnBoundary&>(*generic);
    const auto& domain = ac.domain();
    const int n = domain.points;

    Eigen::MatrixXd matrix(n, n);
    for (int j = 0; j < n; ++j) {
        Field e(1, n);
        e(0, j) = 1.0;
        const Field col = ac.boundary_covariance_apply(e);
        for (int i = 0; i < n; ++i) matrix(i, j) = col(0, i);
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(matrix).singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9 * s(0)) ++rank;

    std::mt19937_64 rng(kDefaultSeed);
    std::normal_distribution<double> normal;
    double symmetry = 0.0;
    const Field state(1, n);
    for (int probe = 0; probe < 10; ++probe) {
        Field v(1, n), w(1, n);
        for (int i = 0; i < n; ++i) {
            v(0, i) = normal(rng);
            w(0, i) = normal(rng);
        }
        const double vaw = inner_product(v, ac.covariance_apply(state, w), domain);
        const double avw = inner_product(ac.covariance_apply(state, v), w, domain);
        symmetry = std::max(symmetry, std::abs(vaw - avw) / std::max(std::abs(vaw), std::abs(avw)));
    }

    const Field lift = ac.lift(1.0);
    const auto x = domain.coordinates();
    double lift_error = 0.0;
    for (int i = 0; i < n; ++i)
        lift_error = std::max(lift_error, std::abs(lift(0, i) + std::cosh(pi - x[static_cast<std::size_t>(i)]) /
                                                                 std::sinh(pi)));
    const double lift_at_zero = std::abs(lift(0, 0) + 1.0 / std::tanh(pi));

    // The trapezoid rule is second order, so D*D reaches 1e-10 only on a
    // fine grid; the operational grid is covered by the checks above.
    const int fine_points = (1 << 17) + 1;
    const AllenCahnBoundary fine(ac.parameters(), fine_points);
    const double dd = fine.lift_adjoint(fine.lift(1.0));
    const double sinh_pi = std::sinh(pi);
    const double dd_exact = (pi / 2.0 + std::sinh(2.0 * pi) / 4.0) / (sinh_pi * sinh_pi);

    std::ostringstream os;
    os << "Nx = " << n << ", singular values " << s(0) << ", " << (s.size() > 1 ? s(1) : 0.0)
       << "; D*D on " << fine_points << " points";
    note = os.str();
    return {
        within("rank", rank, 1, 1),
        at_most("symmetry_relative_error", symmetry, 1e-10),
        at_most("lift_error_at_zero", lift_at_zero, 1e-10),
        at_most("lift_max_error", lift_error, 1e-10),
        at_most("lift_adjoint_lift_error", std::abs(dd - dd_exact), 1e-10),
    };
}

// A7 -------------------------------------------------------------------------

std::vector<Measurement> allen_cahn(std::string& note) {
    const Solved s = solve_preset("allencahn_boundary");
    const auto& m = *s.preset.model;
    note = describe_result("allencahn_boundary", s.result);
    return {
        converged("", s.result),
        at_most("endpoint_relative_error",
                relative_error(final_state(s.result), s.preset.uT, m.domain()), 0.05),
        at_most("late_multiplier_mass", late_mass_fraction(m, s.result.mu, s.preset.grid(), 17.0),
                0.05),
    };
}

// A8 -------------------------------------------------------------------------

std::vector<Measurement> spike_and_pulse(std::string& note) {
    const Solved gm = solve_preset("gierer_meinhardt");
    const Field gm_end = final_state(gm.result);
    double peak = -kInf;
    for (int i = 0; i < gm_end.points(); ++i) peak = std::max(peak, gm_end(0, i));
    const auto spikes = peak_indices(*gm.preset.model, gm_end, 0, 0.5 * peak);

    const Solved fhn = solve_preset("fitzhugh_nagumo");
    const auto& model = *fhn.preset.model;
    const Field fhn_end = final_state(fhn.result);
    const ShiftFit fit = optimal_shift(model, fhn.preset.uT, fhn_end);
    const Field aligned = rotate(model, fhn.preset.uT, fit.shift);
    const double correlation = pearson(fhn_end.row(0), aligned.row(0));

    std::ostringstream os;
    os << "shift " << fit.shift << "; ";
    note = describe_result("gierer_meinhardt", gm.result) +
           describe_result("fitzhugh_nagumo", fhn.result) + os.str();
    return {
        converged("gierer_meinhardt.", gm.result),
        within("gierer_meinhardt.activator_spikes", static_cast<double>(spikes.size()), 1, 1),
        converged("fitzhugh_nagumo.", fhn.result),
        at_least("fitzhugh_nagumo.pulse_correlation", correlation, 0.95),
    };
}

// A9 -------------------------------------------------------------------------

std::vector<Measurement> puff_split(std::string& note) {
    const Solved s = solve_preset("barkley");
    const auto& m = *s.preset.model;
    const Field end = final_state(s.result);
    const bool split = two_separated_peaks(m, end, 0, 0.1, 0.05);
    const Field filtered_end = s.preset.filter.apply(end, m.domain());
    const Field filtered_target = s.preset.filter.apply(s.preset.uT, m.domain());
    note = describe_result("barkley", s.result);
    return {
        converged("", s.result),
        within("two_separated_puffs", split ? 1.0 : 0.0, 1, 1),
        at_most("filtered_endpoint_relative_error",
                relative_error(filtered_end, filtered_target, m.domain()), 0.1),
    };
}

// Process isolation ------------------------------------------------------------

json to_json(const Measurement& m) {
    auto bound = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"metric", m.metric},
            {"value", bound(m.value)},
            {"lower", bound(m.lower)},
            {"upper", bound(m.upper)},
            {"pass", m.pass()}};
}

Measurement measurement_from_json(const json& j) {
    auto bound = [](const json& v, double fallback) {
        return v.is_null() ? fallback : v.get<double>();
    };
    return {j.at("metric").get<std::string>(),
            bound(j.at("value"), std::numeric_limits<double>::quiet_NaN()),
            bound(j.at("lower"), -kInf), bound(j.at("upper"), kInf)};
}

json to_json(const CriterionResult& r) {
    json measurements = json::array();
    for (const auto& m : r.measurements) measurements.push_back(to_json(m));
    // Headline: the first failing measurement, else the first one.
    json headline = nullptr;
    for (const auto& m : r.measurements)
        if (!m.pass()) {
            headline = to_json(m);
            break;
        }
    if (headline.is_null() && !r.measurements.empty()) headline = to_json(r.measurements.front());
    json out = {{"id", r.id},           {"title", r.title},
                {"pass", r.pass},       {"timed_out", r.timed_out},
                {"runtime", r.runtime}, {"budget", r.budget},
                {"note", r.note},       {"measurements", measurements}};
    if (!headline.is_null()) {
        out["metric"] = headline["metric"];
        out["value"] = headline["value"];
        out["threshold"] = headline["upper"].is_null() ? headline["lower"] : headline["upper"];
    }
    return out;
}

void write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n <= 0) return;
        done += static_cast<std::size_t>(n);
    }
}

CriterionResult run_isolated(const CriterionSpec& spec, double budget) {
    CriterionResult failed;
    failed.id = spec.id;
    failed.title = spec.title;
    failed.budget = budget;

    int fds[2];
    if (::pipe(fds) != 0) {
        failed.note = "pipe() failed";
        return failed;
    }
    std::cout.flush();
    std::cerr.flush();
    std::fflush(nullptr);
    const auto started = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        failed.note = "fork() failed";
        return failed;
    }
    if (pid == 0) {
        ::close(fds[0]);
        const CriterionResult r = run_criterion(spec);
        write_all(fds[1], to_json(r).dump());
        ::close(fds[1]);
        std::fflush(nullptr);
        ::_exit(0);
    }
    ::close(fds[1]);

    std::string payload;
    bool timed_out = false;
    const auto deadline = started + std::chrono::duration<double>(budget);
    char buffer[4096];
    while (true) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd p{fds[0], POLLIN, 0};
        const int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (ready < 0 && errno != EINTR) break;
        if (ready <= 0) continue;
        const ssize_t n = ::read(fds[0], buffer, sizeof buffer);
        if (n <= 0) break;  // child closed the pipe
        payload.append(buffer, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (timed_out) {
        failed.timed_out = true;
        failed.runtime = elapsed;
        failed.note = "exceeded the wall-clock budget";
        return failed;
    }
    try {
        const json j = json::parse(payload);
        CriterionResult r;
        r.id = j.at("id").get<std::string>();
        r.title = j.at("title").get<std::string>();
        for (const auto& m : j.at("measurements")) r.measurements.push_back(measurement_from_json(m));
        r.pass = j.at("pass").get<bool>();
        r.note = j.at("note").get<std::string>();
        r.runtime = elapsed;
        r.budget = budget;
        return r;
    } catch (const json::exception&) {
        failed.runtime = elapsed;
        failed.note = WIFSIGNALED(status)
                          ? "child terminated by signal " + std::to_string(WTERMSIG(status))
                          : "child produced no result";
        return failed;
    }
}

} // namespace

bool Measurement::pass() const { return !std::isnan(value) && value >= lower && value <= upper; }

Tier parse_tier(const std::string& text) {
    if (text == "fast") return Tier::fast;
    if (text == "full") return Tier::full;
    throw ConfigError("unknown tier '" + text + "' (expected fast or full)");
}

const std::vector<CriterionSpec>& acceptance_criteria() {
    static const std::vector<CriterionSpec> criteria = {
        {"A1", "gradient oracle", Tier::fast, 60.0, gradient_oracle},
        {"A2", "convergence certificate", Tier::fast, 300.0, convergence_certificate},
        {"A3", "quasipotential oracle", Tier::fast, 120.0, quasipotential_oracle},
        {"A4", "degenerate mechanism", Tier::fast, 300.0, degenerate_mechanism},
        {"A5", "kernel-zero property", Tier::fast, 120.0, kernel_zero},
        {"A6", "boundary covariance", Tier::fast, 60.0, boundary_covariance},
        {"A7", "Allen-Cahn instanton", Tier::full, 1800.0, allen_cahn},
        {"A8", "spike merge and pulse initiation", Tier::full, 7200.0, spike_and_pulse},
        {"A9", "puff split", Tier::full, 6.0 * 3600.0, puff_split},
    };
    return criteria;
}

CriterionResult run_criterion(const CriterionSpec& spec) {
    CriterionResult r;
    r.id = spec.id;
    r.title = spec.title;
    r.budget = spec.budget;
    const auto started = std::chrono::steady_clock::now();
    try {
        r.measurements = spec.body(r.note);
        r.pass = !r.measurements.empty() &&
                 std::all_of(r.measurements.begin(), r.measurements.end(),
                             [](const Measurement& m) { return m.pass(); });
    } catch (const std::exception& e) {
        r.note = std::string("exception: ") + e.what();
        r.pass = false;
    }
    r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

AcceptanceSummary run_acceptance(const AcceptanceOptions& options) {
    for (const auto& id : options.only) {
        const auto& all = acceptance_criteria();
        if (std::none_of(all.begin(), all.end(), [&](const CriterionSpec& c) { return c.id == id; }))
            throw ConfigError("unknown criterion '" + id + "'");
    }
    AcceptanceSummary summary;
    summary.tier = options.tier;
    const auto started = std::chrono::steady_clock::now();
    for (const CriterionSpec& spec : acceptance_criteria()) {
        // Ids named explicitly run whatever their tier.
        if (options.only.empty()) {
            if (spec.tier == Tier::full && options.tier == Tier::fast) continue;
        } else if (std::find(options.only.begin(), options.only.end(), spec.id) ==
                   options.only.end()) {
            continue;
        }
        const double budget = spec.budget * options.budget_scale;
        CriterionResult r = options.isolate ? run_isolated(spec, budget) : run_criterion(spec);
        r.budget = budget;
        if (!options.isolate && r.runtime > budget) {
            r.pass = false;
            r.note += " (over budget)";
        }
        if (options.log) *options.log << format_line(r) << std::endl;
        summary.criteria.push_back(std::move(r));
    }
    summary.pass = !summary.criteria.empty() &&
                   std::all_of(summary.criteria.begin(), summary.criteria.end(),
                               [](const CriterionResult& r) { return r.pass; });
    summary.runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return summary;
}

std::string AcceptanceSummary::to_json() const {
    json criteria_json = json::array();
    for (const auto& c : criteria) criteria_json.push_back(instanton::to_json(c));
    const json j = {{"tier", tier == Tier::fast ? "fast" : "full"},
                    {"pass", pass},
                    {"runtime", runtime},
                    {"criteria", criteria_json}};
    return j.dump(2);
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << r.id << " " << (r.pass ? "PASS" : "FAIL") << "  " << r.title << ":";
    for (const auto& m : r.measurements) {
        os << "  " << m.metric << "=" << std::setprecision(4) << m.value;
        if (m.lower == m.upper)
            os << " (== " << m.lower << ")";
        else if (std::isinf(m.lower))
            os << " (<= " << m.upper << ")";
        else if (std::isinf(m.upper))
            os << " (>= " << m.lower << ")";
        else
            os << " (in [" << m.lower << ", " << m.upper << "])";
        if (!m.pass()) os << " !";
    }
    if (r.timed_out) os << "  timed out";
    os << "  [" << std::fixed << std::setprecision(1) << r.runtime << " s / " << r.budget
       << " s]";
    if (!r.pass && !r.note.empty()) os << "  -- " << r.note;
    return os.str();
}

} // namespace instanton
