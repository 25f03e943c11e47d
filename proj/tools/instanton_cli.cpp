#include "instanton/acceptance.hpp"
#include "instanton/io.hpp"
#include "instanton/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace instanton;
using json = nlohmann::json;

constexpr int exit_check_failed = 5;

/// Config file text (or "{}"), then each override in order.
RunConfig assemble_config(const std::string& path, const std::string& model,
                          const std::vector<std::string>& overrides) {
    std::string text = "{}";
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read config '" + path + "'");
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    if (!model.empty()) text = apply_override(text, "model=" + model);
    for (const auto& o : overrides) text = apply_override(text, o);
    return parse_config(text);
}

void print_field_summary(std::ostream& os, const char* label, const Model& m, const Field& f) {
    os << "  " << label << ":";
    for (int c = 0; c < f.components(); ++c) {
        double lo = f(c, 0), hi = f(c, 0), mean = 0.0;
        for (int i = 0; i < f.points(); ++i) {
            lo = std::min(lo, f(c, i));
            hi = std::max(hi, f(c, i));
            mean += f(c, i);
        }
        mean /= f.points();
        os << "  c" << c << " [min " << lo << ", mean " << mean << ", max " << hi << "]";
    }
    if (!m.domain().is_point()) {
        os << "  |b(u)| " << std::setprecision(3);
        const Field b = drift(m, f);
        os << max_abs(b);
    }
    os << std::setprecision(6) << "\n";
}

int describe(const std::string& name, bool endpoints) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::cerr << "unknown preset '" << name << "'; known presets:";
        for (const auto& n : names) std::cerr << " " << n;
        std::cerr << "\n";
        return exit_config;
    }
    const auto model = make_model(name);
    std::cout << std::setprecision(6) << "preset " << name << "\n";
    std::cout << "equations:\n";
    for (const auto& e : model->equations()) std::cout << "  " << e << "\n";
    std::cout << "parameters:\n";
    for (const auto& [k, v] : model->parameters()) std::cout << "  " << k << " = " << v << "\n";
    const auto& d = model->domain();
    std::cout << "domain: " << to_string(d.bc);
    if (!d.is_point()) std::cout << " [0, " << d.length << "], Nx = " << d.points;
    else std::cout << ", dimension " << model->components();
    std::cout << "\n";

    std::cout << "noise: " << (model->additive_noise() ? "additive" : "multiplicative")
              << (model->has_sigma() ? "" : ", covariance only (rank-deficient)") << "\n";
    std::cout << "forced components:";
    const auto forced = model->forced_components();
    for (std::size_t c = 0; c < forced.size(); ++c)
        std::cout << " c" << c << (forced[c] ? "=forced" : "=unforced");
    std::cout << "\n";

    if (!endpoints) return exit_converged;
    const ModelPreset p = preset(name);
    std::cout << "T = " << p.T << ", Nt = " << p.Nt << ", dt = " << p.grid().dt() << "\n";
    std::cout << "lambda = " << p.lambda << ", tol = " << p.tol << ", max_iters = " << p.max_iters
              << "\n";
    if (p.warmup)
        std::cout << "warmup: lambda = " << p.warmup->lambda << ", tol = " << p.warmup->tol
                  << ", max_iters = " << p.warmup->max_iters << "\n";
    std::cout << "F = " << p.filter.describe() << "\n";
    std::cout << "endpoints:\n";
    print_field_summary(std::cout, "u0", *p.model, p.u0);
    print_field_summary(std::cout, "uT", *p.model, p.uT);
    return exit_converged;
}

int check_gradient(const RunConfig& config, int probes, double h, double threshold,
                   std::uint64_t seed, double amplitude, bool as_json) {
    const ModelPreset p = build_preset(config);
    const InstantonProblem problem = p.problem();
    const Trajectory theta = random_momentum(problem, amplitude, seed);
    GradientCheckOptions options;
    options.probes = probes;
    options.h = h;
    options.threshold = threshold;
    options.seed = seed;
    const CheckReport r = gradient_check(problem, theta, options);
    if (as_json) {
        std::cout << json{{"name", r.name},       {"metric", r.metric},
                          {"value", r.value},     {"threshold", r.threshold},
                          {"pass", r.pass},       {"probes", r.probes},
                          {"seed", r.seed}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << r.name << ": " << r.metric << " = " << std::setprecision(3) << r.value
                  << " (threshold " << r.threshold << ", " << r.probes << " probes, seed "
                  << r.seed << ") " << (r.pass ? "PASS" : "FAIL") << "\n";
    }
    return r.pass ? exit_converged : exit_check_failed;
}

int refine(const RunConfig& config, const std::vector<int>& factors, bool scale_space,
           double threshold) {
    PresetOverrides o = config.grid;
    o.params = config.params;
    o.lambda = config.lambda;
    o.tol = config.tol;
    const RefinementReport r = refinement_study(config.model, factors, o, scale_space, threshold);
    std::cout << std::setprecision(10);
    for (const auto& e : r.entries)
        std::cout << "factor " << e.factor << ": Nt = " << e.Nt << ", Nx = " << e.Nx
                  << ", status " << to_string(e.status) << ", action " << e.action
                  << ", hamiltonian drift " << std::setprecision(3) << e.hamiltonian_drift
                  << std::setprecision(10) << "\n";
    std::cout << r.check.metric << " = " << std::setprecision(3) << r.check.value
              << " (threshold " << r.check.threshold << ") "
              << (r.check.pass ? "PASS" : "FAIL") << "\n";
    return r.check.pass ? exit_converged : exit_check_failed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instantons of stochastic ODEs and PDEs by the adjoint-state method"};
    app.require_subcommand(1);

    std::string config_path, output_dir, model;
    std::vector<std::string> overrides;
    bool resume = false, quiet = false;
    auto add_config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--override", overrides, "section.key=value, repeatable, applied in order");
    };

    auto* run_cmd = app.add_subcommand("run", "solve a configured problem and write outputs");
    add_config_flags(run_cmd);
    run_cmd->add_option("--model", model, "preset name (overrides the config)");
    run_cmd->add_option("--output", output_dir, "output directory (overrides the config)");
    run_cmd->add_flag("--resume", resume, "require a checkpoint to resume from");
    run_cmd->add_flag("--quiet", quiet, "no progress messages");

    std::string describe_name;
    bool skip_endpoints = false;
    auto* describe_cmd = app.add_subcommand("describe", "print a preset");
    describe_cmd->add_option("name", describe_name, "preset name")->required();
    describe_cmd->add_flag("--skip-endpoints", skip_endpoints,
                           "model only; skip the grid, solver settings and endpoints");

    int probes = 10;
    double h = 1e-5, threshold = 1e-5, amplitude = 0.5;
    std::uint64_t seed = kDefaultSeed;
    bool as_json = false;
    auto* grad_cmd = app.add_subcommand("check-gradient", "adjoint gradient against differences");
    add_config_flags(grad_cmd);
    grad_cmd->add_option("--model", model, "preset name (overrides the config)");
    grad_cmd->add_option("--probes", probes)->check(CLI::PositiveNumber);
    grad_cmd->add_option("--step", h, "difference step in [1e-7, 1e-3]");
    grad_cmd->add_option("--threshold", threshold);
    grad_cmd->add_option("--seed", seed);
    grad_cmd->add_option("--amplitude", amplitude, "std. deviation of the random momentum");
    grad_cmd->add_flag("--json", as_json);

    std::vector<int> factors = {1, 2};
    bool scale_space = false;
    double refine_threshold = 0.01;
    auto* refine_cmd = app.add_subcommand("refine", "re-solve at refined grids");
    add_config_flags(refine_cmd);
    refine_cmd->add_option("--model", model, "preset name (overrides the config)");
    refine_cmd->add_option("--factors", factors, "subset of 1,2,4")->delimiter(',');
    refine_cmd->add_flag("--scale-space", scale_space, "refine Nx along with Nt");
    refine_cmd->add_option("--threshold", refine_threshold);

    std::string tier = "fast", summary_path;
    std::vector<std::string> only;
    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
    accept_cmd->add_option("--tier", tier)->check(CLI::IsMember({"fast", "full"}));
    accept_cmd->add_option("--only", only, "criterion ids")->delimiter(',');
    accept_cmd->add_option("--json", summary_path, "summary file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run_cmd) {
            if (!output_dir.empty()) overrides.push_back("output.dir=\"" + output_dir + "\"");
            const RunConfig config = assemble_config(config_path, model, overrides);
            return run(config, {resume, quiet});
        }
        if (*describe_cmd) return describe(describe_name, !skip_endpoints);
        if (*grad_cmd)
            return check_gradient(assemble_config(config_path, model, overrides), probes, h,
                                  threshold, seed, amplitude, as_json);
        if (*refine_cmd)
            return refine(assemble_config(config_path, model, overrides), factors, scale_space,
                          refine_threshold);
        if (*accept_cmd) {
            AcceptanceOptions options;
            options.tier = parse_tier(tier);
            options.only = only;
            options.log = &std::cout;
            const AcceptanceSummary s = run_acceptance(options);
            if (!summary_path.empty()) write_atomic(summary_path, s.to_json() + "\n");
            return s.pass ? exit_converged : exit_check_failed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return exit_solver;
    }
    return exit_config;
}
