#include "instanton/acceptance.hpp"
#include "instanton/errors.hpp"
#include "instanton/io.hpp"
#include "instanton/presets.hpp"
#include "instanton/solver.hpp"
#include "instanton/systems.hpp"
#include "instanton/validation.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>

namespace py = pybind11;
using namespace instanton;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const Trajectory& t) {
    Array out({t.nodes(), t.components(), t.points()});
    std::copy(t.values().begin(), t.values().end(), out.mutable_data());
    return out;
}

Array to_numpy(const Field& f) {
    Array out({f.components(), f.points()});
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

Trajectory to_trajectory(const Array& a, const InstantonProblem& problem) {
    const Trajectory shape = problem.zero_momentum();
    if (a.ndim() != 3 || a.shape(0) != shape.nodes() || a.shape(1) != shape.components() ||
        a.shape(2) != shape.points())
        throw ShapeError("momentum must have shape (" + std::to_string(shape.nodes()) + ", " +
                         std::to_string(shape.components()) + ", " +
                         std::to_string(shape.points()) + ")");
    Trajectory t = shape;
    std::copy(a.data(), a.data() + a.size(), t.values().begin());
    return t;
}

Field to_field(const Array& a, const Model& model) {
    if (a.ndim() != 2 || a.shape(0) != model.components() || a.shape(1) != model.domain().points)
        throw ShapeError("field must have shape (" + std::to_string(model.components()) + ", " +
                         std::to_string(model.domain().points) + ")");
    Field f(model.components(), model.domain().points);
    std::copy(a.data(), a.data() + a.size(), f.values().begin());
    return f;
}

/// Preset plus a problem built from it, kept alive together.
class Problem {
public:
    Problem(const std::string& name, const ParameterMap& params, std::optional<int> Nx,
            std::optional<int> Nt, std::optional<double> T, std::optional<double> lambda,
            std::optional<double> tol) {
        PresetOverrides o;
        o.params = params;
        o.Nx = Nx;
        o.Nt = Nt;
        o.T = T;
        o.lambda = lambda;
        o.tol = tol;
        preset_ = preset(name, o);
        problem_.emplace(preset_.problem());
    }

    const ModelPreset& preset_data() const { return preset_; }
    InstantonProblem& problem() { return *problem_; }
    const InstantonProblem& problem() const { return *problem_; }

private:
    ModelPreset preset_;
    std::optional<InstantonProblem> problem_;
};

py::dict model_info(const Model& m) {
    py::dict d;
    d["name"] = m.name();
    d["components"] = m.components();
    d["points"] = m.domain().points;
    d["length"] = m.domain().length;
    d["parameters"] = m.parameters();
    d["equations"] = m.equations();
    d["forced_components"] = m.forced_components();
    d["additive_noise"] = m.additive_noise();
    d["coordinates"] = m.domain().coordinates();
    return d;
}

py::dict result_dict(const InstantonResult& r) {
    py::dict d;
    d["status"] = std::string(to_string(r.status));
    d["value"] = r.value;
    d["action"] = r.action;
    d["penalty"] = r.penalty;
    d["endpoint_error"] = r.endpoint_error;
    d["grad_norm"] = r.grad_norm;
    d["lambda"] = r.lambda;
    d["iterations"] = r.iterations;
    d["evaluations"] = r.evaluations;
    d["hamiltonian"] = r.hamiltonian;
    d["phi"] = to_numpy(r.phi);
    d["mu"] = to_numpy(r.mu);
    d["theta"] = to_numpy(r.theta);
    return d;
}

py::dict check_dict(const CheckReport& c) {
    py::dict d;
    d["name"] = c.name;
    d["metric"] = c.metric;
    d["value"] = c.value;
    d["threshold"] = c.threshold;
    d["pass"] = c.pass;
    d["probes"] = c.probes;
    d["seed"] = c.seed;
    return d;
}

} // namespace

PYBIND11_MODULE(_instanton, m) {
    m.doc() = "Minimum-action transition paths by the adjoint-state method";

    // Translators are tried newest first, so the base class goes first.
    const auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", py::make_tuple(error, py::handle(PyExc_ValueError)));
    py::register_exception<ShapeError>(m, "ShapeError", py::make_tuple(error, py::handle(PyExc_ValueError)));
    py::register_exception<SolverError>(m, "SolverError", error);
    py::register_exception<IoError>(m, "IoError", py::make_tuple(error, py::handle(PyExc_OSError)));

    m.attr("DEFAULT_SEED") = kDefaultSeed;
    m.def("preset_names", &preset_names);
    m.def(
        "model_info",
        [](const std::string& name, const ParameterMap& params, std::optional<int> points) {
            return model_info(*make_model(name, params, points));
        },
        py::arg("name"), py::arg("params") = ParameterMap{}, py::arg("points") = py::none());

    m.def(
        "boundary_covariance_apply",
        [](const Array& v, std::optional<int> points) {
            const auto model = make_model("allencahn_boundary", {}, points);
            const auto& ac = dynamic_cast<const AllenCahnBoundary&>(*model);
            return to_numpy(ac.covariance_apply(model->zero_field(), to_field(v, *model)));
        },
        py::arg("v"), py::arg("points") = py::none(),
        "Allen-Cahn boundary-noise covariance a v (sigma0^2 included) on the default grid.");

    py::class_<Problem>(m, "Problem")
        .def(py::init<const std::string&, const ParameterMap&, std::optional<int>,
                      std::optional<int>, std::optional<double>, std::optional<double>,
                      std::optional<double>>(),
             py::arg("name"), py::arg("params") = ParameterMap{}, py::arg("Nx") = py::none(),
             py::arg("Nt") = py::none(), py::arg("T") = py::none(),
             py::arg("lambda_") = py::none(), py::arg("tol") = py::none())
        .def_property_readonly("name", [](const Problem& p) { return p.preset_data().name; })
        .def_property_readonly("model", [](const Problem& p) { return model_info(p.problem().model()); })
        .def_property_readonly("shape",
                               [](const Problem& p) {
                                   const Trajectory z = p.problem().zero_momentum();
                                   return py::make_tuple(z.nodes(), z.components(), z.points());
                               })
        .def_property_readonly("T", [](const Problem& p) { return p.preset_data().T; })
        .def_property_readonly("dt", [](const Problem& p) { return p.problem().grid().dt(); })
        .def_property_readonly("tol", [](const Problem& p) { return p.preset_data().tol; })
        .def_property("lambda_", [](const Problem& p) { return p.problem().lambda(); },
                      [](Problem& p, double l) { p.problem().set_lambda(l); })
        .def_property_readonly("u0", [](const Problem& p) { return to_numpy(p.preset_data().u0); })
        .def_property_readonly("uT", [](const Problem& p) { return to_numpy(p.preset_data().uT); })
        .def("zero_momentum", [](const Problem& p) { return to_numpy(p.problem().zero_momentum()); })
        .def(
            "random_momentum",
            [](const Problem& p, double amplitude, std::uint64_t seed) {
                return to_numpy(random_momentum(p.problem(), amplitude, seed));
            },
            py::arg("amplitude") = 0.3, py::arg("seed") = kDefaultSeed)
        .def(
            "evaluate",
            [](const Problem& p, const Array& theta) {
                const ObjectiveReport r = p.problem().evaluate(to_trajectory(theta, p.problem()));
                py::dict d;
                d["value"] = r.value;
                d["action"] = r.action;
                d["penalty"] = r.penalty;
                d["endpoint_error"] = r.endpoint_error;
                d["gradient"] = to_numpy(r.gradient);
                d["phi"] = to_numpy(r.phi);
                d["mu"] = to_numpy(r.mu);
                return d;
            },
            py::arg("theta"), "J, its parts, the gradient a(phi)(theta - mu), phi and mu.")
        .def(
            "pairing",
            [](const Problem& p, const Array& x, const Array& y) {
                return p.problem().pairing(to_trajectory(x, p.problem()),
                                           to_trajectory(y, p.problem()));
            },
            py::arg("x"), py::arg("y"))
        .def(
            "gradient_check",
            [](const Problem& p, const Array& theta, int probes, double h, double threshold,
               std::uint64_t seed) {
                GradientCheckOptions o;
                o.probes = probes;
                o.h = h;
                o.threshold = threshold;
                o.seed = seed;
                return check_dict(gradient_check(p.problem(), to_trajectory(theta, p.problem()), o));
            },
            py::arg("theta"), py::arg("probes") = 10, py::arg("h") = 1e-5,
            py::arg("threshold") = 1e-5, py::arg("seed") = kDefaultSeed)
        .def(
            "solve",
            [](Problem& p, std::optional<int> max_iters, std::optional<int> memory) {
                OptimizerConfig c = p.preset_data().optimizer();
                if (max_iters) c.lbfgs.max_iters = *max_iters;
                if (memory) c.lbfgs.memory = *memory;
                InstantonResult r;
                {
                    py::gil_scoped_release release;
                    r = solve_instanton(p.problem(), c);
                }
                return result_dict(r);
            },
            py::arg("max_iters") = py::none(), py::arg("memory") = py::none(),
            "Runs the preset's optimizer schedule from theta = 0.");

    m.def(
        "run",
        [](const std::string& config_json, bool quiet) {
            const RunConfig c = parse_config(config_json);
            RunOptions o;
            o.quiet = quiet;
            py::gil_scoped_release release;
            return run(c, o);
        },
        py::arg("config_json"), py::arg("quiet") = true,
        "Solves a JSON run configuration and writes its outputs; returns the exit code.");

    m.def(
        "accept",
        [](const std::vector<std::string>& only, const std::string& tier, bool isolate) {
            AcceptanceOptions o;
            o.tier = parse_tier(tier);
            o.only = only;
            o.isolate = isolate;
            py::gil_scoped_release release;
            return run_acceptance(o).to_json();
        },
        py::arg("only") = std::vector<std::string>{}, py::arg("tier") = "fast",
        py::arg("isolate") = false, "Acceptance criteria as a JSON summary string.");
}
