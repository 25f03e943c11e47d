#pragma once

#include "instanton/model.hpp"
#include "instanton/objective.hpp"
#include "instanton/solver.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace instanton {

/// Resolution and penalty overrides applied on top of a preset's defaults.
struct PresetOverrides {
    ParameterMap params;
    std::optional<int> Nx;
    std::optional<int> Nt;
    std::optional<double> T;
    std::optional<double> lambda;
    std::optional<double> tol;
};

struct ModelPreset {
    std::string name;
    std::shared_ptr<const Model> model;
    Field u0;
    Field uT;
    EndpointFilter filter = EndpointFilter::identity();
    double T = 1.0;
    int Nt = 2;
    int Nx = 1;  ///< grid points (state dimension for point systems)
    double lambda = 1.0;
    double tol = 1e-4;
    int max_iters = 20000;
    std::optional<Warmup> warmup;

    TimeGrid grid() const { return TimeGrid(T, Nt); }
    InstantonProblem problem() const;
    /// Optimizer settings carrying this preset's lambda, tol and warmup.
    OptimizerConfig optimizer() const;
};

const std::vector<std::string>& preset_names();

/// Model only (no endpoints); cheap. Throws ConfigError for unknown names.
std::shared_ptr<Model> make_model(const std::string& name, const ParameterMap& params = {},
                                  std::optional<int> points = std::nullopt);

/// Fully populated preset, endpoints included.
ModelPreset preset(const std::string& name, const PresetOverrides& overrides = {});

struct Endpoints {
    Field u0;
    Field uT;
};

/// Deterministic construction of the preset endpoints for `model`.
Endpoints compute_endpoints(const std::string& name, const Model& model);

/// Newton polish of a steady state of the drift using a finite-difference
/// Jacobian; stops when max |b(u)| <= tol. Throws SolverError on failure.
Field newton_steady_state(const Model& model, Field u, double tol, int max_iterations = 30);

/// Relaxes by deterministic evolution, then Newton; steady state with
/// max |b| <= tol.
Field relax_to_steady_state(const Model& model, Field seed, double tol, double max_time);

struct ShiftFit {
    double shift = 0.0;     ///< b ~ a(x - shift)
    double residual = 0.0;  ///< || b - a(. - shift) || (quadrature norm)
};

/// Translation minimising || b - R_s a || on a periodic domain.
ShiftFit optimal_shift(const Model& model, const Field& a, const Field& b);

/// Field rotated by `distance` on a periodic domain: f(x - distance).
Field rotate(const Model& model, const Field& f, double distance);

/// Evolves `seed` until its shape, compared after the optimal translation,
/// changes by at most `rate_tol` per unit time. Returns the last snapshot;
/// `speed` receives the drift velocity. Throws SolverError on budget overrun.
Field relax_traveling(const Model& model, Field seed, double rate_tol, double max_time,
                      double* speed = nullptr);

/// FitzHugh-Nagumo: homogeneous rest state and a fully developed pulse.
Field fitzhugh_nagumo_rest(const Model& model);
Field fitzhugh_nagumo_pulse(const Model& model);

/// Barkley: the relaxed single puff and the two-puff target.
Endpoints barkley_endpoints(const Model& model);

/// Grid indices of strict local maxima of component `c` above `threshold`.
/// Periodic domains wrap around; Neumann endpoints compare with their mirror.
std::vector<int> peak_indices(const Model& model, const Field& u, int c, double threshold);

/// True when component `c` has exactly two maxima above `threshold` and
/// drops below `floor` between them (grid indices i1 < j < i2).
bool two_separated_peaks(const Model& model, const Field& u, int c, double threshold,
                         double floor);

} // namespace instanton
