#pragma once

#include "instanton/objective.hpp"
#include "instanton/presets.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace instanton {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Outcome of one numerical check. `pass` is `value <= threshold`.
struct CheckReport {
    std::string name;
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    int probes = 0;
    std::uint64_t seed = kDefaultSeed;
};

struct GradientCheckOptions {
    int probes = 10;
    double h = 1e-5;  ///< must lie in [1e-7, 1e-3]
    double threshold = 1e-5;
    std::uint64_t seed = kDefaultSeed;
    /// Components the probe directions may touch; empty means all.
    std::vector<bool> components;
};

/// Central differences (J(theta + h d) - J(theta - h d)) / 2h against
/// <<grad, d>> for random unit directions d. The metric is the largest
/// |fd - an| / max(|fd|, |an|), taken as 0 when both sides vanish.
CheckReport gradient_check(const InstantonProblem& problem, const Trajectory& theta,
                           const GradientCheckOptions& options = {});

/// Gaussian random momentum with standard deviation `amplitude`, zero on
/// components the noise cannot reach.
Trajectory random_momentum(const InstantonProblem& problem, double amplitude,
                           std::uint64_t seed = kDefaultSeed);

/// max_k |H(phi_k, mu_k) - mean_k H|.
CheckReport hamiltonian_drift(const Model& model, const Trajectory& phi, const Trajectory& mu,
                              double threshold);

/// max_k || sigma(phi_k)(theta_k - mu_k) || in the quadrature norm, with
/// a(phi_k) in place of sigma for covariance-only models.
double noise_residual(const Model& model, const Trajectory& phi, const Trajectory& theta,
                      const Trajectory& mu);

struct RefinementEntry {
    int factor = 1;
    int Nt = 0;
    int Nx = 0;
    double action = 0.0;
    OptimizerStatus status = OptimizerStatus::max_iters;
    double hamiltonian_drift = 0.0;
};

struct RefinementReport {
    CheckReport check;  ///< largest relative action change between neighbours
    std::vector<RefinementEntry> entries;
};

/// Re-solves the preset with Nt (and Nx for spatial models when
/// `scale_space` is set) multiplied by each factor in {1, 2, 4}.
RefinementReport refinement_study(const std::string& name, const std::vector<int>& factors,
                                  const PresetOverrides& overrides = {}, bool scale_space = false,
                                  double threshold = 0.01);

/// Copy of `model` whose nonlinear Jacobian-adjoint is scaled by `factor`.
/// A negative control: gradient checks on it must fail.
std::shared_ptr<const Model> with_corrupted_jacobian(std::shared_ptr<const Model> model,
                                                     double factor = 1.01);

} // namespace instanton
