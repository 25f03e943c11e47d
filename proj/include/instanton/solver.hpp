#pragma once

#include "instanton/lbfgs.hpp"
#include "instanton/objective.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace instanton {

/// Geometric penalty schedule lambda0 * growth^s, s = 0..stages-1.
struct Continuation {
    double lambda0 = 1.0;
    double growth = 1.0;
    int stages = 1;
};

/// Preliminary stage run from theta = 0 whose result seeds the main stages.
/// Used where a zero start sits in the basin of a spurious local minimum.
struct Warmup {
    double lambda = 1.0;
    double tol = 1e-2;
    int max_iters = 500;
};

struct Stage {
    double lambda = 1.0;
    double tol = 1e-4;
    int max_iters = 1000;
    bool warmup = false;
};

struct OptimizerConfig {
    LbfgsOptions lbfgs;
    double lambda = 1.0;
    std::optional<Continuation> continuation;  ///< overrides `lambda` when set
    std::optional<Warmup> warmup;
    bool debug_checks = false;

    void validate() const;
    std::vector<double> lambda_schedule() const;
    /// Warmup (if any) followed by the lambda schedule.
    std::vector<Stage> stages() const;
};

struct HistoryEntry {
    int stage = 0;
    int iteration = 0;
    double lambda = 0.0;
    double value = 0.0;
    double grad_norm = 0.0;
    double action = 0.0;
    double endpoint_error = 0.0;
};

struct StageSummary {
    double lambda = 0.0;
    bool warmup = false;
    OptimizerStatus status = OptimizerStatus::max_iters;
    int iterations = 0;
    double action = 0.0;
    double endpoint_error = 0.0;
};

struct InstantonResult {
    Trajectory phi;
    Trajectory mu;
    Trajectory theta;
    double value = 0.0;
    double action = 0.0;
    double penalty = 0.0;
    double endpoint_error = 0.0;
    double grad_norm = 0.0;
    double lambda = 0.0;
    std::vector<double> hamiltonian;  ///< H(phi_k, mu_k)
    std::vector<HistoryEntry> history;
    std::vector<StageSummary> stages;
    OptimizerStatus status = OptimizerStatus::max_iters;
    int iterations = 0;   ///< accepted steps over all stages
    int evaluations = 0;  ///< objective evaluations over all stages
    /// J(theta delayed by one node) - J(theta). Small values flag the
    /// time-translation flat direction of long horizons.
    double time_shift_sensitivity = 0.0;
};

/// Resumable optimizer position: the stage being run and its L-BFGS state,
/// plus the records of completed stages.
struct SolverCheckpoint {
    int stage = 0;
    LbfgsState state;
    std::vector<StageSummary> completed;
    std::vector<HistoryEntry> history;
    int evaluations = 0;
};

using CheckpointCallback = std::function<void(const SolverCheckpoint&)>;

/// Minimises the reduced objective of `problem` starting from theta = 0 (or
/// from `resume_from`). The problem's lambda is updated per stage. The final
/// phi, mu, action and Hamiltonian trace are recomputed at the returned theta.
InstantonResult solve_instanton(InstantonProblem& problem, const OptimizerConfig& config,
                                const SolverCheckpoint* resume_from = nullptr,
                                const CheckpointCallback& on_iteration = {});

/// H(phi_k, p_k) at every node.
std::vector<double> hamiltonian_trace(const Model& model, const Trajectory& phi,
                                      const Trajectory& p);

/// theta delayed by one node: out_0 = 0, out_k = theta_{k-1}.
Trajectory shift_by_one_node(const Trajectory& theta);

} // namespace instanton
