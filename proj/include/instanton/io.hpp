#pragma once

#include "instanton/errors.hpp"
#include "instanton/presets.hpp"
#include "instanton/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace instanton {

/// Process exit codes of a run.
enum ExitCode : int {
    exit_converged = 0,
    exit_config = 1,
    exit_max_iters = 2,
    exit_solver = 3,
    exit_io = 4,
};

/// Thrown for unreadable or unwritable files.
class IoError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string model;
    ParameterMap params;
    PresetOverrides grid;  ///< Nx, Nt, T (params, lambda and tol unused here)

    std::optional<double> tol;
    std::optional<int> max_iters;
    std::optional<double> lambda;
    std::optional<int> memory;
    std::optional<Continuation> continuation;
    std::optional<Warmup> warmup;  ///< replaces the preset's warmup when set
    bool warmup_disabled = false;
    bool debug_checks = false;

    std::string output_dir = "instanton_run";
    int checkpoint_interval = 0;  ///< iterations between checkpoints; 0 disables
    int plot_resolution = 200;    ///< max rows and columns of the CSV summaries

    /// Canonical JSON echo of the configuration.
    std::string to_json() const;
    /// Echo without the output section: identifies the solved problem.
    std::string problem_json() const;
};

/// Parses JSON text with top-level keys {model, params, grid, optimizer,
/// output}. Unknown keys and mistyped values raise ConfigError naming the
/// offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "section.key=value" (e.g. "optimizer.tol=1e-3", "params.alpha=2",
/// "model=barkley") to the JSON text of a configuration.
std::string apply_override(const std::string& json_text, const std::string& assignment);

/// Preset with the configuration's overrides, and the matching optimizer.
ModelPreset build_preset(const RunConfig& config);
OptimizerConfig build_optimizer(const RunConfig& config, const ModelPreset& preset);

struct RunOptions {
    bool require_resume = false;  ///< fail when no checkpoint exists
    bool quiet = false;
};

/// Solves, writes every output file into config.output_dir and returns the
/// exit code. Resumes from a checkpoint in the output directory if present.
int run(const RunConfig& config, const RunOptions& options = {});

/// Writes `contents` to `path` via a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Raw little-endian float64 dump plus a `<name>.shape.json` sidecar.
void write_trajectory(const std::filesystem::path& dir, const std::string& name,
                      const Trajectory& t, const TimeGrid& grid, const SpatialDomain& domain);
Trajectory read_trajectory(const std::filesystem::path& bin_path);

/// CSV of at most max_rows time samples by max_cols spatial samples per
/// component; first column t.
std::string downsampled_csv(const Trajectory& t, const TimeGrid& grid,
                            const SpatialDomain& domain, int max_rows, int max_cols);

/// Binary checkpoint of the optimizer, tagged with the configuration echo.
void save_checkpoint(const std::filesystem::path& path, const SolverCheckpoint& checkpoint,
                     const std::string& config_echo);
/// Returns nullopt if the file does not exist. Throws ConfigError if it was
/// written for a different configuration, IoError if it is corrupt.
std::optional<SolverCheckpoint> load_checkpoint(const std::filesystem::path& path,
                                                const std::string& config_echo);

} // namespace instanton
