"""Minimum-action (instanton) paths of stochastic reaction-diffusion systems.

Thin Python layer over the compiled core. Trajectories are numpy arrays of
shape (time nodes, components, grid points).
"""

import json

from ._instanton import (
    DEFAULT_SEED,
    ConfigError,
    Error,
    IoError,
    Problem,
    ShapeError,
    SolverError,
    boundary_covariance_apply,
    model_info,
    preset_names,
)
from . import _instanton

__all__ = [
    "DEFAULT_SEED",
    "ConfigError",
    "Error",
    "IoError",
    "Problem",
    "ShapeError",
    "SolverError",
    "accept",
    "boundary_covariance_apply",
    "model_info",
    "preset_names",
    "run",
]


def run(config, quiet=True):
    """Solve a run configuration (dict or JSON text); returns the exit code."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _instanton.run(text, quiet)


def accept(only=(), tier="fast", isolate=False):
    """Run acceptance criteria and return the parsed summary."""
    return json.loads(_instanton.accept(list(only), tier, isolate))
