"""Fronts and patterns of u_t = (phi(u) + u_t)_xx: predictions, simulation, analysis."""

import json

from ._core import (
    PpfError,
    __version__,
    classify_lambda,
    critical_front,
    front_position,
    grid_instability_speed,
    growth_law,
    modulation_periods,
    saddle_branches,
    spatial_periods,
    speed_fit,
    trace_contours,
    turning_points,
    xi_f,
)
from ._core import _simulate


def simulate(config):
    """Run the PDE. `config` uses the same keys as the JSON config files."""
    return _simulate(json.dumps(config))


__all__ = [
    "PpfError",
    "__version__",
    "classify_lambda",
    "critical_front",
    "front_position",
    "grid_instability_speed",
    "growth_law",
    "modulation_periods",
    "saddle_branches",
    "simulate",
    "spatial_periods",
    "speed_fit",
    "trace_contours",
    "turning_points",
    "xi_f",
]
