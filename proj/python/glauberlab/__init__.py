"""Python access to the glauber library."""

import json as _json

from . import _core
from ._core import (
    MIXING_THRESHOLD,
    CapExceeded,
    ConfigError,
    hypercube_crossing_time,
    hypercube_tv,
    cmd_occupancy_bound,
    lower_bound_params,
    poisson_path_prob,
)

__all__ = [
    "MIXING_THRESHOLD",
    "CapExceeded",
    "ConfigError",
    "chain",
    "compute",
    "hypercube_crossing_time",
    "hypercube_tv",
    "cmd_occupancy_bound",
    "lower_bound_params",
    "poisson_path_prob",
    "validate",
]


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def validate(config):
    """List of (kind, detail) diagnostics; empty when the config is valid."""
    return _core.validate(_text(config))


def compute(config):
    """Run an experiment without touching the filesystem."""
    return _core.compute(_text(config))


def chain(graph, system, dynamics=None, cap=200_000):
    """Exact chain for a graph/system/dynamics spec (dicts or JSON strings)."""
    return _core.Chain(_text(graph), _text(system), _text(dynamics or {}), cap)
