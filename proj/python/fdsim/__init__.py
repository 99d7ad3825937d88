"""Fixed-depth Hamiltonian simulation via Cartan decomposition."""

import json

from . import _fdsim
from ._fdsim import (
    FdsimError,
    bracket,
    bracket_strings,
    build_model,
    cartan_decompose,
    model_names,
    pauli_mul,
    trotter_sweep,
    truncation_slope,
    y_parity,
)

__all__ = [
    "FdsimError",
    "bracket",
    "bracket_strings",
    "build_model",
    "cartan_decompose",
    "config_hash",
    "default_config",
    "exit_status",
    "model_names",
    "pauli_mul",
    "run_decompose",
    "run_error_curve",
    "trotter_sweep",
    "truncation_slope",
    "y_parity",
]


def _merge(base, overrides):
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def default_config():
    return json.loads(_fdsim.default_config())


def _config(config=None, **overrides):
    return json.dumps(_merge(default_config(), _merge(dict(config or {}), overrides)))


def config_hash(config=None, **overrides):
    return _fdsim.config_hash(_config(config, **overrides))


def run_decompose(config=None, **overrides):
    """Decompose and optimize; returns the run record as a dict."""
    return json.loads(_fdsim.run_decompose(_config(config, **overrides)))


def run_error_curve(config=None, **overrides):
    """Full pipeline including the error curve; returns the run record as a dict."""
    return json.loads(_fdsim.run_error_curve(_config(config, **overrides)))


def exit_status(record):
    return _fdsim.record_exit_status(json.dumps(record))
