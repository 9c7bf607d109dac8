"""Dense-block fraud detection on rating graphs with temporal and rating signals."""

import json as _json

from ._holoscope import (
    ConfigError,
    ConvergenceError,
    DataError,
    Graph,
    HoloscopeError,
    detect,
    f_measure,
    gen_background,
    inject,
    roc_auc,
    time_obstruction_bound,
)
from ._holoscope import run_command as _run_command

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "Graph",
    "HoloscopeError",
    "detect",
    "f_measure",
    "gen_background",
    "inject",
    "roc_auc",
    "run",
    "time_obstruction_bound",
]


def run(command, **config):
    """Run a batch command (detect, inject, sweep or bench) and return its JSON record.

    Keyword arguments use the run.json config keys, e.g. ``input``,
    ``output_dir``, ``densities`` or ``injection={...}``.
    """
    config = {k: (str(v) if k in ("input", "output_dir") else v) for k, v in config.items()}
    return _json.loads(_run_command(command, _json.dumps(config)))
