"""Python front end to the advdiff C++ library."""

import json
import os

from ._advdiff import (
    ConfigError,
    Error,
    InvalidArgumentError,
    adaptive_mesh,
    exact_1d,
    exact_ej,
    uniform_mesh,
)
from . import _advdiff

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgumentError",
    "adaptive_mesh",
    "exact_1d",
    "exact_ej",
    "normalize_config",
    "run",
    "uniform_mesh",
]


def normalize_config(config):
    """Return the config with method defaults filled in."""
    return json.loads(_advdiff.normalize_config(json.dumps(config)))


def run(config, out_dir):
    """Run one experiment, write its artifacts to out_dir and return report.json as a dict."""
    return json.loads(_advdiff.run_json(json.dumps(config), os.fspath(out_dir)))
