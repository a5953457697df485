"""Proximal sampling with stochastic gradient and value oracles."""

import json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment as _run_experiment
from ._core import validate_config as _validate_config

__all__ = [name for name in dir() if not name.startswith("_")]


def validate(config):
    """Validate a config given as a dict or JSON text; returns the echoed dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_validate_config(text))


def run(config):
    """Run an experiment; returns (report dict, csv text, all_pass)."""
    text = config if isinstance(config, str) else json.dumps(config)
    out = _run_experiment(text)
    return json.loads(out["report"]), out["csv"], out["all_pass"]
