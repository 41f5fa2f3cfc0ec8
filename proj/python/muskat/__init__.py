"""Muskat interface simulator: numpy front end to the C++ core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_config_json, run_suite_json


def run_suite(name):
    """Run a named property suite and return its report as a dict."""
    return _json.loads(run_suite_json(name))


def run_config(config, base_dir="."):
    """Run a simulation from a config dict; returns the manifest dict."""
    return _json.loads(run_config_json(_json.dumps(config), str(base_dir)))
