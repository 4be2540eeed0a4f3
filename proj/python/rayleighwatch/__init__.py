"""Python interface to the flow laboratory core."""

import json as _json

from ._core import (  # noqa: F401
    functionals,
    geometric_mean,
    p_norm,
    step,
    stream,
    velocity,
)
from . import _core as _c

__all__ = [
    "constants",
    "dictionary_study",
    "functionals",
    "geometric_mean",
    "p_norm",
    "preset",
    "run",
    "step",
    "stream",
    "velocity",
]


def constants(omega):
    """Run-level constants derived from an initial vorticity array."""
    return _json.loads(_c.constants_json(omega))


def preset(name):
    """Built-in configuration echoed as a dict."""
    return _json.loads(_c.preset_json(name))


def run(config):
    """Integrate a scenario; accepts a config dict or a JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_c.run_json(config))


def dictionary_study(config, levels=3):
    """Refinement study of the change-of-variable identities."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_c.dictionary_study_json(config, levels))
