"""Perfect-tree forcing toolkit."""

import json

from ._core import ForcingError, Tree, levels_json
from ._core import avoid_demo as _avoid_demo
from ._core import run_stages as _run_stages
from ._core import verify as _verify

__all__ = ["ForcingError", "Tree", "levels", "run_stages", "verify", "avoid_demo"]


def _config_text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else json.dumps(config)


def levels(expr, depth):
    """Levels 0..depth of a tree expression, as lists of bit strings."""
    return json.loads(levels_json(expr, depth))["levels"]


def run_stages(config=None):
    """Runs the staged construction; returns (hash, trace dict)."""
    digest, trace = _run_stages(_config_text(config))
    return digest, json.loads(trace)


def verify(config=None, depth=8):
    """Lemma and pre-density checks as a list of dicts."""
    return [
        {"name": n, "status": s, "detail": d}
        for n, s, d in _verify(_config_text(config), depth)
    ]


def avoid_demo(which="pi"):
    """Runs an avoidance demo ("pi", "zero" or a config dict); returns (ok, trace)."""
    arg = which if which in ("pi", "zero") else _config_text(which)
    ok, trace = _avoid_demo(arg)
    return ok, json.loads(trace)
