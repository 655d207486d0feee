"""nlgf: finite-scale toolkit for non-local games.

Submodules load on first access so that ``nlgf.cli`` can set thread caps
before numpy is imported.
"""

from __future__ import annotations

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("gf2p", "clspace", "polylab", "gamecore", "quantlab", "solvers", "suite", "cli",
               "config", "errors", "rng")

__all__ = ["__version__", *_SUBMODULES]


def __getattr__(name: str):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module 'nlgf' has no attribute {name!r}")
