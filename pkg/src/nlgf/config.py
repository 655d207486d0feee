"""Runtime caps, overridable through NLGF_CAPACITY."""

from __future__ import annotations

import os

ENUM_CAP = 1 << 20      # seeds / question pairs enumerated exactly
SEARCH_CAP = 1 << 24    # nodes visited by the classical solver
TABLE_LIMIT = 1 << 12   # level maps tabulated up to this many prefixes


def capacity(default: int) -> int:
    """The cap to enforce: NLGF_CAPACITY if set, else ``default``."""
    raw = os.environ.get("NLGF_CAPACITY")
    if raw:
        try:
            return max(1, int(float(raw)))
        except ValueError:
            pass
    return default
