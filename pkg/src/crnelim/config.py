"""Runtime settings read from the environment."""

from __future__ import annotations

import os

MODES = ("exact", "float", "auto")
EXACT_LIMIT = 2000


def numeric_mode(requested: str | None = None) -> str:
    """Resolve the numeric mode: explicit argument, then ``CRN_NUMERIC_MODE``, then ``auto``."""
    mode = requested or os.environ.get("CRN_NUMERIC_MODE") or "auto"
    mode = mode.strip().lower()
    if mode not in MODES:
        raise ValueError(f"numeric mode must be one of {', '.join(MODES)}, got {mode!r}")
    return mode


def use_exact(size: int, requested: str | None = None) -> bool:
    mode = numeric_mode(requested)
    return mode == "exact" or (mode == "auto" and size <= EXACT_LIMIT)
