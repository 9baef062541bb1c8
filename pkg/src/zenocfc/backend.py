"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``ZENOCFC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("ZENOCFC_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

if _compiled is not None:
    apply_nodes = _compiled.apply_nodes
    any_click = _compiled.any_click
    BACKEND = "compiled"
else:
    apply_nodes = _fallback.apply_nodes
    any_click = _fallback.any_click
    BACKEND = "python"

__all__ = ["BACKEND", "apply_nodes", "any_click"]
