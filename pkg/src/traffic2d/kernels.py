"""Sweep-kernel selection: compiled extension if built, numpy fallback otherwise.

Set ``TRAFFIC2D_PURE_PYTHON=1`` to force the fallback (used by parity tests
and the kernel benchmark).
"""

import os

from . import _sweep_py

if os.environ.get("TRAFFIC2D_PURE_PYTHON"):
    _backend = _sweep_py
    COMPILED = False
else:
    try:
        from . import _sweep as _backend  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        _backend = _sweep_py
        COMPILED = False

rusanov_sweep = _backend.rusanov_sweep
rusanov_sweep_python = _sweep_py.rusanov_sweep


def backend_name():
    return "compiled" if COMPILED else "python"
